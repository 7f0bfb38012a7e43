"""
Network decomposition into elementary subchannels
Closed-form factor multisets and the level-connectivity colouring that realises them
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Tuple

from ..errors import InvalidArgumentError, NotDecomposableError

Factor = Tuple[int, int]


@dataclass(frozen=True)
class FactorLevels:
    """Levels of (n, m) owned by one factor instance"""
    factor: Factor
    tx_levels: Tuple[int, ...]
    rx_levels: Tuple[int, ...]


@dataclass(frozen=True)
class Decomposition:
    """Ordered factor instances of one direction with their level map"""
    n: int
    m: int
    level_map: Tuple[FactorLevels, ...]

    @property
    def factors(self) -> Tuple[Factor, ...]:
        return tuple(item.factor for item in self.level_map)

    def counts(self) -> Dict[Factor, int]:
        return dict(Counter(self.factors))


def is_decomposable(n: int, m: int) -> bool:
    return n == m or n == 0 or m == 0 or 2 * m <= n or 3 * m <= 2 * n or m >= 2 * n


def factor_multiset(n: int, m: int) -> Dict[Factor, int]:
    """Factor multiplicities for the α-range of (n, m)"""
    if n < 0 or m < 0:
        raise InvalidArgumentError(f"levels must be nonnegative, got ({n},{m})")
    if n == m:
        counts = {(1, 1): n}
    elif 2 * m <= n:
        counts = {(1, 0): n - 2 * m, (2, 1): m}
    elif 3 * m <= 2 * n:
        counts = {(2, 1): 2 * n - 3 * m, (3, 2): 2 * m - n}
    elif m >= 2 * n:
        counts = {(0, 1): m - 2 * n, (1, 2): n}
    else:
        raise NotDecomposableError(f"({n},{m}) has α in (2/3, 2) and is used whole")
    return {factor: count for factor, count in counts.items() if count > 0}


class _UnionFind:
    def __init__(self):
        self.parent: Dict[Tuple[str, int], Tuple[str, int]] = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def level_assignment(n: int, m: int) -> Tuple[FactorLevels, ...]:
    """Connected components of the transmit/receive level graph, ordered by smallest transmit level"""
    if not is_decomposable(n, m):
        raise NotDecomposableError(f"({n},{m}) has α in (2/3, 2) and is used whole")
    q = max(n, m)
    edges: List[Tuple[int, int, str]] = []
    for level in range(n):
        edges.append((level, level + q - n, "direct"))
    for level in range(m):
        edges.append((level, level + q - m, "cross"))

    uf = _UnionFind()
    for level in range(q):
        uf.find(("tx", level))
        uf.find(("rx", level))
    for tx, rx, _ in edges:
        uf.union(("tx", tx), ("rx", rx))

    groups: Dict[Tuple[str, int], Dict[str, list]] = {}
    for tx, rx, kind in edges:
        group = groups.setdefault(uf.find(("tx", tx)), {"tx": set(), "rx": set(), "direct": 0, "cross": 0})
        group["tx"].add(tx)
        group["rx"].add(rx)
        group[kind] += 1

    components = [
        FactorLevels(
            factor=(group["direct"], group["cross"]),
            tx_levels=tuple(sorted(group["tx"])),
            rx_levels=tuple(sorted(group["rx"])),
        )
        for group in groups.values()
    ]
    components.sort(key=lambda item: item.tx_levels[0])
    return tuple(components)


def decompose(n: int, m: int) -> Decomposition:
    counts = factor_multiset(n, m)
    levels = level_assignment(n, m)
    found = Counter(item.factor for item in levels)
    if dict(found) != counts:
        raise NotDecomposableError(f"level graph of ({n},{m}) gives {dict(found)}, expected {counts}")
    return Decomposition(n=n, m=m, level_map=levels)


def direction_factors(n: int, m: int) -> Tuple[Factor, ...]:
    """Factors of one direction, or the whole channel when it is not decomposable"""
    if n == 0 and m == 0:
        return ()
    if is_decomposable(n, m):
        return decompose(n, m).factors
    return ((n, m),)
