"""
Nonfeedback codes for elementary and whole central subchannels
Each code is a per-user level pattern; levels a user can spare for relayed bits are exposed as
relay masks
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import List, Tuple

from ..errors import UnsupportedPlanError
from .gf2 import GF2Basis

Factor = Tuple[int, int]
Pattern = Tuple[int, ...]  # symbol index per level, -1 for an idle level

MAX_MASK_LEVELS = 3


@dataclass(frozen=True)
class CodeLayout:
    """Level patterns of both users for one (n, m) factor"""
    factor: Factor
    users: Tuple[Pattern, Pattern]

    @property
    def q(self) -> int:
        return max(self.factor)

    def symbols(self, user: int) -> int:
        pattern = self.users[user]
        return max(pattern) + 1 if pattern and max(pattern) >= 0 else 0

    @property
    def rate(self) -> int:
        return self.symbols(0) + self.symbols(1)


def _central_above_one(n: int, m: int) -> Tuple[Pattern, Pattern]:
    d = m - n
    start = max(n, 2 * d)
    first = [-1] * m
    for level in range(n):
        first[level] = level
    for k in range(min(d, n - d)):
        first[start + k] = d + k
    second = [-1] * m
    for level in range(d):
        second[level] = level
    return tuple(first), tuple(second)


def _central_below_one(n: int, m: int) -> Tuple[Pattern, Pattern]:
    s = n - m
    first = [-1] * n
    symbol = 0
    if n >= 4 * s:
        for level in list(range(n - 2 * s)) + list(range(n - s, n)):
            first[level] = symbol
            symbol += 1
        for k in range(s):
            first[n - 2 * s + k] = first[s + k]
    else:
        # levels [n-2s, 2s) stay idle; [s, n-2s) are copied onto [2s, n-s)
        for level in list(range(n - 2 * s)) + list(range(n - s, n)):
            first[level] = symbol
            symbol += 1
        for k in range(n - 3 * s):
            first[2 * s + k] = first[s + k]
    second = [-1] * n
    symbol = 0
    for level in list(range(s)) + list(range(n - s, n)):
        second[level] = symbol
        symbol += 1
    return tuple(first), tuple(second)


@lru_cache(maxsize=None)
def code_layout(n: int, m: int, variant: int = 0) -> CodeLayout:
    """Nonfeedback code reaching c_no(n, m); odd variants exchange the two users' patterns"""
    if (n, m) == (0, 0):
        users = ((), ())
    elif (n, m) == (1, 0):
        users = ((0,), (0,))
    elif (n, m) == (0, 1):
        users = ((-1,), (-1,))
    elif (n, m) == (1, 1):
        users = ((0,), (-1,))
    elif (n, m) == (2, 1):
        users = ((0, -1), (0, -1))
    elif (n, m) == (3, 2):
        users = ((0, -1, 1), (0, -1, 1))
    elif (n, m) == (1, 2):
        users = ((0, -1), (0, -1))
    elif 3 * m > 2 * n and m < 2 * n and n != m:
        users = _central_above_one(n, m) if m > n else _central_below_one(n, m)
    else:
        raise UnsupportedPlanError(f"({n},{m}) is decomposed before coding, no whole-channel code")
    if variant % 2:
        users = (users[1], users[0])
    return CodeLayout(factor=(n, m), users=users)


def received_symbols(layout: CodeLayout, user: int) -> List[int]:
    """Receiver forms of one user over bit variables: user's symbols first, then the partner's"""
    n, m = layout.factor
    q = layout.q
    own, other = layout.users[user], layout.users[1 - user]
    offset = layout.symbols(user)
    out = [0] * q
    for level in range(n):
        if own[level] >= 0:
            out[level + q - n] ^= 1 << own[level]
    for level in range(m):
        if other[level] >= 0:
            out[level + q - m] ^= 1 << (offset + other[level])
    return out


def level_mask(levels) -> int:
    mask = 0
    for level in levels:
        mask |= 1 << level
    return mask


def mask_levels(mask: int) -> List[int]:
    return [level for level in range(mask.bit_length()) if mask >> level & 1]


def _masks_fit(layout: CodeLayout, user: int, masks: List[int]) -> bool:
    n, _ = layout.factor
    q = layout.q
    own = layout.symbols(user)
    partner = ((1 << layout.symbols(1 - user)) - 1) << own
    base = own + layout.symbols(1 - user)
    rows = received_symbols(layout, user)
    for i, mask in enumerate(masks):
        for level in mask_levels(mask):
            rows[level + q - n] ^= 1 << (base + i)
    full, relayed = GF2Basis(), GF2Basis()
    for row in rows:
        full.add(row, 0)
        relayed.add(row & ~partner, 0)
    return (
        all(full.contains(1 << s) for s in range(own))
        and all(relayed.contains(1 << (base + i)) for i in range(len(masks)))
    )


@lru_cache(maxsize=None)
def relay_masks(n: int, m: int, variant: int = 0) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Per user k, level masks on which that user can add one relayed bit each.
    Receiver k still decodes its own symbols and reads every relayed bit up to the partner's
    symbols; the partner already knows the relayed bits, so its decoding is untouched.
    """
    layout = code_layout(n, m, variant)
    out = []
    for user in (0, 1):
        masks: List[int] = []
        for size in range(1, min(n, MAX_MASK_LEVELS) + 1):
            for levels in combinations(range(n), size):
                trial = masks + [level_mask(levels)]
                if _masks_fit(layout, user, trial):
                    masks = trial
        out.append(tuple(masks))
    return out[0], out[1]
