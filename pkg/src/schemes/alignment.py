"""
Aligned feedback through a whole helper code
(2,1) gain gadgets hand their bottoms back over one helper factor while its code keeps running.
For a delivery to TX_k, RX_{1-k} adds the bottom it heard on some levels and RX_k adds the top it
heard on others, so the tops cancel where they would hurt and TX_k reads the partner's bottom up
to helper symbols and tops. A search picks those level masks per slot, the lag of every delivery
and, when free room runs out, which helper symbols fall silent.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import FrozenSet, List, Optional, Sequence, Tuple

from ..capacity.formulas import c_no
from ..errors import InfeasibleSchemeError
from .codes import code_layout, level_mask
from .gf2 import GF2Basis

logger = logging.getLogger(__name__)

Factor = Tuple[int, int]
Sides = Tuple[int, ...]

# helper-slot lag of the side-0 and side-1 deliveries, in order of preference
OFFSETS: Tuple[Tuple[int, int], ...] = (
    (0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0),
)
MAX_MASK_LEVELS = 2
SEARCH_BUDGET = 20000


@dataclass(frozen=True)
class Delivery:
    """One gadget bottom carried to TX_side in a helper slot"""
    gadget: int
    side: int
    relay: int  # levels of RX_{1-side} that carry the bottom it heard
    guard: int  # levels of RX_side that carry the top it heard


@dataclass(frozen=True)
class SlotPlan:
    variant: int
    muted: FrozenSet[Tuple[int, int]]  # (user, symbol) left empty
    sides: Tuple[Sides, ...]           # sides served for each gadget of the slot
    deliveries: Tuple[Delivery, ...]


@dataclass(frozen=True)
class AlignedPlan:
    """Periodic two-slot plan: gadgets start in even slots and refine three slots later"""
    factor: Factor
    gains: int
    offsets: Tuple[Tuple[int, int], ...]
    slots: Tuple[SlotPlan, SlotPlan]

    @property
    def muted_per_two_slots(self) -> int:
        return sum(len(plan.muted) for plan in self.slots)

    def gadgets(self, parity: int) -> List[Tuple[int, int, Sides]]:
        return slot_gadgets(self.offsets, parity)


def slot_gadgets(offsets: Sequence[Tuple[int, int]], parity: int) -> List[Tuple[int, int, Sides]]:
    """(gain factor, age, sides) of each gadget served in a helper slot, both-sided gadgets first"""
    ages = (0, 2) if parity == 0 else (1,)
    out = []
    for f, lags in enumerate(offsets):
        for age in ages:
            sides = tuple(side for side in (0, 1) if lags[side] == age)
            if sides:
                out.append((f, age, sides))
    order = {(0, 1): 0, (0,): 1, (1,): 2}
    return sorted(out, key=lambda item: (order[item[2]], item[0], item[1]))


class _Slot:
    """Bit layout of one helper slot: helper symbols first, then A, a, B, b per gadget"""

    def __init__(self, n: int, m: int, variant: int, muted: FrozenSet[Tuple[int, int]], gadgets: int):
        self.n, self.m = n, m
        self.layout = code_layout(n, m, variant)
        self.q = self.layout.q
        self.symbol_bit = {}
        for user in (0, 1):
            for symbol in range(self.layout.symbols(user)):
                if (user, symbol) not in muted:
                    self.symbol_bit[(user, symbol)] = len(self.symbol_bit)
        self.base = len(self.symbol_bit)
        self.gadgets = gadgets
        self.helper = [0, 0]
        for (user, _), bit in self.symbol_bit.items():
            self.helper[user] |= 1 << bit
        self.tops = [0, 0]
        self.bottoms = [0, 0]
        for g in range(gadgets):
            self.tops[0] |= 1 << self.var(g, "A")
            self.bottoms[0] |= 1 << self.var(g, "a")
            self.tops[1] |= 1 << self.var(g, "B")
            self.bottoms[1] |= 1 << self.var(g, "b")

    def var(self, gadget: int, name: str) -> int:
        return self.base + 4 * gadget + "AaBb".index(name)

    def transmit(self, deliveries: Sequence[Delivery]) -> List[List[int]]:
        levels = [[0] * self.q, [0] * self.q]
        for (user, symbol), bit in self.symbol_bit.items():
            for level, used in enumerate(self.layout.users[user]):
                if used == symbol:
                    levels[user][level] ^= 1 << bit
        for d in deliveries:
            g = d.gadget
            # RX_0 heard (A, a^B), RX_1 heard (B, b^A)
            heard_top = (1 << self.var(g, "A"), 1 << self.var(g, "B"))
            heard_bottom = (
                1 << self.var(g, "a") | 1 << self.var(g, "B"),
                1 << self.var(g, "b") | 1 << self.var(g, "A"),
            )
            for level in range(self.q):
                if d.relay >> level & 1:
                    levels[1 - d.side][level] ^= heard_bottom[1 - d.side]
                if d.guard >> level & 1:
                    levels[d.side][level] ^= heard_top[d.side]
        return levels

    def received(self, levels: List[List[int]], user: int) -> List[int]:
        n, m, q = self.n, self.m, self.q
        out = [0] * q
        for level in range(n):
            out[level + q - n] ^= levels[user][level]
        for level in range(m):
            out[level + q - m] ^= levels[1 - user][level]
        return out

    def fits(self, deliveries: Sequence[Delivery]) -> bool:
        levels = self.transmit(deliveries)
        junk = self.helper[0] | self.helper[1]
        for user in (0, 1):
            known = self.tops[user] | self.bottoms[user]
            rows = [row & ~known for row in self.received(levels, user)]
            full, relayed = GF2Basis(), GF2Basis()
            for row in rows:
                full.add(row, 0)
                relayed.add(row & ~(junk | self.tops[1 - user]), 0)
            for (owner, _), bit in self.symbol_bit.items():
                if owner == user and not full.contains(1 << bit):
                    return False
            for d in deliveries:
                if d.side == user and not relayed.contains(1 << self.var(d.gadget, "ab"[1 - user])):
                    return False
        return True


@lru_cache(maxsize=None)
def _masks(q: int, empty: bool) -> Tuple[int, ...]:
    out = [0] if empty else []
    for size in range(1, min(q, MAX_MASK_LEVELS) + 1):
        out += [level_mask(levels) for levels in combinations(range(q), size)]
    return tuple(out)


@lru_cache(maxsize=None)
def serve_slot(n: int, m: int, variant: int, muted: FrozenSet[Tuple[int, int]],
               sides: Tuple[Sides, ...]) -> Optional[Tuple[Delivery, ...]]:
    """Level masks serving every (gadget, side) of one helper slot, or None"""
    slot = _Slot(n, m, variant, muted, len(sides))
    wanted = [(g, side) for g, served in enumerate(sides) for side in served]
    candidates = sorted(
        ((relay, guard) for relay in _masks(slot.q, False) for guard in _masks(slot.q, True)),
        key=lambda pair: (bin(pair[0]).count("1") + bin(pair[1]).count("1"), pair),
    )
    budget = [SEARCH_BUDGET]

    def place(chosen: List[Delivery]) -> Optional[List[Delivery]]:
        if len(chosen) == len(wanted):
            return chosen
        g, side = wanted[len(chosen)]
        for relay, guard in candidates:
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            trial = chosen + [Delivery(g, side, relay, guard)]
            if slot.fits(trial):
                found = place(trial)
                if found is not None:
                    return found
        return None

    for user in (0, 1):
        served = sum(1 for _, side in wanted if side == user)
        own = sum(1 for owner, _ in slot.symbol_bit if owner == user)
        if served + own > slot.q:
            return None
    if not slot.fits([]):
        return None
    found = place([])
    return tuple(found) if found is not None else None


def _symbols(n: int, m: int, variant: int) -> List[Tuple[int, int]]:
    layout = code_layout(n, m, variant)
    return [(user, symbol) for user in (0, 1) for symbol in range(layout.symbols(user))]


def _splits(total: int, even_cap: int, odd_cap: int) -> List[Tuple[int, int]]:
    out = [(e, total - e) for e in range(total + 1) if e <= even_cap and total - e <= odd_cap]
    return sorted(out, key=lambda split: (abs(split[0] - split[1]), -split[0]))


def _counts(sides: Tuple[Sides, ...]) -> Tuple[int, int, int]:
    return (
        sum(1 for s in sides if s == (0, 1)),
        sum(1 for s in sides if s == (0,)),
        sum(1 for s in sides if s == (1,)),
    )


@lru_cache(maxsize=None)
def aligned_plan(n: int, m: int, gains: int) -> AlignedPlan:
    """
    Cheapest periodic plan that serves `gains` (2,1) gadgets per two slots on helper (n, m).
    Up to 2m - c_no gadgets ride for free; each further one silences one helper symbol per slot.
    """
    if gains < 1:
        raise InfeasibleSchemeError("aligned feedback needs at least one gain factor", inequality="i >= 1")
    free = 2 * m - c_no(n, m)
    muted_total = 2 * max(0, gains - free)
    symbols = [_symbols(n, m, 0), _symbols(n, m, 1)]
    if muted_total > len(symbols[0]) + len(symbols[1]):
        raise InfeasibleSchemeError(
            f"{gains} aligned gadgets exceed helper ({n},{m})",
            inequality=f"i <= {2 * m}",
        )
    # a slot that cannot serve some gadget mix cannot serve any larger mix either
    refused = {}
    for even_count, odd_count in _splits(muted_total, len(symbols[0]), len(symbols[1])):
        for even_muted in combinations(symbols[0], even_count):
            for odd_muted in combinations(symbols[1], odd_count):
                muted = (frozenset(even_muted), frozenset(odd_muted))
                for offsets in combinations_with_replacement(OFFSETS, gains):
                    plans = []
                    for parity in (0, 1):
                        sides = tuple(s for _, _, s in slot_gadgets(offsets, parity))
                        counts = _counts(sides)
                        seen = refused.setdefault((parity, muted[parity]), [])
                        if any(all(c >= r for c, r in zip(counts, bad)) for bad in seen):
                            break
                        deliveries = serve_slot(n, m, parity, muted[parity], sides)
                        if deliveries is None:
                            seen.append(counts)
                            break
                        plans.append(SlotPlan(parity, muted[parity], sides, deliveries))
                    else:
                        logger.debug("aligned plan on (%d,%d) for %d gains: offsets %s", n, m, gains, offsets)
                        return AlignedPlan((n, m), gains, tuple(offsets), (plans[0], plans[1]))
    raise InfeasibleSchemeError(
        f"no aligned plan serves {gains} gadgets on helper ({n},{m})",
        inequality=f"i <= 2m - c_no + muted/2 on ({n},{m})",
    )
