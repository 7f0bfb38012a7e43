"""
Planner for region vertices
Pairs forward and backward subchannels into feedback bundles whose claimed rates hit the target
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from ..capacity.formulas import c_no, region
from ..capacity.polytope import RatePair
from ..channel.core import BWD, FWD, ChannelParams
from ..errors import InfeasibleSchemeError, InvalidTargetError, LabError, UnsupportedPlanError
from ..schemes.catalogue import (
    DEFAULT_L, SchemeEntry, SchemeKind, compile_entry, entry_claim, entry_rate, validate_entry,
)
from ..schemes.codes import code_layout
from ..schemes.gadgets import G01, G21, relay_schedule
from .network import direction_factors

logger = logging.getLogger(__name__)

Factor = Tuple[int, int]


@dataclass
class SchemePlan:
    """Entries run side by side on orthogonal subchannels to reach one vertex"""
    params: ChannelParams
    target: RatePair
    entries: List[SchemeEntry]
    planning_log: List[Dict[str, Any]] = field(default_factory=list)

    def claimed_rate(self) -> RatePair:
        total = RatePair.zero()
        for entry in self.entries:
            total = total + entry_claim(entry)
        return total

    def block_rate(self) -> RatePair:
        """Exact rate with every entry at its own finite block length"""
        total = RatePair.zero()
        for entry in self.entries:
            total = total + entry_rate(entry)
        return total

    def factor_counts(self, direction: str) -> Counter:
        counts: Counter = Counter()
        for entry in self.entries:
            counts.update(entry.fwd_factors if direction == FWD else entry.bwd_factors)
        return counts

    def describe(self) -> List[str]:
        return [entry.describe() for entry in self.entries]


MAX_BUNDLE = 6
SEARCH_NODES = 200000


@dataclass(frozen=True)
class Bundle:
    """Gain factors of one direction fed back through one helper factor of the other"""
    kind: str   # S2, HOST, CROSS, RESOLVED, ALIGNED, SUB or G01
    gain: str
    helper: Factor
    count: int

    @property
    def gain_factor(self) -> Factor:
        return (0, 1) if self.kind == "G01" else (2, 1)

    def helper_delta(self) -> Fraction:
        """Change of the helper direction's rate against its nonfeedback code"""
        if self.kind == "S2":
            return Fraction(1)
        if self.kind == "CROSS":
            return Fraction(-c_no(*self.helper))
        if self.kind == "ALIGNED":
            return Fraction(-max(0, self.count - aligned_room(self.helper)))
        if self.kind == "SUB":
            return Fraction(-self.count)
        if self.kind == "G01":
            return -Fraction(_relay_cost(G01, self.count, self.helper), 2)
        return Fraction(0)

    def delta(self) -> Tuple[Fraction, Fraction]:
        """(forward, backward) change against the nonfeedback baseline"""
        gained, kept = Fraction(self.count), self.helper_delta()
        return (gained, kept) if self.gain == FWD else (kept, gained)


def aligned_room(helper: Factor) -> int:
    n, m = helper
    return 2 * m - c_no(n, m)


def _aligned_host(helper: Factor) -> bool:
    n, m = helper
    return helper == (1, 2) or (3 * m > 2 * n and m < 2 * n and n != m)


@lru_cache(maxsize=None)
def _relay_cost(gadget: str, count: int, helper: Factor) -> Optional[int]:
    holes = gadget == G01
    try:
        return relay_schedule(gadget, count, [helper], holes=holes, subs=True).cost_per_two_slots
    except InfeasibleSchemeError:
        return None


@lru_cache(maxsize=None)
def bundle_options(gain: str, helper: Factor) -> Tuple[Bundle, ...]:
    """Ways one helper factor can carry feedback for gains in the other direction, simplest first"""
    out: List[Bundle] = []
    if helper == (0, 1):
        out.append(Bundle("S2", gain, helper, 1))
    if helper == (1, 2):
        out += [Bundle("HOST", gain, helper, k) for k in (1, 2)]
    if helper in ((0, 1), (1, 1)):
        out += [Bundle("CROSS", gain, helper, k) for k in (1, 2)]
    if helper == (1, 1):
        out.append(Bundle("RESOLVED", gain, helper, 1))
    if code_layout(*helper).rate:
        out += [Bundle("G01", gain, helper, k) for k in range(1, MAX_BUNDLE + 1) if _relay_cost(G01, k, helper) is not None]
    if _aligned_host(helper):
        top = aligned_room(helper) + code_layout(*helper).rate
        out += [Bundle("ALIGNED", gain, helper, k) for k in range(1, min(top, MAX_BUNDLE) + 1)]
    if code_layout(*helper).rate:
        out += [Bundle("SUB", gain, helper, k) for k in range(1, MAX_BUNDLE + 1) if _relay_cost(G21, k, helper) is not None]
    return tuple(out)


class SchemePlanner:
    """Vertex planner: searches bundle assignments and compiles every candidate before accepting it"""

    def __init__(self, L: int = DEFAULT_L):
        self.L = L
        self.planning_log: List[Dict[str, Any]] = []

    def plan(self, p: ChannelParams, target: RatePair) -> SchemePlan:
        spec = region(p)
        if not spec.is_vertex(target):
            raise InvalidTargetError(
                f"{target} is not a vertex of the capacity region of {p}; "
                f"vertices are {', '.join(str(v) for v in spec.vertices)}"
            )
        fwd = list(direction_factors(p.n, p.m))
        bwd = list(direction_factors(p.n_b, p.m_b))
        self.planning_log = []

        if target.r_fwd == 0 and target.r_bwd == 0:
            entries = []
            if fwd or bwd:
                entries.append(self._entry(SchemeKind.NONFEEDBACK, fwd, bwd).with_params(mute=(BWD, FWD)))
            return SchemePlan(p, target, entries, self.planning_log)

        for swapped in (False, True):
            forward, backward = (bwd, fwd) if swapped else (fwd, bwd)
            goal = target.swapped() if swapped else target
            for bundles, entries in self._candidates(forward, backward, goal):
                if swapped:
                    entries = [entry.mirrored() for entry in entries]
                plan = SchemePlan(p, target, entries, self.planning_log)
                claimed = plan.claimed_rate()
                if claimed != target:
                    self._log("candidate_rejected", f"swapped={swapped} {_summary(bundles)}: claims {claimed}, target {target}")
                    continue
                if self._verify(entries):
                    self._log("plan_accepted", "; ".join(plan.describe()))
                    return plan

        raise UnsupportedPlanError(f"no verified construction reaches {target} on {p}")

    def _log(self, action: str, details: str) -> None:
        logger.info("%s: %s", action, details)
        self.planning_log.append({"stage": "planning", "action": action, "details": details})

    def _entry(self, kind: SchemeKind, fwd: Sequence[Factor], bwd: Sequence[Factor],
               gain: str = FWD, **params: Any) -> SchemeEntry:
        entry = SchemeEntry(kind, tuple(fwd), tuple(bwd)).with_params(L=self.L, mute=(), **params)
        if kind is not SchemeKind.NONFEEDBACK:
            entry = entry.with_params(gain=gain)
        validate_entry(entry)
        return entry

    def _verify(self, entries: Sequence[SchemeEntry]) -> bool:
        for entry in entries:
            try:
                compile_entry(entry)
            except LabError as exc:
                self._log("verification_failed", f"{entry.describe()}: {exc}")
                return False
        return True

    def _candidates(self, fwd: List[Factor], bwd: List[Factor],
                    goal: RatePair) -> Iterator[Tuple[List[Bundle], List[SchemeEntry]]]:
        if goal.r_fwd == 0:
            return
        mute = goal.r_bwd == 0
        need = (
            goal.r_fwd - sum(c_no(*f) for f in fwd),
            goal.r_bwd - sum(c_no(*f) for f in bwd),
        )
        for bundles in _assignments(fwd, bwd, need, mute):
            try:
                entries = self._entries(bundles, fwd, bwd)
            except InfeasibleSchemeError as exc:
                self._log("candidate_rejected", f"{_summary(bundles)}: {exc}")
                continue
            if mute:
                entries = [entry.with_params(mute=(BWD,)) for entry in entries]
            yield bundles, entries

    def _entries(self, bundles: Sequence[Bundle], fwd: List[Factor], bwd: List[Factor]) -> List[SchemeEntry]:
        """One entry per bundle family and direction; unused factors run their nonfeedback codes"""
        left = {FWD: list(fwd), BWD: list(bwd)}
        entries: List[SchemeEntry] = []

        def take(direction: str, factors: Sequence[Factor]) -> List[Factor]:
            for factor in factors:
                left[direction].remove(factor)
            return list(factors)

        def add(kind: Optional[SchemeKind], gain: str, group: Sequence[Bundle], **params: Any) -> None:
            helper_dir = BWD if gain == FWD else FWD
            gains = take(gain, [b.gain_factor for b in group for _ in range(b.count)])
            helpers = take(helper_dir, [b.helper for b in group])
            if kind is None:
                entries.append(self._relay_entry(gains, helpers, gain))
                return
            fwd_f, bwd_f = (gains, helpers) if gain == FWD else (helpers, gains)
            entries.append(self._entry(kind, fwd_f, bwd_f, gain=gain, **params))

        for gain in (FWD, BWD):
            mine = [b for b in bundles if b.gain == gain]
            groups: Dict[str, List[Bundle]] = {}
            for b in mine:
                groups.setdefault(b.kind, []).append(b)
            if "S2" in groups:
                add(SchemeKind.SCHEME2, gain, groups["S2"])
            if "HOST" in groups:
                group = groups["HOST"]
                single = len(group) == 1 and group[0].count == 1
                add(SchemeKind.SCHEME1 if single else SchemeKind.LEMMA4_II, gain, group)
            if "CROSS" in groups:
                group = groups["CROSS"]
                single = len(group) == 1 and group[0].count == 1
                add(SchemeKind.PERFECT_FEEDBACK_21 if single else SchemeKind.LEMMA4_V, gain, group)
            if "RESOLVED" in groups:
                add(SchemeKind.RESOLVED_RELAY, gain, groups["RESOLVED"])
            for b in groups.get("ALIGNED", []):
                add(SchemeKind.ALIGNED_RELAY, gain, [b])
            if "SUB" in groups:
                group = groups["SUB"]
                shapes = {b.helper for b in group}
                if shapes <= {(1, 0), (2, 1)}:
                    add(SchemeKind.LEMMA3_II, gain, group)
                elif shapes <= {(2, 1), (3, 2)}:
                    add(SchemeKind.LEMMA3_III, gain, group)
                else:
                    add(SchemeKind.RELAY_SACRIFICE, gain, group, levels=sum(b.count for b in group))
            if "G01" in groups:
                add(None, gain, groups["G01"])

        if left[FWD] or left[BWD]:
            entries.append(self._entry(SchemeKind.NONFEEDBACK, left[FWD], left[BWD]))
        return entries

    def _relay_entry(self, gain_factors: List[Factor], helpers: List[Factor], gain: str) -> SchemeEntry:
        shapes = set(helpers)
        schedule = relay_schedule(G01, len(gain_factors), helpers, holes=True, subs=True)
        fwd, bwd = (gain_factors, helpers) if gain == FWD else (helpers, gain_factors)
        if schedule.cost_per_two_slots == 0 and shapes == {(3, 2)}:
            kind = SchemeKind.LEMMA4_III
        elif schedule.cost_per_two_slots == 0 and shapes == {(2, 1)}:
            kind = SchemeKind.LEMMA4_IV
        elif shapes == {(1, 2)}:
            kind = SchemeKind.LEMMA3_I
        else:
            kind = SchemeKind.HOLE_RELAY
        return self._entry(kind, fwd, bwd, gain=gain)


def _summary(bundles: Sequence[Bundle]) -> str:
    return ", ".join(f"{b.kind}{b.helper}x{b.count}/{b.gain}" for b in bundles) or "no bundles"


def _assignments(fwd: List[Factor], bwd: List[Factor], need: Tuple[Fraction, Fraction],
                 mute: bool) -> Iterator[List[Bundle]]:
    """
    Bundle choices, one or none per helper factor, whose deltas add up to need.
    With the backward direction muted only forward gains count and the backward delta is free.
    """
    counts = {FWD: Counter(fwd), BWD: Counter(bwd)}
    slots: List[Tuple[str, Factor]] = [(BWD, f) for f in sorted(bwd)]
    if not mute:
        slots += [(FWD, f) for f in sorted(fwd)]
    options = [
        (None,) + bundle_options(FWD if direction == BWD else BWD, factor)
        for direction, factor in slots
    ]

    def delta(option: Optional[Bundle]) -> Tuple[Fraction, Fraction]:
        return (Fraction(0), Fraction(0)) if option is None else option.delta()

    # reachable range of each coordinate from every position on
    reach = [[(Fraction(0), Fraction(0))] * 2 for _ in range(len(slots) + 1)]
    for pos in range(len(slots) - 1, -1, -1):
        for axis in (0, 1):
            values = [delta(o)[axis] for o in options[pos]]
            low, high = reach[pos + 1][axis]
            reach[pos][axis] = (low + min(values), high + max(values))

    used: Dict[Tuple[str, Factor], int] = Counter()
    chosen: List[Optional[Bundle]] = []
    picks: List[int] = []
    nodes = [0]

    def fits(pos: int, total: Tuple[Fraction, Fraction]) -> bool:
        for axis in (0, 1):
            if axis == 1 and mute:
                continue
            low, high = reach[pos][axis]
            if not total[axis] + low <= need[axis] <= total[axis] + high:
                return False
        return True

    def walk(pos: int, total: Tuple[Fraction, Fraction]) -> Iterator[List[Bundle]]:
        nodes[0] += 1
        if nodes[0] > SEARCH_NODES or not fits(pos, total):
            return
        if pos == len(slots):
            yield [b for b in chosen if b is not None]
            return
        direction, factor = slots[pos]
        same = pos > 0 and slots[pos - 1] == slots[pos]
        for index, option in enumerate(options[pos]):
            if same and index < picks[-1]:
                continue
            claims: List[Tuple[Tuple[str, Factor], int]] = []
            if option is not None:
                claims = [((direction, factor), 1), ((option.gain, option.gain_factor), option.count)]
            if any(used[key] + n > counts[key[0]][key[1]] for key, n in _merged(claims)):
                continue
            for key, n in claims:
                used[key] += n
            chosen.append(option)
            picks.append(index)
            step = delta(option)
            yield from walk(pos + 1, (total[0] + step[0], total[1] + step[1]))
            picks.pop()
            chosen.pop()
            for key, n in claims:
                used[key] -= n

    yield from walk(0, (Fraction(0), Fraction(0)))
    logger.debug("bundle search visited %d nodes", nodes[0])


def _merged(claims: Sequence[Tuple[Tuple[str, Factor], int]]) -> List[Tuple[Tuple[str, Factor], int]]:
    out: Counter = Counter()
    for key, n in claims:
        out[key] += n
    return list(out.items())


def plan_scheme(p: ChannelParams, target: RatePair, L: int = DEFAULT_L) -> SchemePlan:
    """Plan a region vertex; raises InvalidTargetError or UnsupportedPlanError"""
    return SchemePlanner(L).plan(p, target)
