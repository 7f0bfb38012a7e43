"""
Scheme catalogue
Maps every scheme kind to its factor shapes, feasibility checks, builder and claimed rate
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..capacity.formulas import c_no
from ..capacity.polytope import RatePair
from ..channel.core import BWD, FWD, Node
from ..errors import InfeasibleSchemeError, InvalidArgumentError, UnsupportedPlanError
from .alignment import aligned_plan
from .codes import code_layout
from .engine import BlockSpec, CompiledScheme, LinearScheme, NodePolicy, compile_scheme
from .gadgets import (
    G01, G21, Roles, build_aligned, build_cross, build_hosted, build_nonfeedback, build_relay,
    build_resolved, build_retrospective, relay_schedule, variants,
)

logger = logging.getLogger(__name__)

Factor = Tuple[int, int]

DEFAULT_L = 32


class SchemeKind(Enum):
    NONFEEDBACK = "NONFEEDBACK"
    PERFECT_FEEDBACK_21 = "PERFECT_FEEDBACK_21"
    SCHEME1 = "SCHEME1"
    SCHEME2 = "SCHEME2"
    LEMMA3_I = "LEMMA3_I"
    LEMMA3_II = "LEMMA3_II"
    LEMMA3_III = "LEMMA3_III"
    LEMMA4_I = "LEMMA4_I"
    LEMMA4_II = "LEMMA4_II"
    LEMMA4_III = "LEMMA4_III"
    LEMMA4_IV = "LEMMA4_IV"
    LEMMA4_V = "LEMMA4_V"
    RELAY_SACRIFICE = "RELAY_SACRIFICE"
    HOLE_RELAY = "HOLE_RELAY"
    ALIGNED_RELAY = "ALIGNED_RELAY"
    RESOLVED_RELAY = "RESOLVED_RELAY"


# kind -> (gadget, holes allowed, substitutions allowed)
RELAY_KINDS = {
    SchemeKind.LEMMA3_I: (G01, False, True),
    SchemeKind.LEMMA3_II: (G21, False, True),
    SchemeKind.LEMMA3_III: (G21, False, True),
    SchemeKind.LEMMA4_III: (G01, True, False),
    SchemeKind.LEMMA4_IV: (G01, True, False),
    SchemeKind.RELAY_SACRIFICE: (None, False, True),
    SchemeKind.HOLE_RELAY: (G01, True, True),
}
HOSTED_KINDS = (SchemeKind.SCHEME1, SchemeKind.LEMMA4_II)
CROSS_KINDS = (SchemeKind.PERFECT_FEEDBACK_21, SchemeKind.LEMMA4_V)
RETROSPECTIVE_KINDS = (SchemeKind.SCHEME2, SchemeKind.LEMMA4_I)

_DEFAULT_GAIN = {SchemeKind.LEMMA4_III: BWD, SchemeKind.LEMMA4_IV: BWD}
_DEFAULT_COUNTS = {
    SchemeKind.LEMMA4_IV: {"i": 1, "j": 2},
    SchemeKind.LEMMA4_V: {"i": 2, "j": 1},
    SchemeKind.LEMMA3_II: {"i": 2, "j": 1, "k": 1},
    SchemeKind.LEMMA3_III: {"i": 2, "j": 1, "k": 1},
}


@dataclass(frozen=True)
class SchemeEntry:
    """One scheme placed on explicit forward and backward factor lists"""
    kind: SchemeKind
    fwd_factors: Tuple[Factor, ...]
    bwd_factors: Tuple[Factor, ...]
    params: Tuple[Tuple[str, Any], ...] = ()

    def param(self, key: str, default: Any = None) -> Any:
        return dict(self.params).get(key, default)

    def with_params(self, **changes: Any) -> "SchemeEntry":
        merged = dict(self.params)
        merged.update(changes)
        return replace(self, params=tuple(sorted(merged.items())))

    @property
    def gain(self) -> str:
        return self.param("gain", _DEFAULT_GAIN.get(self.kind, FWD))

    @property
    def mute(self) -> Tuple[str, ...]:
        return tuple(self.param("mute", ()))

    @property
    def L(self) -> int:
        return int(self.param("L", DEFAULT_L))

    def roles(self) -> Roles:
        return Roles(self.gain)

    def role_factors(self) -> Tuple[Tuple[Factor, ...], Tuple[Factor, ...]]:
        """(gain factors, helper factors)"""
        if self.gain == FWD:
            return self.fwd_factors, self.bwd_factors
        return self.bwd_factors, self.fwd_factors

    def mirrored(self) -> "SchemeEntry":
        """The same scheme with the roles of the two directions exchanged"""
        flip = {FWD: BWD, BWD: FWD}
        changes: Dict[str, Any] = {"mute": tuple(sorted(flip[d] for d in self.mute))}
        if self.kind is not SchemeKind.NONFEEDBACK:
            changes["gain"] = flip[self.gain]
        return replace(self, fwd_factors=self.bwd_factors, bwd_factors=self.fwd_factors).with_params(**changes)

    def describe(self) -> str:
        def fmt(factors: Sequence[Factor]) -> str:
            counts = Counter(factors)
            return " x ".join(f"({n},{m})^{c}" if c > 1 else f"({n},{m})" for (n, m), c in sorted(counts.items())) or "-"
        extra = ", ".join(f"{k}={v}" for k, v in self.params if k not in ("L",))
        return f"{self.kind.value} fwd={fmt(self.fwd_factors)} bwd={fmt(self.bwd_factors)}" + (f" [{extra}]" if extra else "")


def _factor_list(value: Any) -> Tuple[Factor, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        out = []
        for chunk in value.replace(" ", "").split(";"):
            if not chunk:
                continue
            n, m = chunk.strip("()").split(",")
            out.append((int(n), int(m)))
        return tuple(out)
    return tuple((int(n), int(m)) for n, m in value)


def _count(params: Mapping[str, Any], kind: SchemeKind, key: str, default: int) -> int:
    value = params.get(key, _DEFAULT_COUNTS.get(kind, {}).get(key, default))
    try:
        value = int(value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"parameter {key} must be an integer, got {value!r}") from exc
    if value < 0:
        raise InvalidArgumentError(f"parameter {key} must be nonnegative, got {value}")
    return value


def _role_shapes(kind: SchemeKind, params: Mapping[str, Any]) -> Tuple[List[Factor], List[Factor]]:
    i = _count(params, kind, "i", 1)
    j = _count(params, kind, "j", 1)
    k = _count(params, kind, "k", 0)
    pairs = _count(params, kind, "pairs", 1)
    shapes = {
        SchemeKind.PERFECT_FEEDBACK_21: ([(2, 1)], [(0, 1)]),
        SchemeKind.SCHEME1: ([(2, 1)], [(1, 2)]),
        SchemeKind.SCHEME2: ([(2, 1)] * pairs, [(0, 1)] * pairs),
        SchemeKind.LEMMA4_I: ([(2, 1)] * pairs, [(0, 1)] * pairs),
        SchemeKind.LEMMA3_I: ([(0, 1)] * i, [(1, 2)] * j),
        SchemeKind.LEMMA3_II: ([(2, 1)] * i, [(1, 0)] * j + [(2, 1)] * k),
        SchemeKind.LEMMA3_III: ([(2, 1)] * i, [(2, 1)] * j + [(3, 2)] * k),
        SchemeKind.LEMMA4_II: ([(2, 1)] * i, [(1, 2)] * j),
        SchemeKind.LEMMA4_III: ([(0, 1)] * j, [(3, 2)] * i),
        SchemeKind.LEMMA4_IV: ([(0, 1)] * j, [(2, 1)] * i),
        SchemeKind.LEMMA4_V: ([(2, 1)] * i, [(0, 1)] * j),
        SchemeKind.ALIGNED_RELAY: ([(2, 1)] * i, [(2, 3)]),
        SchemeKind.RESOLVED_RELAY: ([(2, 1)] * i, [(1, 1)] * i),
    }
    return shapes[kind]


def entry_for(kind: SchemeKind, params: Optional[Mapping[str, Any]] = None) -> SchemeEntry:
    """Build the entry a parameter map describes; explicit fwd/bwd lists override the kind's shape"""
    params = dict(params or {})
    gain = params.pop("gain", _DEFAULT_GAIN.get(kind, FWD))
    if gain not in (FWD, BWD):
        raise InvalidArgumentError(f"gain must be fwd or bwd, got {gain!r}")
    mute = params.pop("mute", ())
    if isinstance(mute, str):
        mute = tuple(d for d in mute.split(",") if d)
    if any(d not in (FWD, BWD) for d in mute):
        raise InvalidArgumentError(f"mute must name fwd and/or bwd, got {mute!r}")
    L = _count(params, kind, "L", DEFAULT_L)
    if kind in RETROSPECTIVE_KINDS and L < 1:
        raise InfeasibleSchemeError(f"{kind.value} needs at least one stage-I slot", inequality="L >= 1")

    if "fwd" in params or "bwd" in params or kind in (SchemeKind.NONFEEDBACK, SchemeKind.RELAY_SACRIFICE, SchemeKind.HOLE_RELAY):
        fwd = _factor_list(params.get("fwd", ((2, 1),) if kind is SchemeKind.NONFEEDBACK else None))
        bwd = _factor_list(params.get("bwd", ((0, 1),) if kind is SchemeKind.NONFEEDBACK else None))
    else:
        gain_factors, helper_factors = _role_shapes(kind, params)
        fwd, bwd = (tuple(x) for x in Roles(gain).factors(gain_factors, helper_factors))

    extras = {"L": L, "mute": tuple(sorted(set(mute)))}
    if kind is not SchemeKind.NONFEEDBACK:
        extras["gain"] = gain
    if "levels" in params:
        extras["levels"] = _count(params, kind, "levels", 0)
    entry = SchemeEntry(kind, fwd, bwd).with_params(**extras)
    validate_entry(entry)
    return entry


def _only(factors: Sequence[Factor], allowed: Iterable[Factor], kind: SchemeKind, side: str) -> None:
    allowed = set(allowed)
    stray = [f for f in factors if f not in allowed]
    if stray:
        raise InfeasibleSchemeError(
            f"{kind.value} cannot run on {side} factor {stray[0]}; expected one of {sorted(allowed)}",
            inequality=f"{side} factors in {sorted(allowed)}",
        )


def _require(ok: bool, kind: SchemeKind, inequality: str, detail: str) -> None:
    if not ok:
        raise InfeasibleSchemeError(f"{kind.value} infeasible: {detail} violates {inequality}", inequality=inequality)


def validate_entry(entry: SchemeEntry) -> None:
    """Raise InfeasibleSchemeError when the factor lists do not fit the kind"""
    kind = entry.kind
    gain, helper = entry.role_factors()
    counts = Counter(helper)
    i = len(gain)
    if kind is SchemeKind.NONFEEDBACK:
        for factor in entry.fwd_factors + entry.bwd_factors:
            code_layout(*factor)
        return
    if kind is SchemeKind.PERFECT_FEEDBACK_21:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(0, 1), (1, 1)], kind, "helper")
        _require(i == 1 and len(helper) == 1, kind, "one (2,1) with one (0,1) or (1,1)", f"{i} gain / {len(helper)} helper factors")
    elif kind is SchemeKind.SCHEME1:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(1, 2)], kind, "helper")
        _require(i == 1 and len(helper) == 1, kind, "one (2,1) with one (1,2)", f"{i} gain / {len(helper)} helper factors")
    elif kind in RETROSPECTIVE_KINDS:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(0, 1)], kind, "helper")
        _require(i == len(helper) and i >= 1, kind, "pairs >= 1", f"{i} gain / {len(helper)} helper factors")
        _require(entry.L >= 1, kind, "L >= 1", f"L={entry.L}")
    elif kind is SchemeKind.LEMMA3_I:
        _only(gain, [(0, 1)], kind, "gain")
        _only(helper, [(1, 2)], kind, "helper")
        _require(i <= 2 * counts[(1, 2)], kind, "i <= 2j", f"i={i}, j={counts[(1, 2)]}")
    elif kind is SchemeKind.LEMMA3_II:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(1, 0), (2, 1)], kind, "helper")
        j, k = counts[(1, 0)], counts[(2, 1)]
        _require(i <= 2 * j + 2 * k, kind, "i <= 2j + 2k", f"i={i}, j={j}, k={k}")
    elif kind is SchemeKind.LEMMA3_III:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(2, 1), (3, 2)], kind, "helper")
        j, k = counts[(2, 1)], counts[(3, 2)]
        _require(i <= 2 * j + 4 * k, kind, "i <= 2j + 4k", f"i={i}, j={j}, k={k}")
    elif kind is SchemeKind.LEMMA4_II:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(1, 2)], kind, "helper")
        _require(i <= 2 * len(helper), kind, "i <= 2j", f"i={i}, j={len(helper)}")
    elif kind is SchemeKind.LEMMA4_III:
        _only(gain, [(0, 1)], kind, "gain")
        _only(helper, [(3, 2)], kind, "helper")
        _require(i <= 2 * len(helper), kind, "j <= 2i", f"i={len(helper)}, j={i}")
    elif kind is SchemeKind.LEMMA4_IV:
        _only(gain, [(0, 1)], kind, "gain")
        _only(helper, [(2, 1)], kind, "helper")
        _require(i <= 2 * len(helper), kind, "j <= 2i", f"i={len(helper)}, j={i}")
    elif kind is SchemeKind.LEMMA4_V:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(0, 1), (1, 1)], kind, "helper")
        _require(i <= 2 * len(helper), kind, "i <= 2j", f"i={i}, j={len(helper)}")
    elif kind is SchemeKind.ALIGNED_RELAY:
        _only(gain, [(2, 1)], kind, "gain")
        _require(i >= 1 and len(helper) == 1, kind, "i >= 1 with one helper factor", f"{i} gain / {len(helper)} helper factors")
        try:
            aligned_plan(*helper[0], i)
        except UnsupportedPlanError as exc:
            raise InfeasibleSchemeError(f"{kind.value} needs a whole helper code: {exc}", inequality="helper has a code") from exc
    elif kind is SchemeKind.RESOLVED_RELAY:
        _only(gain, [(2, 1)], kind, "gain")
        _only(helper, [(1, 1)], kind, "helper")
        _require(i >= 1 and i == len(helper), kind, "i == j >= 1", f"i={i}, j={len(helper)}")
    elif kind in (SchemeKind.RELAY_SACRIFICE, SchemeKind.HOLE_RELAY):
        allowed = [(0, 1)] if kind is SchemeKind.HOLE_RELAY else [(0, 1), (2, 1)]
        _only(gain, allowed, kind, "gain")
        _require(len(set(gain)) <= 1, kind, "one gain factor shape", f"gain factors {list(gain)}")
        levels = entry.param("levels")
        _require(levels is None or levels == i, kind, "levels == gain factors", f"levels={levels}, factors={i}")
        for factor in helper:
            code_layout(*factor)

    if kind in RELAY_KINDS:
        relay_schedule(*_relay_setup(entry))


def _relay_setup(entry: SchemeEntry):
    gadget, holes, subs = RELAY_KINDS[entry.kind]
    gain, helper = entry.role_factors()
    if gadget is None:
        gadget = G21 if gain and gain[0] == (2, 1) else G01
    return gadget, len(gain), list(helper), holes, subs


@lru_cache(maxsize=4096)
def build_entry(entry: SchemeEntry) -> LinearScheme:
    """Symbolic scheme for an entry; cached since entries are immutable"""
    kind = entry.kind
    name = kind.value
    gain, helper = entry.role_factors()
    if kind is SchemeKind.NONFEEDBACK:
        return build_nonfeedback(name, entry.fwd_factors, entry.bwd_factors, entry.mute)
    if kind in RELAY_KINDS:
        gadget, count, helpers, holes, subs = _relay_setup(entry)
        schedule = relay_schedule(gadget, count, helpers, holes, subs)
        return build_relay(name, entry.gain, gain, helpers, schedule, entry.L, entry.mute, holes, subs)
    if kind in HOSTED_KINDS:
        return build_hosted(name, entry.gain, len(gain), len(helper), entry.L, entry.mute)
    if kind in CROSS_KINDS:
        return build_cross(name, entry.gain, len(gain), helper, entry.L, entry.mute)
    if kind is SchemeKind.ALIGNED_RELAY:
        plan = aligned_plan(*helper[0], len(gain))
        return build_aligned(name, entry.gain, len(gain), helper[0], plan, entry.L, entry.mute)
    if kind is SchemeKind.RESOLVED_RELAY:
        return build_resolved(name, entry.gain, len(gain), entry.L, entry.mute)
    return build_retrospective(name, entry.gain, len(gain), entry.L, entry.mute)


@lru_cache(maxsize=4096)
def compile_entry(entry: SchemeEntry) -> CompiledScheme:
    compiled = compile_scheme(build_entry(entry))
    logger.info("compiled %s over %d slots", entry.describe(), compiled.slots)
    return compiled


def entry_rate(entry: SchemeEntry) -> RatePair:
    """Exact per-slot rate of one block"""
    scheme = build_entry(entry)
    return RatePair.of(Fraction(scheme.bits(FWD), scheme.slots), Fraction(scheme.bits(BWD), scheme.slots))


def entry_claim(entry: SchemeEntry) -> RatePair:
    """Claimed asymptotic rate: the block rate once windowing overhead vanishes"""
    kind = entry.kind
    gain, helper = entry.role_factors()
    if kind is SchemeKind.NONFEEDBACK:
        fwd = sum(code_layout(*f, v).rate for f, v in zip(entry.fwd_factors, variants(entry.fwd_factors)))
        bwd = sum(code_layout(*f, v).rate for f, v in zip(entry.bwd_factors, variants(entry.bwd_factors)))
        return _muted(entry, RatePair.of(fwd, bwd))
    if kind in RELAY_KINDS:
        gadget, count, helpers, holes, subs = _relay_setup(entry)
        schedule = relay_schedule(gadget, count, helpers, holes, subs)
        gained = count * (1 if gadget == G01 else 3)
        kept = sum(c_no(*f) for f in helpers) - Fraction(schedule.cost_per_two_slots, 2)
    elif kind in HOSTED_KINDS:
        gained, kept = 3 * len(gain), 2 * len(helper)
    elif kind in CROSS_KINDS:
        gained, kept = 3 * len(gain), 0
    elif kind is SchemeKind.ALIGNED_RELAY:
        plan = aligned_plan(*helper[0], len(gain))
        gained, kept = 3 * len(gain), c_no(*helper[0]) - Fraction(plan.muted_per_two_slots, 2)
    else:
        gained, kept = 3 * len(gain), len(gain)
    pair = RatePair.of(gained, kept) if entry.gain == FWD else RatePair.of(kept, gained)
    return _muted(entry, pair)


def _muted(entry: SchemeEntry, pair: RatePair) -> RatePair:
    return RatePair.of(
        0 if FWD in entry.mute else pair.r_fwd,
        0 if BWD in entry.mute else pair.r_bwd,
    )


def make_scheme(kind: SchemeKind, params: Optional[Mapping[str, Any]] = None) -> Tuple[Dict[Node, NodePolicy], BlockSpec]:
    """Node policies and block description of a kind under the given parameters"""
    compiled = compile_entry(entry_for(kind, params))
    return compiled.policies, compiled.block_spec


def scheme_rate(kind: SchemeKind, params: Optional[Mapping[str, Any]] = None) -> RatePair:
    """
    Exact rate of one finite block, e.g. (6L/(2L+1), 2L/(2L+1)) for SCHEME2.
    Windowed kinds sit below asymptotic_rate by O(1/L) in each direction; the rest match it.
    """
    return entry_rate(entry_for(kind, params))


def asymptotic_rate(kind: SchemeKind, params: Optional[Mapping[str, Any]] = None) -> RatePair:
    return entry_claim(entry_for(kind, params))


@dataclass(frozen=True)
class DecodeTarget:
    """A pair of same-index symbols decoded together in the retrospective order"""
    direction: str
    index: int

    def labels(self) -> Tuple[str, str]:
        if self.direction == BWD:
            return (f"a~{self.index}", f"b~{self.index}")
        return (f"a{self.index}.1", f"b{self.index}.1")

    def __str__(self) -> str:
        if self.direction == BWD:
            return f"(ã_{self.index}, b̃_{self.index})"
        return f"(a_{self.index}, b_{self.index})"


def retrospective_decode_order(L: int) -> List[DecodeTarget]:
    """Backward pair then forward pair, from the last stage-I slot down to the first"""
    if L < 1:
        raise InvalidArgumentError(f"L must be positive, got {L}")
    order: List[DecodeTarget] = []
    for index in range(L, 0, -1):
        order.append(DecodeTarget(BWD, index))
        order.append(DecodeTarget(FWD, index))
    return order
