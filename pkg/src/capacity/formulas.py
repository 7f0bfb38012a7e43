"""
Closed-form capacities and regime classification
Perfect-feedback and nonfeedback sum capacities, the two-way region, and interaction classes
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Tuple

from ..channel.core import ChannelParams, Ratio
from .polytope import RatePair, RegionSpec, tight_constraints

logger = logging.getLogger(__name__)

TWO_THIRDS = Fraction(2, 3)
TWO = Fraction(2)


class Band(Enum):
    """Interference band of one direction"""
    WEAK = "W"
    MODERATE = "M"
    STRONG = "S"


class RegimeLabel(Enum):
    CENTRAL = "CENTRAL"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R3_MIRROR = "R3_MIRROR"
    R4_MIRROR = "R4_MIRROR"
    R5_MIRROR = "R5_MIRROR"

    @property
    def is_mirror(self) -> bool:
        return self.value.endswith("_MIRROR")


class InteractionClass(Enum):
    NO_FEEDBACK_GAIN = "NO_FEEDBACK_GAIN"
    FEEDBACK_BUT_NO_INTERACTION_GAIN = "FEEDBACK_BUT_NO_INTERACTION_GAIN"
    INTERACTION_GAIN = "INTERACTION_GAIN"
    PERFECT_FEEDBACK_ACHIEVABLE = "PERFECT_FEEDBACK_ACHIEVABLE"


@dataclass(frozen=True)
class Corollary1Result:
    """Whether the perfect-feedback corner is achievable, and under which case"""
    holds: bool
    case: str  # "I", "II" or "none"

    def __bool__(self) -> bool:
        return self.holds


_REGIMES = {
    (Band.MODERATE, Band.MODERATE): RegimeLabel.CENTRAL,
    (Band.STRONG, Band.STRONG): RegimeLabel.R1,
    (Band.WEAK, Band.WEAK): RegimeLabel.R2,
    (Band.STRONG, Band.MODERATE): RegimeLabel.R3,
    (Band.MODERATE, Band.STRONG): RegimeLabel.R3_MIRROR,
    (Band.WEAK, Band.MODERATE): RegimeLabel.R4,
    (Band.MODERATE, Band.WEAK): RegimeLabel.R4_MIRROR,
    (Band.WEAK, Band.STRONG): RegimeLabel.R5,
    (Band.STRONG, Band.WEAK): RegimeLabel.R5_MIRROR,
}


def c_pf(n: int, m: int) -> int:
    """Perfect-feedback sum capacity of one direction"""
    return max(2 * n - m, m)


def c_no(n: int, m: int) -> int:
    """Nonfeedback sum capacity of one direction"""
    return min(2 * max(n - m, m), c_pf(n, m), 2 * n)


def feedback_gap(n: int, m: int) -> int:
    return c_pf(n, m) - c_no(n, m)


def band(n: int, m: int) -> Band:
    ratio = Ratio(m, n)
    if ratio.is_inactive:
        return Band.MODERATE
    if ratio < TWO_THIRDS:
        return Band.WEAK
    if ratio > TWO:
        return Band.STRONG
    return Band.MODERATE


def sum_bound(p: ChannelParams) -> int:
    """The tighter of the cut-set and the interference sum bounds on R + R̃"""
    return min(2 * (p.n + p.n_b), _interference_bound(p))


def _interference_bound(p: ChannelParams) -> int:
    return 2 * max(p.n - p.m, p.m) + 2 * max(p.n_b - p.m_b, p.m_b)


def region(p: ChannelParams) -> RegionSpec:
    """Capacity region of the two-way channel"""
    constraints = (
        (1, 0, c_pf(p.n, p.m)),
        (0, 1, c_pf(p.n_b, p.m_b)),
        (1, 1, 2 * (p.n + p.n_b)),
        (1, 1, _interference_bound(p)),
        (-1, 0, 0),
        (0, -1, 0),
    )
    return RegionSpec.from_constraints(constraints)


def baseline_box(p: ChannelParams) -> RegionSpec:
    """Region reached without any interaction between the two directions"""
    return RegionSpec.from_constraints((
        (1, 0, c_no(p.n, p.m)),
        (0, 1, c_no(p.n_b, p.m_b)),
        (-1, 0, 0),
        (0, -1, 0),
    ))


def classify_regime(p: ChannelParams) -> RegimeLabel:
    return _REGIMES[(band(p.n, p.m), band(p.n_b, p.m_b))]


def corollary1_holds(p: ChannelParams) -> Corollary1Result:
    cpf, cno = c_pf(p.n, p.m), c_no(p.n, p.m)
    cpf_b, cno_b = c_pf(p.n_b, p.m_b), c_no(p.n_b, p.m_b)
    if p.alpha < TWO_THIRDS and p.alpha_b > TWO:
        if cpf - cno <= 2 * p.m_b - cpf_b and cpf_b - cno_b <= 2 * p.n - cpf:
            return Corollary1Result(True, "I")
    if p.alpha > TWO and p.alpha_b < TWO_THIRDS:
        if cpf_b - cno_b <= 2 * p.m - cpf and cpf - cno <= 2 * p.n_b - cpf_b:
            return Corollary1Result(True, "II")
    return Corollary1Result(False, "none")


def has_interaction_gain(p: ChannelParams) -> bool:
    """True iff the region holds a point dominating (C_no, C̃_no) strictly in one coordinate"""
    spec = region(p)
    base = RatePair.of(c_no(p.n, p.m), c_no(p.n_b, p.m_b))
    tight = tight_constraints(spec, base)
    grows_fwd = all(a <= 0 for a, _, _ in tight)
    grows_bwd = all(b <= 0 for _, b, _ in tight)
    return grows_fwd or grows_bwd


def classify_interaction(p: ChannelParams) -> InteractionClass:
    gap_f = feedback_gap(p.n, p.m)
    gap_b = feedback_gap(p.n_b, p.m_b)
    if gap_f == 0 and gap_b == 0:
        return InteractionClass.NO_FEEDBACK_GAIN
    if gap_f > 0 and gap_b > 0 and corollary1_holds(p).holds:
        return InteractionClass.PERFECT_FEEDBACK_ACHIEVABLE
    if not has_interaction_gain(p):
        return InteractionClass.FEEDBACK_BUT_NO_INTERACTION_GAIN
    return InteractionClass.INTERACTION_GAIN


def capacities(p: ChannelParams) -> Tuple[int, int, int, int]:
    """(c_pf, c_no, c̃_pf, c̃_no)"""
    return (c_pf(p.n, p.m), c_no(p.n, p.m), c_pf(p.n_b, p.m_b), c_no(p.n_b, p.m_b))
