"""
Critic for simulation runs
Certifies zero-error decoding, rate exactness and the capacity-region bounds
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from ..capacity.polytope import RatePair, RegionSpec, contains, satisfies
from ..decomposition.planner import SchemePlan
from .executor import SimulationReport

logger = logging.getLogger(__name__)


def _shortfall(target: RatePair, achieved: RatePair) -> Tuple[Fraction, Fraction]:
    return (target.r_fwd - achieved.r_fwd, target.r_bwd - achieved.r_bwd)


def verify_zero_error(report: SimulationReport) -> bool:
    return report.error_count == 0 and not report.errors


def check_bounds(report: SimulationReport, spec: RegionSpec) -> bool:
    """True iff the achieved pair satisfies every constraint of the region"""
    return contains(spec, report.achieved)


@dataclass
class CritiqueResult:
    """Result of critique phase"""
    passed: bool
    issues: List[Dict[str, Any]] = field(default_factory=list)
    gap: Optional[Tuple[Fraction, Fraction]] = None
    recommendations: List[str] = field(default_factory=list)


class SimulationCritic:
    """Checks a report against its plan and the capacity region"""

    def critique(self, report: SimulationReport, spec: RegionSpec,
                 plan: Optional[SchemePlan] = None) -> CritiqueResult:
        result = CritiqueResult(passed=False)

        if not verify_zero_error(report):
            result.issues.append({
                "type": "decoding_error",
                "severity": "critical",
                "description": f"{report.error_count} message bits decoded wrongly",
                "details": report.errors[:5],
            })

        if not check_bounds(report, spec):
            violated = [c for c in spec.constraints if not satisfies(c, report.achieved)]
            result.issues.append({
                "type": "outside_region",
                "severity": "critical",
                "description": f"achieved {report.achieved} violates the capacity region",
                "details": [f"{a}*R + {b}*R~ <= {c}" for a, b, c in violated],
            })

        if plan is not None:
            expected = plan.block_rate()
            if report.error_count == 0 and report.achieved != expected:
                result.issues.append({
                    "type": "rate_mismatch",
                    "severity": "critical",
                    "description": f"achieved {report.achieved}, blocks promise {expected}",
                    "details": report.entries,
                })
            result.gap = _shortfall(plan.target, report.achieved)
            if any(g < 0 for g in result.gap):
                result.issues.append({
                    "type": "beyond_target",
                    "severity": "critical",
                    "description": f"achieved {report.achieved} exceeds the planned vertex {plan.target}",
                    "details": [str(g) for g in result.gap],
                })
            elif any(g > 0 for g in result.gap):
                result.recommendations.append("increase L to shrink the windowing gap")

        result.passed = not result.issues
        for issue in result.issues:
            logger.warning("certification failed: %s", issue["description"])
        return result

    def within(self, report: SimulationReport, target: RatePair, tolerance: Fraction) -> bool:
        gap = _shortfall(target, report.achieved)
        return all(0 <= g <= tolerance for g in gap)
