"""
Exact two-dimensional polytope helpers
Rate pairs, half-plane systems and vertex enumeration over Fractions
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from ..errors import InvalidArgumentError, UnboundedRegionError

Constraint = Tuple[int, int, int]
Number = Union[int, Fraction]

NONNEGATIVITY: Tuple[Constraint, ...] = ((-1, 0, 0), (0, -1, 0))


@dataclass(frozen=True)
class RatePair:
    """Exact (R, R̃) in bits per slot"""
    r_fwd: Fraction
    r_bwd: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r_fwd", Fraction(self.r_fwd))
        object.__setattr__(self, "r_bwd", Fraction(self.r_bwd))
        if self.r_fwd < 0 or self.r_bwd < 0:
            raise InvalidArgumentError(f"rates must be nonnegative, got ({self.r_fwd}, {self.r_bwd})")

    @classmethod
    def of(cls, r_fwd: Number, r_bwd: Number) -> "RatePair":
        return cls(Fraction(r_fwd), Fraction(r_bwd))

    @classmethod
    def zero(cls) -> "RatePair":
        return cls(Fraction(0), Fraction(0))

    @classmethod
    def parse(cls, text: str) -> "RatePair":
        """Parse 'R,R̃' where each side is an integer or a fraction like 300/101"""
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 2:
            raise InvalidArgumentError(f"expected 'R,R~', got {text!r}")
        try:
            return cls(Fraction(parts[0]), Fraction(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"cannot parse rate pair {text!r}") from exc

    def __add__(self, other: "RatePair") -> "RatePair":
        return RatePair(self.r_fwd + other.r_fwd, self.r_bwd + other.r_bwd)

    def scaled(self, factor: Number) -> "RatePair":
        return RatePair(self.r_fwd * factor, self.r_bwd * factor)

    def swapped(self) -> "RatePair":
        return RatePair(self.r_bwd, self.r_fwd)

    def gap(self, other: "RatePair") -> Tuple[Fraction, Fraction]:
        return (abs(self.r_fwd - other.r_fwd), abs(self.r_bwd - other.r_bwd))

    def as_tuple(self) -> Tuple[Fraction, Fraction]:
        return (self.r_fwd, self.r_bwd)

    def __str__(self) -> str:
        return f"({self.r_fwd}, {self.r_bwd})"


@dataclass(frozen=True)
class RegionSpec:
    """Half-plane constraints a·R + b·R̃ ≤ c with their enumerated vertices"""
    constraints: Tuple[Constraint, ...]
    vertices: Tuple[RatePair, ...]

    @classmethod
    def from_constraints(cls, constraints: Iterable[Constraint]) -> "RegionSpec":
        constraints = tuple(tuple(int(v) for v in c) for c in constraints)
        return cls(constraints, tuple(enumerate_vertices(constraints)))

    def is_vertex(self, point: RatePair) -> bool:
        return point in self.vertices


def _value(constraint: Constraint, x: Fraction, y: Fraction) -> Fraction:
    a, b, _ = constraint
    return a * x + b * y


def satisfies(constraint: Constraint, point: RatePair) -> bool:
    return _value(constraint, point.r_fwd, point.r_bwd) <= constraint[2]


def contains(spec: Union[RegionSpec, Sequence[Constraint]], point: RatePair) -> bool:
    constraints = spec.constraints if isinstance(spec, RegionSpec) else spec
    return all(satisfies(c, point) for c in constraints)


def tight_constraints(spec: Union[RegionSpec, Sequence[Constraint]], point: RatePair) -> List[Constraint]:
    constraints = spec.constraints if isinstance(spec, RegionSpec) else spec
    return [c for c in constraints if _value(c, point.r_fwd, point.r_bwd) == c[2]]


def _check_bounded(constraints: Sequence[Constraint]) -> None:
    normals = [(a, b) for a, b, _ in constraints if (a, b) != (0, 0)]
    if not normals:
        raise UnboundedRegionError("no constraint bounds the rate pair")
    # A nonzero recession direction, if any, lies on the boundary of some constraint cone.
    for a, b in normals:
        for d in ((b, -a), (-b, a)):
            if all(na * d[0] + nb * d[1] <= 0 for na, nb in normals):
                raise UnboundedRegionError(f"constraint system is unbounded along {d}")


def _ccw(p: RatePair, q: RatePair) -> int:
    cross = p.r_fwd * q.r_bwd - p.r_bwd * q.r_fwd
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    dp = p.r_fwd + p.r_bwd
    dq = q.r_fwd + q.r_bwd
    return -1 if dp < dq else (1 if dp > dq else 0)


def enumerate_vertices(constraints: Iterable[Constraint]) -> List[RatePair]:
    """Exact vertices of {a·R + b·R̃ ≤ c} ∩ {R, R̃ ≥ 0}, counterclockwise from the origin"""
    system = list(constraints)
    for c in NONNEGATIVITY:
        if c not in system:
            system.append(c)
    if any(c < 0 for _, _, c in system):
        raise InvalidArgumentError("constraint system must contain the origin")
    _check_bounded(system)

    found = set()
    for (a1, b1, c1), (a2, b2, c2) in combinations(system, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = Fraction(c1 * b2 - c2 * b1, det)
        y = Fraction(a1 * c2 - a2 * c1, det)
        if x < 0 or y < 0:
            continue
        if all(a * x + b * y <= c for a, b, c in system):
            found.add((x, y))

    origin = RatePair.zero()
    others = [RatePair(x, y) for x, y in found if (x, y) != (0, 0)]
    others.sort(key=cmp_to_key(_ccw))
    return [origin] + others


def time_share(points: Sequence[RatePair], weights: Sequence[Number]) -> RatePair:
    """Convex combination of rate pairs; weights are exact and sum to one"""
    if len(points) != len(weights) or not points:
        raise InvalidArgumentError("time sharing needs one weight per point")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise InvalidArgumentError(f"time-sharing weights must be nonnegative and sum to 1, got {weights}")
    total = RatePair.zero()
    for point, weight in zip(points, weights):
        total = total + point.scaled(weight)
    return total


def rational_json(value: Number) -> Dict[str, object]:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator, "decimal": float(value)}


def rate_json(point: RatePair) -> Dict[str, object]:
    return {"r_fwd": rational_json(point.r_fwd), "r_bwd": rational_json(point.r_bwd)}
