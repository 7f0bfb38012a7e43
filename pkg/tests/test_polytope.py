from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.capacity.polytope import (
    RatePair, RegionSpec, contains, enumerate_vertices, rate_json, rational_json, tight_constraints, time_share,
)
from src.errors import InvalidArgumentError, UnboundedRegionError


def test_box_vertices_counterclockwise():
    vertices = enumerate_vertices([(1, 0, 3), (0, 1, 2)])
    assert vertices == [RatePair.of(0, 0), RatePair.of(3, 0), RatePair.of(3, 2), RatePair.of(0, 2)]


def test_sum_constraint_cuts_the_corner():
    vertices = enumerate_vertices([(1, 0, 3), (0, 1, 3), (1, 1, 4)])
    assert RatePair.of(3, 1) in vertices
    assert RatePair.of(1, 3) in vertices
    assert RatePair.of(3, 3) not in vertices


def test_fractional_vertex_is_exact():
    vertices = enumerate_vertices([(2, 1, 3), (1, 2, 3)])
    assert RatePair.of(1, 1) in vertices
    assert RatePair.of(Fraction(3, 2), 0) in vertices


def test_unbounded_system_rejected():
    with pytest.raises(UnboundedRegionError):
        enumerate_vertices([(1, -1, 0)])
    with pytest.raises(UnboundedRegionError):
        enumerate_vertices([])


def test_origin_must_be_feasible():
    with pytest.raises(InvalidArgumentError):
        enumerate_vertices([(1, 0, -1), (0, 1, 2)])


def test_tight_constraints():
    spec = RegionSpec.from_constraints([(1, 0, 3), (0, 1, 2)])
    assert tight_constraints(spec, RatePair.of(3, 2)) == [(1, 0, 3), (0, 1, 2)]
    assert spec.is_vertex(RatePair.of(3, 2))
    assert not spec.is_vertex(RatePair.of(1, 1))


def test_time_share():
    point = time_share([RatePair.of(3, 0), RatePair.of(0, 2)], [Fraction(1, 2), Fraction(1, 2)])
    assert point == RatePair.of(Fraction(3, 2), 1)
    with pytest.raises(InvalidArgumentError):
        time_share([RatePair.of(3, 0)], [Fraction(1, 2)])


def test_rate_pair_parse_and_json():
    pair = RatePair.parse("300/101, 1")
    assert pair == RatePair.of(Fraction(300, 101), 1)
    assert rate_json(pair)["r_fwd"] == {"num": 300, "den": 101, "decimal": 300 / 101}
    assert rational_json(2) == {"num": 2, "den": 1, "decimal": 2.0}
    with pytest.raises(InvalidArgumentError):
        RatePair.parse("1,2,3")
    with pytest.raises(InvalidArgumentError):
        RatePair.parse("a,b")


def test_rate_pair_rejects_negative():
    with pytest.raises(InvalidArgumentError):
        RatePair.of(-1, 0)


def test_rate_pair_arithmetic():
    a, b = RatePair.of(1, 2), RatePair.of(Fraction(1, 2), 0)
    assert a + b == RatePair.of(Fraction(3, 2), 2)
    assert a.swapped() == RatePair.of(2, 1)
    assert a.gap(b) == (Fraction(1, 2), Fraction(2))


coefficient = st.integers(min_value=0, max_value=6)


@given(st.lists(st.tuples(coefficient, coefficient, st.integers(0, 20)), min_size=1, max_size=5))
def test_vertices_are_feasible(extra):
    system = [(1, 0, 10), (0, 1, 10)] + list(extra)
    vertices = enumerate_vertices(system)
    assert vertices[0] == RatePair.zero()
    for vertex in vertices:
        assert contains(system, vertex)
        assert len(tight_constraints(list(system) + [(-1, 0, 0), (0, -1, 0)], vertex)) >= 2
