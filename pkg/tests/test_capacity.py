from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.capacity.formulas import (
    InteractionClass, RegimeLabel, baseline_box, c_no, c_pf, capacities, classify_interaction,
    classify_regime, corollary1_holds, feedback_gap, has_interaction_gain, region, sum_bound,
)
from src.capacity.polytope import RatePair, contains
from src.channel.core import ChannelParams


@pytest.mark.parametrize("factor, cpf, cno", [
    ((2, 1), 3, 2),
    ((1, 2), 2, 2),
    ((0, 1), 1, 0),
    ((4, 2), 6, 4),
    ((1, 3), 3, 2),
    ((3, 2), 4, 4),
    ((1, 0), 2, 2),
])
def test_sum_capacities(factor, cpf, cno):
    assert c_pf(*factor) == cpf
    assert c_no(*factor) == cno


def test_capacities_tuple():
    assert capacities(ChannelParams.of(2, 1, 1, 2)) == (3, 2, 2, 2)


def test_region_vertices_scheme1_channel(scheme1_channel):
    spec = region(scheme1_channel)
    assert list(spec.vertices) == [
        RatePair.of(0, 0), RatePair.of(3, 0), RatePair.of(3, 2), RatePair.of(0, 2),
    ]


def test_region_example_channel_reaches_both_feedback_capacities():
    spec = region(ChannelParams.of(4, 2, 1, 3))
    assert spec.is_vertex(RatePair.of(6, 3))
    assert not contains(spec, RatePair.of(7, 0))


def test_sum_bound_is_tighter_of_two():
    p = ChannelParams.of(8, 4, 16, 8)
    assert sum_bound(p) == 24


def test_baseline_box_is_inside_region(scheme2_channel):
    box = baseline_box(scheme2_channel)
    spec = region(scheme2_channel)
    assert all(contains(spec, v) for v in box.vertices)


@pytest.mark.parametrize("params, label", [
    ((2, 1, 0, 1), RegimeLabel.R5),
    ((0, 1, 2, 1), RegimeLabel.R5_MIRROR),
    ((1, 1, 1, 1), RegimeLabel.CENTRAL),
    ((1, 3, 0, 1), RegimeLabel.R1),
    ((2, 1, 4, 1), RegimeLabel.R2),
    ((2, 1, 3, 2), RegimeLabel.R4),
    ((0, 0, 0, 0), RegimeLabel.CENTRAL),
])
def test_classify_regime(params, label):
    assert classify_regime(ChannelParams.of(*params)) is label


def test_corollary_case_one(scheme2_channel):
    result = corollary1_holds(scheme2_channel)
    assert result.holds and result.case == "I"
    mirrored = corollary1_holds(scheme2_channel.swapped())
    assert mirrored.holds and mirrored.case == "II"


def test_corollary_fails_for_weak_weak():
    assert not corollary1_holds(ChannelParams.of(2, 1, 2, 1))


@pytest.mark.parametrize("params, cls", [
    ((1, 1, 1, 1), InteractionClass.NO_FEEDBACK_GAIN),
    ((2, 1, 0, 1), InteractionClass.PERFECT_FEEDBACK_ACHIEVABLE),
    ((8, 4, 16, 8), InteractionClass.FEEDBACK_BUT_NO_INTERACTION_GAIN),
    ((8, 4, 16, 36), InteractionClass.PERFECT_FEEDBACK_ACHIEVABLE),
    ((2, 1, 1, 2), InteractionClass.INTERACTION_GAIN),
])
def test_classify_interaction(params, cls):
    assert classify_interaction(ChannelParams.of(*params)) is cls


def test_interaction_gain_on_scheme1_channel(scheme1_channel):
    assert has_interaction_gain(scheme1_channel)


levels = st.integers(min_value=0, max_value=12)


@given(n=levels, m=levels)
def test_feedback_never_hurts(n, m):
    assert c_pf(n, m) >= c_no(n, m)
    assert feedback_gap(n, m) >= 0


@given(n=levels, m=levels)
def test_no_gap_in_moderate_band(n, m):
    if n and 3 * m >= 2 * n and m <= 2 * n:
        assert feedback_gap(n, m) == 0


@given(n=levels, m=levels, nb=levels, mb=levels)
def test_region_holds_baseline_and_every_vertex(n, m, nb, mb):
    p = ChannelParams.of(n, m, nb, mb)
    spec = region(p)
    assert contains(spec, RatePair.of(c_no(n, m), c_no(nb, mb)))
    for vertex in spec.vertices:
        assert contains(spec, vertex)
        assert vertex.r_fwd <= c_pf(n, m)
        assert vertex.r_bwd <= c_pf(nb, mb)
        assert vertex.r_fwd + vertex.r_bwd <= sum_bound(p)
        assert isinstance(vertex.r_fwd, Fraction)
