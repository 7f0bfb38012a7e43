from fractions import Fraction
from itertools import product

import pytest

from src.capacity.formulas import region
from src.capacity.polytope import RatePair
from src.channel.core import BWD, FWD, ChannelParams
from src.decomposition.planner import SchemePlanner, plan_scheme
from src.errors import InvalidTargetError


def kinds(plan):
    return sorted(entry.kind.value for entry in plan.entries)


def test_scheme1_vertex(scheme1_channel):
    plan = plan_scheme(scheme1_channel, RatePair.of(3, 2))
    assert kinds(plan) == ["SCHEME1"]
    assert plan.claimed_rate() == RatePair.of(3, 2)
    assert plan.block_rate() == RatePair.of(3, 2)


def test_axis_vertices_mute_the_other_direction(scheme1_channel):
    plan = plan_scheme(scheme1_channel, RatePair.of(3, 0))
    assert kinds(plan) == ["SCHEME1"]
    assert plan.entries[0].mute == (BWD,)
    assert plan.claimed_rate() == RatePair.of(3, 0)

    plan = plan_scheme(scheme1_channel, RatePair.of(0, 2))
    assert kinds(plan) == ["NONFEEDBACK"]
    assert plan.entries[0].mute == (FWD,)
    assert plan.claimed_rate() == RatePair.of(0, 2)


def test_origin_mutes_everything(scheme1_channel):
    plan = plan_scheme(scheme1_channel, RatePair.zero())
    assert kinds(plan) == ["NONFEEDBACK"]
    assert set(plan.entries[0].mute) == {FWD, BWD}
    assert plan.claimed_rate() == RatePair.zero()


def test_example_channel_combines_both_schemes():
    p = ChannelParams.of(4, 2, 1, 3)
    plan = plan_scheme(p, RatePair.of(6, 3), L=50)
    assert kinds(plan) == ["SCHEME1", "SCHEME2"]
    assert plan.claimed_rate() == RatePair.of(6, 3)
    assert plan.block_rate() == RatePair.of(3 + Fraction(300, 101), 2 + Fraction(100, 101))
    assert plan.factor_counts(FWD) == {(2, 1): 2}
    assert plan.factor_counts(BWD) == {(0, 1): 1, (1, 2): 1}


def test_scheme2_vertex(scheme2_channel):
    plan = plan_scheme(scheme2_channel, RatePair.of(3, 1), L=8)
    assert kinds(plan) == ["SCHEME2"]
    assert plan.entries[0].L == 8


def test_mirrored_orientation_is_used():
    p = ChannelParams.of(1, 2, 2, 1)
    plan = plan_scheme(p, RatePair.of(2, 3))
    assert kinds(plan) == ["SCHEME1"]
    assert plan.entries[0].gain == BWD
    assert plan.claimed_rate() == RatePair.of(2, 3)


def test_non_vertex_rejected(scheme1_channel):
    with pytest.raises(InvalidTargetError):
        plan_scheme(scheme1_channel, RatePair.of(9, 9))
    with pytest.raises(InvalidTargetError):
        plan_scheme(scheme1_channel, RatePair.of(1, 1))


def test_planning_log_records_acceptance(scheme1_channel):
    planner = SchemePlanner(L=4)
    plan = planner.plan(scheme1_channel, RatePair.of(3, 2))
    assert plan.planning_log[-1]["action"] == "plan_accepted"
    assert all(set(record) == {"stage", "action", "details"} for record in plan.planning_log)


@pytest.mark.parametrize("params", [(2, 1, 1, 2), (2, 1, 0, 1), (4, 2, 1, 3), (1, 1, 1, 1), (1, 0, 0, 1), (7, 5, 1, 1)])
def test_every_vertex_is_planned_and_claimed_exactly(params):
    p = ChannelParams.of(*params)
    for vertex in region(p).vertices:
        plan = plan_scheme(p, vertex, L=4)
        assert plan.claimed_rate() == vertex


@pytest.mark.parametrize("params, vertex", [
    ((0, 1, 2, 3), (1, 3)),
    ((0, 2, 2, 3), (2, 2)),
    ((0, 4, 4, 3), (4, 4)),
    ((0, 5, 3, 4), (5, 1)),
    ((3, 2, 0, 3), (3, 3)),
])
def test_central_partner_vertices_are_planned(params, vertex):
    plan = plan_scheme(ChannelParams.of(*params), RatePair.of(*vertex), L=4)
    assert plan.claimed_rate() == RatePair.of(*vertex)


def test_planner_covers_every_small_channel():
    missed = []
    for params in product(range(7), repeat=4):
        p = ChannelParams.of(*params)
        for vertex in region(p).vertices:
            if plan_scheme(p, vertex, L=4).claimed_rate() != vertex:
                missed.append((params, vertex))
    assert missed == []
