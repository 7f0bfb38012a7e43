from fractions import Fraction

import pytest

from src.capacity.polytope import RatePair
from src.channel.core import BWD, FWD, Node
from src.errors import InfeasibleSchemeError, InvalidArgumentError
from src.schemes.catalogue import (
    DecodeTarget, SchemeKind, asymptotic_rate, compile_entry, entry_for, make_scheme,
    retrospective_decode_order, scheme_rate,
)
from src.schemes.gadgets import G01, G21, hosted_phases, relay_schedule, stream, variants
from src.schemes.gf2 import bits_of


def test_scheme1_block():
    policies, block = make_scheme(SchemeKind.SCHEME1)
    assert set(policies) == set(Node)
    assert block.slots_per_block == 2
    assert block.fwd_bits_per_block == 6
    assert block.bwd_bits_per_block == 4
    assert scheme_rate(SchemeKind.SCHEME1) == RatePair.of(3, 2)


@pytest.mark.parametrize("L, rate", [
    (1, RatePair.of(2, Fraction(2, 3))),
    (5, RatePair.of(Fraction(30, 11), Fraction(10, 11))),
    (50, RatePair.of(Fraction(300, 101), Fraction(100, 101))),
])
def test_scheme2_finite_rate(L, rate):
    assert scheme_rate(SchemeKind.SCHEME2, {"L": L}) == rate
    assert asymptotic_rate(SchemeKind.SCHEME2, {"L": L}) == RatePair.of(3, 1)


@pytest.mark.parametrize("kind, params, rate", [
    (SchemeKind.LEMMA3_I, {"i": 1, "j": 1}, (1, 1)),
    (SchemeKind.LEMMA3_I, {"i": 2, "j": 1}, (2, 0)),
    (SchemeKind.LEMMA3_II, {"i": 2, "j": 1, "k": 1}, (6, 2)),
    (SchemeKind.LEMMA3_II, {"i": 1, "j": 1, "k": 0}, (3, 1)),
    (SchemeKind.LEMMA3_III, {"i": 2, "j": 1, "k": 1}, (6, 4)),
    (SchemeKind.LEMMA4_I, {}, (3, 1)),
    (SchemeKind.LEMMA4_II, {"i": 2, "j": 1}, (6, 2)),
    (SchemeKind.LEMMA4_III, {}, (4, 1)),
    (SchemeKind.LEMMA4_IV, {}, (2, 2)),
    (SchemeKind.LEMMA4_V, {}, (6, 0)),
    (SchemeKind.PERFECT_FEEDBACK_21, {}, (3, 0)),
])
def test_claimed_rates(kind, params, rate):
    assert asymptotic_rate(kind, params) == RatePair.of(*rate)


def test_unwindowed_relays_hit_their_claim_exactly():
    assert scheme_rate(SchemeKind.LEMMA3_I, {"i": 1, "j": 1}) == RatePair.of(1, 1)
    assert scheme_rate(SchemeKind.LEMMA3_II, {"i": 2, "j": 1, "k": 1}) == RatePair.of(6, 2)
    assert scheme_rate(SchemeKind.LEMMA4_III) == RatePair.of(4, 1)


def test_windowed_relay_approaches_claim():
    rate = scheme_rate(SchemeKind.LEMMA4_IV, {"L": 10})
    assert rate == RatePair.of(2, Fraction(40, 21))


@pytest.mark.parametrize("kind, params, inequality", [
    (SchemeKind.LEMMA3_I, {"i": 3, "j": 1}, "i <= 2j"),
    (SchemeKind.LEMMA3_II, {"i": 5, "j": 1, "k": 1}, "i <= 2j + 2k"),
    (SchemeKind.LEMMA3_III, {"i": 7, "j": 1, "k": 1}, "i <= 2j + 4k"),
    (SchemeKind.LEMMA4_II, {"i": 3, "j": 1}, "i <= 2j"),
    (SchemeKind.LEMMA4_IV, {"i": 1, "j": 3}, "j <= 2i"),
    (SchemeKind.SCHEME2, {"L": 0}, "L >= 1"),
])
def test_infeasible_parameters_name_the_inequality(kind, params, inequality):
    with pytest.raises(InfeasibleSchemeError) as info:
        entry_for(kind, params)
    assert info.value.inequality == inequality


def test_bad_parameter_values():
    with pytest.raises(InvalidArgumentError):
        entry_for(SchemeKind.SCHEME1, {"gain": "sideways"})
    with pytest.raises(InvalidArgumentError):
        entry_for(SchemeKind.LEMMA3_I, {"i": "many"})
    with pytest.raises(InvalidArgumentError):
        entry_for(SchemeKind.LEMMA3_I, {"j": -1})


def test_default_shapes_follow_gain_direction():
    entry = entry_for(SchemeKind.LEMMA4_IV)
    assert entry.gain == BWD
    assert entry.fwd_factors == ((2, 1),)
    assert entry.bwd_factors == ((0, 1), (0, 1))


def test_explicit_factor_lists():
    entry = entry_for(SchemeKind.NONFEEDBACK, {"fwd": "2,1;1,1", "bwd": "1,2"})
    assert entry.fwd_factors == ((2, 1), (1, 1))
    assert scheme_rate(SchemeKind.NONFEEDBACK, {"fwd": "2,1;1,1", "bwd": "1,2"}) == RatePair.of(3, 2)


def test_mute_and_mirror():
    muted = entry_for(SchemeKind.SCHEME1, {"mute": "bwd"})
    assert scheme_rate(SchemeKind.SCHEME1, {"mute": "bwd"}) == RatePair.of(3, 0)
    assert muted.mute == (BWD,)
    mirrored = entry_for(SchemeKind.SCHEME1).mirrored()
    assert mirrored.gain == BWD
    assert mirrored.fwd_factors == ((1, 2),)
    compiled = compile_entry(mirrored)
    assert compiled.block_spec.fwd_bits_per_block == 4
    assert compiled.block_spec.bwd_bits_per_block == 6


def test_retrospective_decode_order():
    order = retrospective_decode_order(2)
    assert order == [DecodeTarget(BWD, 2), DecodeTarget(FWD, 2), DecodeTarget(BWD, 1), DecodeTarget(FWD, 1)]
    assert str(order[0]) == "(ã_2, b̃_2)"
    assert order[1].labels() == ("a2.1", "b2.1")
    with pytest.raises(InvalidArgumentError):
        retrospective_decode_order(0)


def test_scheme2_decodes_in_retrospective_order():
    L = 3
    compiled = compile_entry(entry_for(SchemeKind.SCHEME2, {"L": L}))
    scheme = compiled.scheme
    deadlines = []
    for target in retrospective_decode_order(L):
        label = target.labels()[0]
        owner = Node.U1T if target.direction == BWD else Node.U1
        deadlines.append(compiled.decode_of(scheme.variable(label, owner).index).deadline)
    assert deadlines == sorted(deadlines)
    assert deadlines[0] == (L, 1)
    assert deadlines[-1] == (2 * L, 0)


def test_relay_schedule_prefers_two_slot_timing():
    schedule = relay_schedule(G01, 1, [(1, 2)], holes=False, subs=True)
    assert not schedule.windowed
    assert schedule.cost_per_two_slots == 2
    staggered = relay_schedule(G01, 2, [(2, 1)], holes=True, subs=False)
    assert (staggered.pairs_even, staggered.pairs_odd) == (1, 1)
    assert staggered.cost_per_two_slots == 0
    with pytest.raises(InfeasibleSchemeError):
        relay_schedule(G21, 3, [(1, 0)], holes=False, subs=True)


def test_gadget_helpers():
    assert stream("a", BWD, 2) == "a~#2"
    assert stream("A", FWD) == "A"
    assert variants([(1, 1), (2, 1), (1, 1)]) == [0, 0, 1]
    assert hosted_phases(1, 1) == (1, 0)
    assert hosted_phases(2, 1) == (1, 1)


def _feasible_grid():
    for kind in (SchemeKind.LEMMA3_I, SchemeKind.LEMMA3_II, SchemeKind.LEMMA3_III, SchemeKind.LEMMA4_II,
                 SchemeKind.LEMMA4_III, SchemeKind.LEMMA4_IV, SchemeKind.LEMMA4_V):
        ks = range(4) if kind in (SchemeKind.LEMMA3_II, SchemeKind.LEMMA3_III) else (0,)
        for i in range(1, 4):
            for j in range(1, 4):
                for k in ks:
                    params = {"i": i, "j": j, "k": k, "L": 8}
                    try:
                        entry_for(kind, params)
                    except InfeasibleSchemeError:
                        continue
                    yield kind, params


@pytest.mark.parametrize("kind, params", list(_feasible_grid()))
def test_block_rate_stays_below_claim(kind, params):
    rate, claim = scheme_rate(kind, params), asymptotic_rate(kind, params)
    factors = params["i"] + params["j"] + params["k"]
    slack = Fraction(3 * factors, 2 * params["L"] + 1)
    for got, claimed in ((rate.r_fwd, claim.r_fwd), (rate.r_bwd, claim.r_bwd)):
        assert got <= claimed
        assert claimed - got <= slack


def test_helper_of_staggered_relay_never_overshoots():
    params = {"fwd": "3,2", "bwd": "0,1;0,1;0,1", "gain": "bwd", "L": 32}
    assert asymptotic_rate(SchemeKind.HOLE_RELAY, params) == RatePair.of(3, 3)
    rate = scheme_rate(SchemeKind.HOLE_RELAY, params)
    assert rate.r_fwd == 3
    assert rate.r_bwd <= 3


@pytest.mark.parametrize("L", [4, 8, 16, 32])
def test_scheme2_gap_shrinks_as_one_over_L(L):
    claim, rate = asymptotic_rate(SchemeKind.SCHEME2, {"L": L}), scheme_rate(SchemeKind.SCHEME2, {"L": L})
    assert (claim.r_fwd - rate.r_fwd) * (2 * L + 1) == 3
    assert (claim.r_bwd - rate.r_bwd) * (2 * L + 1) == 1
    doubled = claim.r_fwd - scheme_rate(SchemeKind.SCHEME2, {"L": 2 * L}).r_fwd
    assert doubled / (claim.r_fwd - rate.r_fwd) == Fraction(2 * L + 1, 4 * L + 1)


@pytest.mark.parametrize("kind, params, helper_rate", [
    (SchemeKind.LEMMA3_I, {"j": 2}, 4),
    (SchemeKind.LEMMA3_II, {"j": 1, "k": 1}, 4),
    (SchemeKind.LEMMA3_III, {"j": 1, "k": 1}, 6),
])
def test_substituted_gains_trade_one_to_one(kind, params, helper_rate):
    for i in range(1, 5):
        try:
            claim = asymptotic_rate(kind, {**params, "i": i})
        except InfeasibleSchemeError:
            break
        # every gained forward bit over the nonfeedback code costs one helper bit
        gained = claim.r_fwd - i * (0 if kind is SchemeKind.LEMMA3_I else 2)
        assert gained == i
        assert helper_rate - claim.r_bwd == gained


@pytest.mark.parametrize("i, rate", [(1, (3, 3)), (3, (9, 3))])
def test_aligned_relay_claims(i, rate):
    assert asymptotic_rate(SchemeKind.ALIGNED_RELAY, {"i": i}) == RatePair.of(*rate)


def test_aligned_relay_compiles_with_lag_three_windows():
    params = {"i": 1, "L": 4}
    compiled = compile_entry(entry_for(SchemeKind.ALIGNED_RELAY, params))
    assert compiled.slots == 10
    assert scheme_rate(SchemeKind.ALIGNED_RELAY, params) == RatePair.of(Fraction(14, 5), 3)


def test_resolved_relay_on_one_one_helpers():
    params = {"i": 1, "L": 4}
    assert asymptotic_rate(SchemeKind.RESOLVED_RELAY, params) == RatePair.of(3, 1)
    assert scheme_rate(SchemeKind.RESOLVED_RELAY, params) == RatePair.of(Fraction(14, 5), 1)
    with pytest.raises(InfeasibleSchemeError):
        entry_for(SchemeKind.RESOLVED_RELAY, {"fwd": "2,1;2,1", "bwd": "1,1"})


def test_cross_feedback_over_a_one_one_helper():
    params = {"fwd": "2,1", "bwd": "1,1"}
    assert asymptotic_rate(SchemeKind.PERFECT_FEEDBACK_21, params) == RatePair.of(3, 0)
    assert scheme_rate(SchemeKind.PERFECT_FEEDBACK_21, params) == RatePair.of(3, 0)


def test_scheme1_refinement_leaves_bottom_level_free_of_interference():
    scheme = compile_entry(entry_for(SchemeKind.SCHEME1)).scheme
    owners = {v.index: v.owner for v in scheme.variables}
    for receiver, sender in ((Node.U1T, Node.U1), (Node.U2T, Node.U2)):
        bottom = scheme.received(1, receiver, (FWD, 0))[1]
        assert bottom
        assert {owners[i] for i in bits_of(bottom)} == {sender}


def test_scheme2_ignition_slot_sends_no_fresh_bits():
    L = 4
    scheme = compile_entry(entry_for(SchemeKind.SCHEME2, {"L": L})).scheme
    assert not [v for v in scheme.variables if v.slot == L]
    assert {v.slot for v in scheme.variables if v.direction == FWD} == set(range(2 * L + 1)) - {L}


def test_scheme2_forward_pairs_unlock_last_to_first():
    L = 5
    compiled = compile_entry(entry_for(SchemeKind.SCHEME2, {"L": L}))
    for k in range(1, L + 1):
        label = DecodeTarget(FWD, k).labels()[0]
        variable = compiled.scheme.variable(label, Node.U1)
        assert compiled.decode_of(variable.index).deadline == (2 * L + 1 - k, 0)
