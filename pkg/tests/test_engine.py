import pytest

from src.channel.core import BWD, FWD, Node
from src.errors import InvalidArgumentError, ProtocolViolationError
from src.capacity.formulas import c_no
from src.schemes.codes import code_layout, received_symbols, relay_masks
from src.schemes.engine import SchemeBuilder, compile_scheme
from src.schemes.gf2 import GF2Basis, bits_of


def test_basis_tracks_combinations():
    basis = GF2Basis()
    assert basis.add(0b011, 0b01)
    assert basis.add(0b110, 0b10)
    assert not basis.add(0b101, 0b100)
    residual, combo = basis.reduce(0b101)
    assert residual == 0
    assert combo == 0b11
    assert not basis.contains(0b1000)
    assert len(basis) == 2


def test_bits_of():
    assert bits_of(0b10110) == [1, 2, 4]
    assert bits_of(0) == []


def _direct_scheme():
    builder = SchemeBuilder("direct", 1, [(1, 0)], [])
    for node in (Node.U1, Node.U2):
        builder.send(0, node, (FWD, 0), 0, builder.fresh(node, "u", 0))
    return builder.build()


def test_compile_finds_decode_recipes():
    compiled = compile_scheme(_direct_scheme())
    assert compiled.block_spec.fwd_bits_per_block == 2
    assert compiled.block_spec.bwd_bits_per_block == 0
    recipe = compiled.decode_of(0)
    assert recipe.receiver is Node.U1T
    assert recipe.deadline == (0, 0)


def test_builder_rejects_wrong_link_and_level():
    builder = SchemeBuilder("bad", 1, [(1, 0)], [(1, 0)])
    with pytest.raises(ProtocolViolationError):
        builder.send(0, Node.U1, (BWD, 0), 0, 1)
    with pytest.raises(ProtocolViolationError):
        builder.send(0, Node.U1, (FWD, 0), 3, 1)
    with pytest.raises(InvalidArgumentError):
        SchemeBuilder("empty", 0, [], [])


def test_non_causal_transmission_rejected():
    builder = SchemeBuilder("leak", 1, [(1, 0)], [])
    a = builder.fresh(Node.U1, "a", 0)
    builder.send(0, Node.U1, (FWD, 0), 0, a)
    builder.fresh(Node.U2, "b", 0)
    # U2 cannot transmit U1's bit
    builder.send(0, Node.U2, (FWD, 0), 0, a)
    with pytest.raises(ProtocolViolationError):
        compile_scheme(builder.build())


def test_undecodable_scheme_rejected():
    builder = SchemeBuilder("collide", 1, [(1, 1)], [])
    a = builder.fresh(Node.U1, "a", 0)
    b = builder.fresh(Node.U2, "b", 0)
    builder.send(0, Node.U1, (FWD, 0), 0, a)
    builder.send(0, Node.U2, (FWD, 0), 0, b)
    with pytest.raises(ProtocolViolationError, match="never decodes"):
        compile_scheme(builder.build())


def test_strip_removes_own_bits():
    builder = SchemeBuilder("strip", 1, [(1, 0)], [])
    a = builder.fresh(Node.U1, "a", 0)
    b = builder.fresh(Node.U2, "b", 0)
    assert builder.strip(Node.U1, a ^ b) == b


@pytest.mark.parametrize("factor, rate", [
    ((1, 0), 2), ((0, 1), 0), ((1, 1), 1), ((2, 1), 2), ((3, 2), 4), ((1, 2), 2), ((2, 3), 3), ((4, 3), 5),
])
def test_code_layouts_reach_nonfeedback_capacity(factor, rate):
    assert code_layout(*factor).rate == rate


def test_received_symbols_of_2_1():
    layout = code_layout(2, 1)
    assert received_symbols(layout, 0) == [0b01, 0b10]


@pytest.mark.parametrize("factor, variant, masks", [
    ((2, 1), 0, ((0b10,), (0b10,))),
    ((3, 2), 0, ((0b10,), (0b10,))),
    ((1, 2), 0, ((), ())),
    ((1, 1), 0, ((), (0b1,))),
    ((2, 3), 0, ((), (0b11,))),
])
def test_relay_masks(factor, variant, masks):
    assert relay_masks(*factor, variant) == masks


def test_odd_variant_swaps_patterns():
    assert code_layout(1, 1, 1).users == ((-1,), (0,))
    assert code_layout(2, 3, 1).users == tuple(reversed(code_layout(2, 3).users))


@pytest.mark.parametrize("factor", [(7, 5), (10, 7), (5, 4), (9, 7)])
def test_central_codes_below_one_reach_nonfeedback_capacity(factor):
    layout = code_layout(*factor)
    assert layout.rate == c_no(*factor)
    for user in (0, 1):
        decoded = GF2Basis()
        for row in received_symbols(layout, user):
            decoded.add(row, 0)
        assert all(decoded.contains(1 << s) for s in range(layout.symbols(user)))


def test_seven_five_layout_leaves_middle_levels_idle():
    layout = code_layout(7, 5)
    assert layout.users == ((0, 1, 2, -1, 2, 3, 4), (0, 1, -1, -1, -1, 2, 3))
