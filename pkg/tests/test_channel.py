import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.channel.core import (
    BWD, FWD, ChannelParams, Node, SignalVector, transfer, transfer_batch, two_way_slot, visible_part,
)
from src.errors import InvalidArgumentError, InvalidSignalError


def test_transfer_shifts_direct_and_cross():
    y = transfer(SignalVector.of([1, 0]), SignalVector.of([1, 1]), 2, 1)
    assert y.to_string() == "11"


def test_transfer_cross_only_link():
    y = transfer(SignalVector.of([0]), SignalVector.of([1]), 0, 1)
    assert y.to_string() == "1"


def test_transfer_rejects_wrong_length():
    with pytest.raises(InvalidSignalError):
        transfer(SignalVector.of([1]), SignalVector.of([1, 0]), 2, 1)


def test_signal_rejects_non_binary():
    with pytest.raises(InvalidSignalError):
        SignalVector.of([0, 2])


def test_visible_part_takes_top_levels():
    assert visible_part(SignalVector.of([1, 0, 1]), 2).to_string() == "10"
    with pytest.raises(InvalidArgumentError):
        visible_part(SignalVector.of([1]), 2)


def test_negative_levels_rejected():
    with pytest.raises(InvalidArgumentError):
        ChannelParams.of(2, -1, 1, 1)


def test_ratios_and_swap():
    p = ChannelParams.of(0, 1, 4, 2)
    assert p.alpha.is_inf
    assert str(p.alpha_b) == "1/2"
    assert p.gamma.is_inf
    assert ChannelParams.of(0, 0, 1, 1).alpha.is_inactive
    assert p.swapped().as_tuple() == (4, 2, 0, 1)


def test_node_roles():
    assert Node.U1.link == FWD
    assert Node.U2T.link == BWD
    assert Node.U1.partner is Node.U2
    assert Node.U2T.intended is Node.U2


def test_two_way_slot_routes_each_phase():
    p = ChannelParams.of(2, 1, 1, 2)
    out = two_way_slot(
        p,
        SignalVector.of([1, 0]), SignalVector.of([0, 1]),
        SignalVector.of([1, 0]), SignalVector.of([0, 0]),
    )
    assert out[Node.U1T].to_string() == "10"
    assert out[Node.U2T].to_string() == "00"
    # U1 hears U1T shifted down one level and nothing from U2T
    assert out[Node.U1].to_string() == "01"


bits = st.integers(min_value=0, max_value=1)


@given(
    n=st.integers(0, 5), m=st.integers(0, 5), data=st.data(),
)
def test_transfer_is_linear(n, m, data):
    q = max(n, m)
    vectors = [SignalVector.of(data.draw(st.lists(bits, min_size=q, max_size=q))) for _ in range(4)]
    a1, a2, b1, b2 = vectors
    left = transfer(a1 ^ a2, b1 ^ b2, n, m)
    right = transfer(a1, b1, n, m) ^ transfer(a2, b2, n, m)
    assert left == right


@given(n=st.integers(0, 5), m=st.integers(0, 5), seed=st.integers(0, 2**16))
def test_batch_matches_scalar_transfer(n, m, seed):
    q = max(n, m)
    rng = np.random.default_rng(seed)
    direct = rng.integers(0, 2, size=(3, q), dtype=np.uint8)
    cross = rng.integers(0, 2, size=(3, q), dtype=np.uint8)
    batch = transfer_batch(direct, cross, n, m)
    for row in range(3):
        expected = transfer(SignalVector.of(direct[row]), SignalVector.of(cross[row]), n, m)
        assert tuple(int(b) for b in batch[row]) == expected.bits


def _shift(q: int, k: int) -> np.ndarray:
    """q x q down-shift matrix raised to the k-th power"""
    return np.linalg.matrix_power(np.eye(q, k=-1, dtype=np.int64), k)


@pytest.mark.parametrize("n, m", [(n, m) for n in range(5) for m in range(5) if max(n, m) >= 1])
def test_transfer_matches_shift_matrices(n, m):
    q = max(n, m)
    direct, cross = _shift(q, q - n), _shift(q, q - m)
    for x1 in range(2 ** q):
        for x2 in range(2 ** q):
            a = np.array([(x1 >> i) & 1 for i in range(q)])
            b = np.array([(x2 >> i) & 1 for i in range(q)])
            expected = (direct @ a + cross @ b) % 2
            y = transfer(SignalVector.of(a), SignalVector.of(b), n, m)
            assert list(y.bits) == expected.tolist()
