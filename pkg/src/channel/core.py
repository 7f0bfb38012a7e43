"""
Linear deterministic channel model
Shift-and-XOR transfer for one interference channel and the two-way slot structure
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeInt

from ..errors import InvalidArgumentError, InvalidSignalError

FWD = "fwd"
BWD = "bwd"


@dataclass(frozen=True)
class Ratio:
    """Exact ratio num/den; den == 0 gives +inf, 0/0 is the inactive value"""
    num: int
    den: int

    @property
    def is_inactive(self) -> bool:
        return self.num == 0 and self.den == 0

    @property
    def is_inf(self) -> bool:
        return self.den == 0 and self.num > 0

    @property
    def value(self) -> Optional[Fraction]:
        if self.den == 0:
            return None
        return Fraction(self.num, self.den)

    def __lt__(self, other: Fraction) -> bool:
        if self.den == 0:
            return False
        return Fraction(self.num, self.den) < other

    def __gt__(self, other: Fraction) -> bool:
        if self.is_inf:
            return True
        if self.den == 0:
            return False
        return Fraction(self.num, self.den) > other

    def __str__(self) -> str:
        if self.is_inactive:
            return "0/0"
        if self.is_inf:
            return "inf"
        return str(Fraction(self.num, self.den))


class ChannelParams(BaseModel):
    """The quadruple (n, m, ñ, m̃) of a two-way deterministic interference channel"""
    model_config = ConfigDict(frozen=True)

    n: NonNegativeInt
    m: NonNegativeInt
    n_b: NonNegativeInt
    m_b: NonNegativeInt

    @classmethod
    def of(cls, n: int, m: int, n_b: int, m_b: int) -> "ChannelParams":
        for value in (n, m, n_b, m_b):
            if int(value) < 0:
                raise InvalidArgumentError(f"channel levels must be nonnegative, got {value}")
        return cls(n=n, m=m, n_b=n_b, m_b=m_b)

    @property
    def q_f(self) -> int:
        return max(self.n, self.m)

    @property
    def q_b(self) -> int:
        return max(self.n_b, self.m_b)

    @property
    def alpha(self) -> Ratio:
        return Ratio(self.m, self.n)

    @property
    def alpha_b(self) -> Ratio:
        return Ratio(self.m_b, self.n_b)

    @property
    def gamma(self) -> Ratio:
        return Ratio(self.n_b, self.n)

    @property
    def forward(self) -> Tuple[int, int]:
        return (self.n, self.m)

    @property
    def backward(self) -> Tuple[int, int]:
        return (self.n_b, self.m_b)

    def swapped(self) -> "ChannelParams":
        return ChannelParams(n=self.n_b, m=self.m_b, n_b=self.n, m_b=self.m)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.n, self.m, self.n_b, self.m_b)

    def __str__(self) -> str:
        return f"({self.n},{self.m},{self.n_b},{self.m_b})"


@dataclass(frozen=True)
class SignalVector:
    """Bit column over GF(2); index 0 is the top level"""
    bits: Tuple[int, ...]

    def __post_init__(self):
        for bit in self.bits:
            if bit not in (0, 1):
                raise InvalidSignalError(f"signal entries must be 0 or 1, got {bit!r}")

    @classmethod
    def of(cls, bits: Iterable[int]) -> "SignalVector":
        return cls(tuple(int(b) for b in bits))

    @classmethod
    def zeros(cls, q: int) -> "SignalVector":
        return cls((0,) * q)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index):
        return self.bits[index]

    def __xor__(self, other: "SignalVector") -> "SignalVector":
        if len(self) != len(other):
            raise InvalidSignalError(f"cannot add signals of length {len(self)} and {len(other)}")
        return SignalVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)


def transfer(x_direct: SignalVector, x_cross: SignalVector, n: int, m: int) -> SignalVector:
    """Reception at one receiver: direct signal shifted down by q-n XOR cross signal shifted by q-m"""
    q = max(n, m)
    if len(x_direct) != q or len(x_cross) != q:
        raise InvalidSignalError(
            f"transfer on ({n},{m}) expects length {q}, got {len(x_direct)} and {len(x_cross)}"
        )
    out = [0] * q
    for i in range(q - n, q):
        out[i] ^= x_direct[i - (q - n)]
    for i in range(q - m, q):
        out[i] ^= x_cross[i - (q - m)]
    return SignalVector(tuple(out))


def visible_part(x: SignalVector, m: int) -> SignalVector:
    """Top m levels of x, the part seen at the interfered receiver"""
    if m < 0 or m > len(x):
        raise InvalidArgumentError(f"visible part of size {m} from a length-{len(x)} signal")
    return SignalVector(x.bits[:m])


def transfer_batch(x_direct: np.ndarray, x_cross: np.ndarray, n: int, m: int) -> np.ndarray:
    """transfer over the last axis of uint8 arrays shaped (..., q)"""
    q = max(n, m)
    if x_direct.shape[-1] != q or x_cross.shape[-1] != q:
        raise InvalidSignalError(
            f"transfer on ({n},{m}) expects last axis {q}, got {x_direct.shape} and {x_cross.shape}"
        )
    y = np.zeros(np.broadcast_shapes(x_direct.shape, x_cross.shape), dtype=np.uint8)
    y[..., q - n:] ^= x_direct[..., :n]
    y[..., q - m:] ^= x_cross[..., :m]
    return y


class Node(Enum):
    """The four terminals of the two-way channel"""
    U1 = "U1"
    U2 = "U2"
    U1T = "U1T"
    U2T = "U2T"

    @property
    def link(self) -> str:
        """Link this node transmits on"""
        return FWD if self in (Node.U1, Node.U2) else BWD

    @property
    def partner(self) -> "Node":
        """Other transmitter on the same link"""
        return {Node.U1: Node.U2, Node.U2: Node.U1, Node.U1T: Node.U2T, Node.U2T: Node.U1T}[self]

    @property
    def intended(self) -> "Node":
        """Receiver reached over the direct link"""
        return {Node.U1: Node.U1T, Node.U2: Node.U2T, Node.U1T: Node.U1, Node.U2T: Node.U2}[self]

    @property
    def label(self) -> str:
        return {Node.U1: "1", Node.U2: "2", Node.U1T: "1~", Node.U2T: "2~"}[self]


def two_way_slot(
    p: ChannelParams,
    x_u1: SignalVector,
    x_u2: SignalVector,
    x_u1t: SignalVector,
    x_u2t: SignalVector,
) -> Dict[Node, SignalVector]:
    """Receptions of all four nodes for one slot (forward phase then backward phase)"""
    return {
        Node.U1T: transfer(x_u1, x_u2, p.n, p.m),
        Node.U2T: transfer(x_u2, x_u1, p.n, p.m),
        Node.U1: transfer(x_u1t, x_u2t, p.n_b, p.m_b),
        Node.U2: transfer(x_u2t, x_u1t, p.n_b, p.m_b),
    }
