"""
Linear scheme engine
Schemes are written as GF(2) forms over message variables and compiled into per-node recipes
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..channel.core import BWD, FWD, Node
from ..errors import InvalidArgumentError, ProtocolViolationError
from .gf2 import GF2Basis, bits_of

logger = logging.getLogger(__name__)

Factor = Tuple[int, int]
LinkId = Tuple[str, int]

PHASE = {FWD: 0, BWD: 1}
PHASE_NAMES = ("fwd", "bwd")

# receiver -> (direct sender, cross sender)
SENDERS = {
    Node.U1T: (Node.U1, Node.U2),
    Node.U2T: (Node.U2, Node.U1),
    Node.U1: (Node.U1T, Node.U2T),
    Node.U2: (Node.U2T, Node.U1T),
}


def receives_on(node: Node) -> str:
    return BWD if node.link == FWD else FWD


@dataclass(frozen=True)
class Variable:
    """One message bit: owner, stream name, injection slot and level"""
    index: int
    owner: Node
    stream: str
    slot: int
    level: int

    @property
    def direction(self) -> str:
        return self.owner.link

    @property
    def label(self) -> str:
        return f"{self.stream}{self.slot + 1}" + (f".{self.level}" if self.level else "")


@dataclass(frozen=True)
class LinearScheme:
    """A finished symbolic scheme: links, variables and every transmitted form"""
    name: str
    slots: int
    links: Tuple[Tuple[LinkId, Factor], ...]
    variables: Tuple[Variable, ...]
    sends: Tuple[Tuple[Tuple[int, LinkId, Node], Tuple[int, ...]], ...]

    def link_shape(self, link: LinkId) -> Factor:
        return dict(self.links)[link]

    def transmitted(self, slot: int, node: Node, link: LinkId) -> Tuple[int, ...]:
        q = max(self.link_shape(link))
        return dict(self.sends).get((slot, link, node), (0,) * q)

    def received(self, slot: int, node: Node, link: LinkId) -> Tuple[int, ...]:
        return _receive(dict(self.sends), self.link_shape(link), slot, node, link)

    def bits(self, direction: str) -> int:
        return sum(1 for v in self.variables if v.direction == direction)

    def variable(self, label: str, owner: Optional[Node] = None) -> Variable:
        for v in self.variables:
            if v.label == label and (owner is None or v.owner == owner):
                return v
        raise KeyError(label)


def _receive(sends: Dict, shape: Factor, slot: int, node: Node, link: LinkId) -> Tuple[int, ...]:
    n, m = shape
    q = max(n, m)
    direct, cross = SENDERS[node]
    x_direct = sends.get((slot, link, direct), (0,) * q)
    x_cross = sends.get((slot, link, cross), (0,) * q)
    out = [0] * q
    for i in range(q - n, q):
        out[i] ^= x_direct[i - (q - n)]
    for i in range(q - m, q):
        out[i] ^= x_cross[i - (q - m)]
    return tuple(out)


class SchemeBuilder:
    """Collects fresh variables and transmissions slot by slot"""

    def __init__(self, name: str, slots: int, fwd_factors: Sequence[Factor], bwd_factors: Sequence[Factor]):
        if slots < 1:
            raise InvalidArgumentError("a scheme needs at least one slot")
        self.name = name
        self.slots = slots
        self.links: Dict[LinkId, Factor] = {}
        for k, factor in enumerate(fwd_factors):
            self.links[(FWD, k)] = tuple(factor)
        for k, factor in enumerate(bwd_factors):
            self.links[(BWD, k)] = tuple(factor)
        self.variables: List[Variable] = []
        self.own: Dict[Node, int] = {node: 0 for node in Node}
        self._sends: Dict[Tuple[int, LinkId, Node], List[int]] = {}

    def links_of(self, direction: str) -> List[LinkId]:
        return sorted(link for link in self.links if link[0] == direction)

    def q(self, link: LinkId) -> int:
        return max(self.links[link])

    def fresh(self, node: Node, stream: str, slot: int, level: int = 0, muted: bool = False) -> int:
        if muted:
            return 0
        index = len(self.variables)
        self.variables.append(Variable(index, node, stream, slot, level))
        self.own[node] |= 1 << index
        return 1 << index

    def send(self, slot: int, node: Node, link: LinkId, level: int, form: int) -> None:
        if link[0] != node.link:
            raise ProtocolViolationError(f"{node.value} cannot transmit on {link}", node.value, slot)
        if not 0 <= level < self.q(link):
            raise ProtocolViolationError(f"level {level} outside link {link}", node.value, slot)
        key = (slot % self.slots, link, node)
        levels = self._sends.setdefault(key, [0] * self.q(link))
        levels[level] ^= form

    def transmitted(self, slot: int, node: Node, link: LinkId) -> Tuple[int, ...]:
        return tuple(self._sends.get((slot % self.slots, link, node), [0] * self.q(link)))

    def received(self, slot: int, node: Node, link: LinkId) -> Tuple[int, ...]:
        if link[0] != receives_on(node):
            raise ProtocolViolationError(f"{node.value} does not receive on {link}", node.value, slot)
        sends = {key: tuple(value) for key, value in self._sends.items()}
        return _receive(sends, self.links[link], slot % self.slots, node, link)

    def strip(self, node: Node, form: int) -> int:
        """Remove the node's own message bits from a form"""
        return form & ~self.own[node]

    def build(self) -> LinearScheme:
        return LinearScheme(
            name=self.name,
            slots=self.slots,
            links=tuple(sorted(self.links.items())),
            variables=tuple(self.variables),
            sends=tuple(sorted(
                ((key, tuple(value)) for key, value in self._sends.items() if any(value)),
                key=lambda item: (item[0][0], item[0][1], item[0][2].value),
            )),
        )


@dataclass(frozen=True)
class Item:
    """A value a node holds: one of its message bits or one received level"""
    kind: str  # "var" or "rx"
    var: int = -1
    slot: int = -1
    link: Optional[LinkId] = None
    level: int = -1


@dataclass(frozen=True)
class Transmission:
    slot: int
    phase: int
    node: Node
    link: LinkId
    level: int
    items: Tuple[int, ...]


@dataclass(frozen=True)
class DecodeRecipe:
    var: int
    receiver: Node
    slot: int
    phase: int
    items: Tuple[int, ...]

    @property
    def deadline(self) -> Tuple[int, int]:
        return (self.slot, self.phase)


@dataclass(frozen=True)
class NodePolicy:
    """Deterministic linear map from a node's messages and reception history to its transmissions"""
    node: Node
    items: Tuple[Item, ...]
    transmissions: Tuple[Transmission, ...]


@dataclass(frozen=True)
class BlockSpec:
    slots_per_block: int
    fwd_bits_per_block: int
    bwd_bits_per_block: int
    decode_deadline: Dict[str, Tuple[int, int]] = field(default_factory=dict)


@dataclass(frozen=True)
class CompiledScheme:
    scheme: LinearScheme
    policies: Dict[Node, NodePolicy]
    decodes: Tuple[DecodeRecipe, ...]

    @property
    def slots(self) -> int:
        return self.scheme.slots

    @property
    def block_spec(self) -> BlockSpec:
        deadlines = {}
        for recipe in self.decodes:
            v = self.scheme.variables[recipe.var]
            deadlines[f"{v.owner.value}:{v.label}"] = recipe.deadline
        return BlockSpec(
            slots_per_block=self.scheme.slots,
            fwd_bits_per_block=self.scheme.bits(FWD),
            bwd_bits_per_block=self.scheme.bits(BWD),
            decode_deadline=deadlines,
        )

    def decode_of(self, var: int) -> DecodeRecipe:
        for recipe in self.decodes:
            if recipe.var == var:
                return recipe
        raise KeyError(var)


def compile_scheme(scheme: LinearScheme) -> CompiledScheme:
    """Check causality and decodability, and derive each node's recipes"""
    sends = dict(scheme.sends)
    links = dict(scheme.links)
    policies: Dict[Node, NodePolicy] = {}
    decodes: List[DecodeRecipe] = []

    for node in Node:
        items: List[Item] = []
        transmissions: List[Transmission] = []
        basis = GF2Basis()
        for v in scheme.variables:
            if v.owner == node:
                basis.add(1 << v.index, 1 << len(items))
                items.append(Item("var", var=v.index))
        pending = [v.index for v in scheme.variables if v.owner.intended == node]
        tx_links = sorted(link for link in links if link[0] == node.link)
        rx_links = sorted(link for link in links if link[0] == receives_on(node))
        tx_phase = PHASE[node.link]

        for slot in range(scheme.slots):
            for phase in (0, 1):
                if phase == tx_phase:
                    for link in tx_links:
                        for level, form in enumerate(sends.get((slot, link, node), ())):
                            if form == 0:
                                continue
                            residual, combo = basis.reduce(form)
                            if residual:
                                raise ProtocolViolationError(
                                    f"{scheme.name}: {node.value} cannot form level {level} of {link} "
                                    f"at slot {slot} from what it knows",
                                    node.value, slot,
                                )
                            transmissions.append(Transmission(slot, phase, node, link, level, tuple(bits_of(combo))))
                    continue
                for link in rx_links:
                    for level, form in enumerate(_receive(sends, links[link], slot, node, link)):
                        basis.add(form, 1 << len(items))
                        items.append(Item("rx", slot=slot, link=link, level=level))
                still = []
                for var in pending:
                    residual, combo = basis.reduce(1 << var)
                    if residual:
                        still.append(var)
                    else:
                        decodes.append(DecodeRecipe(var, node, slot, phase, tuple(bits_of(combo))))
                pending = still

        if pending:
            labels = ", ".join(scheme.variables[v].label for v in pending[:6])
            raise ProtocolViolationError(f"{scheme.name}: {node.value} never decodes {labels}", node.value)
        policies[node] = NodePolicy(node, tuple(items), tuple(transmissions))

    logger.debug("compiled %s: %d variables over %d slots", scheme.name, len(scheme.variables), scheme.slots)
    return CompiledScheme(scheme=scheme, policies=policies, decodes=tuple(decodes))
