"""
Feedback constructions over paired subchannels
Every builder is written in gain-direction roles: TX1/TX2 send on the gain link, RX1/RX2 answer
on the helper link. With gain on the backward link the helper phase of role slot t is the
forward phase of slot t+1, and the last helper phase wraps to slot 0.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..channel.core import BWD, FWD, Node
from ..errors import InfeasibleSchemeError
from .alignment import AlignedPlan
from .codes import code_layout, mask_levels, relay_masks
from .engine import LinearScheme, LinkId, SchemeBuilder
from .gf2 import GF2Basis, bits_of

logger = logging.getLogger(__name__)

Factor = Tuple[int, int]

G01 = "G01"
G21 = "G21"


@dataclass(frozen=True)
class Roles:
    gain: str

    @property
    def helper(self) -> str:
        return BWD if self.gain == FWD else FWD

    @property
    def tx(self) -> Tuple[Node, Node]:
        return (Node.U1, Node.U2) if self.gain == FWD else (Node.U1T, Node.U2T)

    @property
    def rx(self) -> Tuple[Node, Node]:
        return (Node.U1T, Node.U2T) if self.gain == FWD else (Node.U1, Node.U2)

    def helper_slot(self, t: int) -> int:
        return t if self.gain == FWD else t + 1

    def gain_link(self, k: int) -> LinkId:
        return (self.gain, k)

    def helper_link(self, k: int) -> LinkId:
        return (self.helper, k)

    def factors(self, gain_factors, helper_factors):
        """(fwd, bwd) factor lists"""
        if self.gain == FWD:
            return list(gain_factors), list(helper_factors)
        return list(helper_factors), list(gain_factors)


def stream(base: str, direction: str, index: int = 0) -> str:
    name = base + ("~" if direction == BWD else "")
    return name if index == 0 else f"{name}#{index}"


def variants(factors: Sequence[Factor]) -> List[int]:
    """(1,1) instances alternate which user owns the shared level"""
    out, ones = [], 0
    for factor in factors:
        if tuple(factor) == (1, 1):
            out.append(ones % 2)
            ones += 1
        else:
            out.append(0)
    return out


def extract(builder: SchemeBuilder, node: Node, rows: Sequence[int], target: int, junk: int) -> int:
    """
    Combination of received rows that node can form and that equals target outside junk.
    Rows are stripped of the node's own bits; raises InfeasibleSchemeError when target is out of reach.
    """
    stripped = [builder.strip(node, row) for row in rows]
    basis = GF2Basis()
    for i, row in enumerate(stripped):
        basis.add(row & ~junk, 1 << i)
    residual, combo = basis.reduce(builder.strip(node, target) & ~junk)
    if residual:
        raise InfeasibleSchemeError(f"{builder.name}: {node.value} cannot read a relayed bit")
    out = 0
    for i in bits_of(combo):
        out ^= stripped[i]
    return out


@dataclass(frozen=True)
class Service:
    """One helper resource that carries a form from RX_k to TX_k in one slot"""
    kind: str  # "hole" (relay mask) or "sub" (substituted symbol)
    factor: int
    user: int
    index: int


def helper_services(factors: Sequence[Factor], user: int, holes: bool, subs: bool) -> List[Service]:
    out: List[Service] = []
    kinds = variants(factors)
    if holes:
        for f, (factor, variant) in enumerate(zip(factors, kinds)):
            for index, _ in enumerate(relay_masks(factor[0], factor[1], variant)[user]):
                out.append(Service("hole", f, user, index))
    if subs:
        for f, (factor, variant) in enumerate(zip(factors, kinds)):
            for symbol in range(code_layout(factor[0], factor[1], variant).symbols(user)):
                out.append(Service("sub", f, user, symbol))
    return out


class HelperLayer:
    """Nonfeedback codes on the helper link, open to substitution and hole filling"""

    def __init__(self, builder: SchemeBuilder, roles: Roles, factors: Sequence[Factor], muted: bool):
        self.builder = builder
        self.roles = roles
        self.factors = list(factors)
        kinds = variants(self.factors)
        self.layouts = [code_layout(f[0], f[1], v) for f, v in zip(self.factors, kinds)]
        self.masks = [relay_masks(f[0], f[1], v) for f, v in zip(self.factors, kinds)]
        self.muted = muted
        self._placed: Dict[Tuple[int, Service], int] = {}

    def place(self, t: int, service: Service, form: int) -> None:
        self._placed[(t, service)] = form

    def silence(self, t: int, service: Service) -> None:
        """Leave a substitutable symbol empty in role slot t"""
        self._placed[(t, service)] = 0

    def emit(self, t: int) -> None:
        slot = self.roles.helper_slot(t)
        for f, layout in enumerate(self.layouts):
            link = self.roles.helper_link(f)
            for user in (0, 1):
                node = self.roles.rx[user]
                forms = []
                for symbol in range(layout.symbols(user)):
                    key = (t, Service("sub", f, user, symbol))
                    if key in self._placed:
                        forms.append(self._placed[key])
                    else:
                        name = stream("uv"[user], self.roles.helper, f)
                        forms.append(self.builder.fresh(node, name, t, symbol, muted=self.muted))
                for level, symbol in enumerate(layout.users[user]):
                    if symbol >= 0:
                        self.builder.send(slot, node, link, level, forms[symbol])
                for (placed_t, service), form in self._placed.items():
                    if placed_t == t and service.kind == "hole" and service.factor == f and service.user == user:
                        for level in mask_levels(self.masks[f][user][service.index]):
                            self.builder.send(slot, node, link, level, form)

    def delivered(self, t: int, service: Service, junk: int = 0) -> int:
        """Form TX_k rebuilds from the service used in role slot t, up to bits in junk"""
        node = self.roles.tx[service.user]
        rows = self.builder.received(self.roles.helper_slot(t), node, self.roles.helper_link(service.factor))
        return extract(self.builder, node, rows, self._placed[(t, service)], junk)


@dataclass(frozen=True)
class RelaySchedule:
    """How many relay gadgets start in even/odd slots and how many run as one-sided chains"""
    gadget: str
    pairs_even: int
    pairs_odd: int
    chains: Tuple[int, int]
    holes: Tuple[int, int]
    subs: Tuple[int, int]

    @property
    def count(self) -> int:
        return self.pairs_even + self.pairs_odd + sum(self.chains)

    @property
    def windowed(self) -> bool:
        return self.pairs_odd > 0 or any(self.chains)

    def load(self, parity: int, side: int) -> int:
        pairs = self.pairs_even if parity == 0 else self.pairs_odd
        return pairs + self.chains[side]

    @property
    def cost_per_two_slots(self) -> int:
        return sum(
            max(0, self.load(parity, side) - self.holes[side])
            for parity in (0, 1) for side in (0, 1)
        )


def relay_schedule(gadget: str, count: int, helper_factors: Sequence[Factor],
                   holes: bool, subs: bool) -> RelaySchedule:
    """Cheapest feasible gadget timing; unstaggered 2-slot timing wins ties"""
    hole_cap = tuple(
        len(helper_services(helper_factors, side, holes=holes and gadget == G01, subs=False))
        for side in (0, 1)
    )
    sub_cap = tuple(
        len(helper_services(helper_factors, side, holes=False, subs=subs)) for side in (0, 1)
    )
    best: Optional[Tuple[tuple, RelaySchedule]] = None
    for even, odd in product(range(count + 1), repeat=2):
        if even + odd > count:
            continue
        rest = count - even - odd
        for side0 in range(rest + 1):
            chains = (side0, rest - side0)
            if gadget == G21 and rest:
                continue
            schedule = RelaySchedule(gadget, even, odd, chains, hole_cap, sub_cap)
            if any(
                schedule.load(parity, side) > hole_cap[side] + sub_cap[side]
                for parity in (0, 1) for side in (0, 1)
            ):
                continue
            key = (schedule.cost_per_two_slots, int(schedule.windowed), rest, odd)
            if best is None or key < best[0]:
                best = (key, schedule)
    if best is None:
        raise InfeasibleSchemeError(
            f"{count} relay gadgets exceed helper capacity (holes {hole_cap}, symbols {sub_cap})",
            inequality=f"gadgets <= 2*min(per-side capacity) = {2 * min(h + s for h, s in zip(hole_cap, sub_cap))}",
        )
    return best[1]


def _span(schedule_windowed: bool, L: int) -> int:
    return 2 * L + 1 if schedule_windowed else 2


def build_relay(name: str, gain: str, gain_factors: Sequence[Factor], helper_factors: Sequence[Factor],
                schedule: RelaySchedule, L: int, mute: Sequence[str], holes: bool, subs: bool) -> LinearScheme:
    """Relay gadgets on (0,1) or (2,1) gain factors fed back through the helper codes"""
    roles = Roles(gain)
    T = _span(schedule.windowed, L)
    fwd, bwd = roles.factors(gain_factors, helper_factors)
    builder = SchemeBuilder(name, T, fwd, bwd)
    helper = HelperLayer(builder, roles, helper_factors, muted=roles.helper in mute)
    muted = gain in mute
    services = [
        helper_services(helper_factors, side, holes=holes and schedule.gadget == G01, subs=subs)
        for side in (0, 1)
    ]
    gadgets: List[Tuple[str, int]] = (
        [("pair", 0)] * schedule.pairs_even + [("pair", 1)] * schedule.pairs_odd
        + [("chain", 0)] * schedule.chains[0] + [("chain", 1)] * schedule.chains[1]
    )
    tx, rx = roles.tx, roles.rx
    pending: Dict[Tuple[int, int], Tuple[int, Service]] = {}

    def starts(kind: str, phase: int, t: int) -> bool:
        if kind != "pair":
            return False
        if not schedule.windowed:
            return t == 0
        return t % 2 == phase and t <= T - 2

    for t in range(T):
        # gain link
        for g, (kind, phase) in enumerate(gadgets):
            link = roles.gain_link(g)
            if schedule.gadget == G01:
                if kind == "pair" and starts(kind, phase, t):
                    builder.send(t, tx[0], link, 0, builder.fresh(tx[0], stream("a", gain, g), t, muted=muted))
                    builder.send(t, tx[1], link, 0, builder.fresh(tx[1], stream("b", gain, g), t, muted=muted))
                elif kind == "pair" and t >= 1 and starts(kind, phase, t - 1):
                    for side in (0, 1):
                        t0, service = pending.pop((g, side))
                        builder.send(t, tx[side], link, 0, helper.delivered(t0, service, builder.own[rx[1 - side]]))
                elif kind == "chain":
                    side = phase
                    if t <= T - 2:
                        source = tx[1 - side]
                        builder.send(t, source, link, 0,
                                     builder.fresh(source, stream("ab"[1 - side], gain, g), t, muted=muted))
                    if t >= 1:
                        t0, service = pending.pop((g, side))
                        builder.send(t, tx[side], link, 0, helper.delivered(t0, service, builder.own[rx[1 - side]]))
            else:
                if starts(kind, phase, t):
                    for user, (top, bottom) in enumerate((("A", "a"), ("B", "b"))):
                        builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted))
                        builder.send(t, tx[user], link, 1, builder.fresh(tx[user], stream(bottom, gain, g), t, 1, muted=muted))
                elif t >= 1 and starts(kind, phase, t - 1):
                    for side, (top, bottom) in enumerate((("A", "a"), ("B", "b"))):
                        t0, service = pending.pop((g, side))
                        other = builder.strip(tx[side], helper.delivered(t0, service))
                        builder.send(t, tx[side], link, 0, other)
                        builder.send(t, tx[side], link, 1,
                                     builder.fresh(tx[side], stream(bottom + "'", gain, g), t, 1, muted=muted))
                else:
                    for user, top in enumerate(("A", "B")):
                        builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted))

        # helper link: starting gadgets place their feedback
        cursor = [0, 0]
        for g, (kind, phase) in enumerate(gadgets):
            link = roles.gain_link(g)
            if kind == "pair" and starts(kind, phase, t):
                sides = (0, 1)
            elif kind == "chain" and t <= T - 2:
                sides = (phase,)
            else:
                continue
            for side in sides:
                service = services[side][cursor[side]]
                cursor[side] += 1
                level = 0 if schedule.gadget == G01 else 1
                helper.place(t, service, builder.received(t, rx[side], link)[level])
                pending[(g, side)] = (t, service)
        if schedule.windowed and t == T - 1:
            # no gadget starts here; the symbols that carry feedback in the busier parity stay empty
            for side in (0, 1):
                peak = max(schedule.load(parity, side) for parity in (0, 1))
                for service in services[side][:peak]:
                    if service.kind == "sub":
                        helper.silence(t, service)
        helper.emit(t)

    return builder.build()


def hosted_phases(i: int, j: int) -> Tuple[int, int]:
    even = i if i <= j else (i + 1) // 2
    return even, i - even


def build_hosted(name: str, gain: str, i: int, j: int, L: int, mute: Sequence[str]) -> LinearScheme:
    """(2,1) gain factors whose feedback rides on (1,2) hosts with interference neutralisation"""
    roles = Roles(gain)
    even, odd = hosted_phases(i, j)
    windowed = odd > 0
    T = _span(windowed, L)
    fwd, bwd = roles.factors([(2, 1)] * i, [(1, 2)] * j)
    builder = SchemeBuilder(name, T, fwd, bwd)
    tx, rx = roles.tx, roles.rx
    muted_gain, muted_help = gain in mute, roles.helper in mute
    gadgets = [(0, h) for h in range(even)] + [(1, h) for h in range(odd)]

    def starts(phase: int, t: int) -> bool:
        if not windowed:
            return t == 0
        return t % 2 == phase and t <= T - 2

    for t in range(T):
        for g, (phase, host) in enumerate(gadgets):
            link = roles.gain_link(g)
            if starts(phase, t):
                for user, (top, bottom) in enumerate((("A", "a"), ("B", "b"))):
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted_gain))
                    builder.send(t, tx[user], link, 1, builder.fresh(tx[user], stream(bottom, gain, g), t, 1, muted=muted_gain))
            elif t >= 1 and starts(phase, t - 1):
                host_link = roles.helper_link(host)
                for user, refined in enumerate(("A", "B")):
                    heard = builder.received(roles.helper_slot(t - 1), tx[user], host_link)
                    builder.send(t, tx[user], link, 0, heard[1])
                    fresh = builder.fresh(tx[user], stream(refined + "'", gain, g), t, 1, muted=muted_gain)
                    builder.send(t, tx[user], link, 1, builder.strip(tx[user], heard[0]) ^ fresh)
            else:
                for user, top in enumerate(("A", "B")):
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted_gain))

        slot = roles.helper_slot(t)
        for host in range(j):
            link = roles.helper_link(host)
            guest = next((g for g, (phase, h) in enumerate(gadgets) if h == host and starts(phase, t)), None)
            for user in (0, 1):
                own = builder.fresh(rx[user], stream("AB"[user], roles.helper, host), t, muted=muted_help)
                if guest is None:
                    builder.send(slot, rx[user], link, 0, own)
                    continue
                heard = builder.received(t, rx[user], roles.gain_link(guest))
                builder.send(slot, rx[user], link, 0, own ^ heard[1])
                builder.send(slot, rx[user], link, 1, heard[0])

    return builder.build()


def build_cross(name: str, gain: str, i: int, helpers: Sequence[Factor], L: int, mute: Sequence[str]) -> LinearScheme:
    """(2,1) gain factors fed back across (0,1) or (1,1) helpers, refined in the following slot"""
    roles = Roles(gain)
    j = len(helpers)
    even, odd = hosted_phases(i, j)
    windowed = odd > 0
    T = _span(windowed, L)
    fwd, bwd = roles.factors([(2, 1)] * i, helpers)
    builder = SchemeBuilder(name, T, fwd, bwd)
    tx, rx = roles.tx, roles.rx
    muted = gain in mute
    gadgets = [(0, h) for h in range(even)] + [(1, h) for h in range(odd)]
    own_bottom: Dict[Tuple[int, int], int] = {}

    def starts(phase: int, t: int) -> bool:
        if not windowed:
            return t == 0
        return t % 2 == phase and t <= T - 2

    for t in range(T):
        for g, (phase, helper) in enumerate(gadgets):
            link = roles.gain_link(g)
            if starts(phase, t):
                for user, (top, bottom) in enumerate((("A", "a"), ("B", "b"))):
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted))
                    low = builder.fresh(tx[user], stream(bottom, gain, g), t, 1, muted=muted)
                    own_bottom[(g, user)] = low
                    builder.send(t, tx[user], link, 1, low)
            elif t >= 1 and starts(phase, t - 1):
                for user, refined in enumerate(("A", "B")):
                    heard = builder.received(roles.helper_slot(t - 1), tx[user], roles.helper_link(helper))[0]
                    builder.send(t, tx[user], link, 0, own_bottom[(g, user)])
                    fresh = builder.fresh(tx[user], stream(refined + "'", gain, g), t, 1, muted=muted)
                    builder.send(t, tx[user], link, 1, builder.strip(tx[user], heard) ^ fresh)
            else:
                for user, top in enumerate(("A", "B")):
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, g), t, muted=muted))

        slot = roles.helper_slot(t)
        for g, (phase, helper) in enumerate(gadgets):
            if not starts(phase, t):
                continue
            for user in (0, 1):
                heard = builder.received(t, rx[user], roles.gain_link(g))
                builder.send(slot, rx[user], roles.helper_link(helper), 0, heard[1])

    return builder.build()


def build_refined(name: str, gain: str, count: int, helper_factors: Sequence[Factor], L: int,
                  mute: Sequence[str], serve: Callable, sources: Callable) -> LinearScheme:
    """
    Lag-3 skeleton for (2,1) gain gadgets in blocks of T = 2L + 2 slots.
    Each gain factor starts a gadget in every even slot up to T-4 and refines it three slots later.
    serve(builder, t, heard) writes the helper link of role slot t; sources(f, s, side) names the
    helper link and the role slots whose receptions carry gadget (f, s) to TX_side.
    """
    roles = Roles(gain)
    T = 2 * L + 2
    fwd, bwd = roles.factors([(2, 1)] * count, helper_factors)
    builder = SchemeBuilder(name, T, fwd, bwd)
    tx, rx = roles.tx, roles.rx
    muted = gain in mute
    bottoms: Dict[Tuple[int, int, int], int] = {}
    heard: Dict[Tuple[int, int], Tuple[Tuple[int, ...], Tuple[int, ...]]] = {}
    tops = 0

    def starts(t: int) -> bool:
        return t % 2 == 0 and t <= T - 4

    def delivered(f: int, s: int, side: int) -> int:
        link, slots = sources(f, s, side)
        rows = [
            row for slot in slots
            for row in builder.received(roles.helper_slot(slot), tx[side], roles.helper_link(link))
        ]
        junk = builder.own[rx[0]] | builder.own[rx[1]] | tops
        return extract(builder, tx[side], rows, bottoms[(f, s, 1 - side)], junk)

    for t in range(T):
        for f in range(count):
            link = roles.gain_link(f)
            if starts(t):
                for user, (top, bottom) in enumerate((("A", "a"), ("B", "b"))):
                    upper = builder.fresh(tx[user], stream(top, gain, f), t, muted=muted)
                    lower = builder.fresh(tx[user], stream(bottom, gain, f), t, 1, muted=muted)
                    tops |= upper
                    bottoms[(f, t, user)] = lower
                    builder.send(t, tx[user], link, 0, upper)
                    builder.send(t, tx[user], link, 1, lower)
            elif t >= 3 and starts(t - 3):
                s = t - 3
                got = [delivered(f, s, side) for side in (0, 1)]
                for side, refined in enumerate(("A'", "B'")):
                    # RX_side keeps its own helper bits; what remains of the top is its bottom
                    builder.send(t, tx[side], link, 0, bottoms[(f, s, side)] ^ (got[1 - side] & builder.own[rx[side]]))
                    fresh = builder.fresh(tx[side], stream(refined, gain, f), t, 1, muted=muted)
                    builder.send(t, tx[side], link, 1, fresh ^ got[side])
            else:
                for user, top in enumerate(("A", "B")):
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(top, gain, f), t, muted=muted))
        if starts(t):
            for f in range(count):
                link = roles.gain_link(f)
                heard[(f, t)] = (builder.received(t, rx[0], link), builder.received(t, rx[1], link))
        serve(builder, t, heard)

    return builder.build()


def build_aligned(name: str, gain: str, count: int, helper_factor: Factor, plan: AlignedPlan,
                  L: int, mute: Sequence[str]) -> LinearScheme:
    """(2,1) gain factors fed back through one whole helper code by aligned level masks"""
    roles = Roles(gain)
    n, m = helper_factor
    T = 2 * L + 2
    muted_help = roles.helper in mute
    link = roles.helper_link(0)

    def live(t: int, age: int) -> Optional[int]:
        s = t - age
        return s if 0 <= s <= T - 4 and s % 2 == 0 else None

    def serve(builder: SchemeBuilder, t: int, heard) -> None:
        parity = t % 2
        slot_plan = plan.slots[parity]
        layout = code_layout(n, m, parity)
        levels = [[0] * layout.q for _ in (0, 1)]
        for user in (0, 1):
            for symbol in range(layout.symbols(user)):
                if (user, symbol) in slot_plan.muted:
                    continue
                form = builder.fresh(roles.rx[user], stream("uv"[user], roles.helper), t, symbol, muted=muted_help)
                for level, used in enumerate(layout.users[user]):
                    if used == symbol:
                        levels[user][level] ^= form
        gadgets = plan.gadgets(parity)
        for d in slot_plan.deliveries:
            f, age, _ = gadgets[d.gadget]
            s = live(t, age)
            if s is None:
                continue
            got = heard[(f, s)]
            for level in mask_levels(d.relay):
                levels[1 - d.side][level] ^= got[1 - d.side][1]
            for level in mask_levels(d.guard):
                levels[d.side][level] ^= got[d.side][0]
        for user in (0, 1):
            for level, form in enumerate(levels[user]):
                if form:
                    builder.send(roles.helper_slot(t), roles.rx[user], link, level, form)

    def sources(f: int, s: int, side: int):
        return 0, [s + plan.offsets[f][side]]

    return build_refined(name, gain, count, [helper_factor], L, mute, serve, sources)


def build_resolved(name: str, gain: str, count: int, L: int, mute: Sequence[str]) -> LinearScheme:
    """
    (2,1) gain factors, each fed back over its own (1,1) helper across two helper slots.
    First slot: both helper users add a fresh symbol to the bottom they heard. Second slot: RX_1
    repeats its top, RX_2 resends its symbol with both heard levels, and each TX separates its
    helper symbol from the partner's bottom.
    """
    roles = Roles(gain)
    T = 2 * L + 2
    helpers = [(1, 1)] * count
    muted_help = roles.helper in mute
    owners = variants(helpers)
    kept: Dict[int, int] = {}
    rx = roles.rx

    def starts(t: int) -> bool:
        return t % 2 == 0 and t <= T - 4

    def serve(builder: SchemeBuilder, t: int, heard) -> None:
        slot = roles.helper_slot(t)
        for f in range(count):
            link = roles.helper_link(f)
            if starts(t):
                first, second = heard[(f, t)]
                own = builder.fresh(rx[0], stream("u", roles.helper, f), t, muted=muted_help)
                kept[f] = builder.fresh(rx[1], stream("v", roles.helper, f), t, muted=muted_help)
                builder.send(slot, rx[0], link, 0, own ^ first[1])
                builder.send(slot, rx[1], link, 0, kept[f] ^ second[1])
            elif t >= 1 and starts(t - 1):
                first, second = heard[(f, t - 1)]
                builder.send(slot, rx[0], link, 0, first[0])
                builder.send(slot, rx[1], link, 0, kept[f] ^ second[0] ^ second[1])
            else:
                owner = owners[f]
                builder.send(slot, rx[owner], link, 0,
                             builder.fresh(rx[owner], stream("uv"[owner], roles.helper, f), t, muted=muted_help))

    def sources(f: int, s: int, side: int):
        return f, [s, s + 1]

    return build_refined(name, gain, count, helpers, L, mute, serve, sources)


def build_retrospective(name: str, gain: str, pairs: int, L: int, mute: Sequence[str]) -> LinearScheme:
    """
    Two-stage scheme on (2,1) gain / (0,1) helper pairs.
    Stage I forwards fresh symbols XOR-ed with feedback for L slots, one ignition slot follows,
    and stage II refines stage-I slot k at slot 2L+1-k using symbols decoded one slot earlier.
    """
    roles = Roles(gain)
    T = 2 * L + 1
    fwd, bwd = roles.factors([(2, 1)] * pairs, [(0, 1)] * pairs)
    builder = SchemeBuilder(name, T, fwd, bwd)
    tx, rx = roles.tx, roles.rx
    muted_gain, muted_help = gain in mute, roles.helper in mute
    tops, bottoms = ("A", "B"), ("a", "b")

    carry = [[{1: 0} for _ in (0, 1)] for _ in range(pairs)]   # carry[p][user][i]
    low: List[List[Dict[int, int]]] = [[{} for _ in (0, 1)] for _ in range(pairs)]
    heard: List[List[Dict[int, int]]] = [[{} for _ in (0, 1)] for _ in range(pairs)]
    back_own: List[List[Dict[int, int]]] = [[{} for _ in (0, 1)] for _ in range(pairs)]

    for t in range(T):
        for p in range(pairs):
            link = roles.gain_link(p)
            for user in (0, 1):
                if t < L:
                    i = t + 1
                    builder.send(t, tx[user], link, 0, builder.fresh(tx[user], stream(tops[user], gain, p), t, muted=muted_gain))
                    fresh = builder.fresh(tx[user], stream(bottoms[user], gain, p), t, 1, muted=muted_gain)
                    low[p][user][i] = fresh
                    builder.send(t, tx[user], link, 1, fresh ^ carry[p][user][i])
                elif t == L:
                    builder.send(t, tx[user], link, 1, carry[p][user][L + 1])
                else:
                    j = t - L
                    k = L + 1 - j
                    refined = builder.fresh(tx[user], stream(tops[user] + "'", gain, p), t, 1, muted=muted_gain)
                    builder.send(t, tx[user], link, 0, low[p][user][k] ^ back_own[p][user][k])
                    builder.send(t, tx[user], link, 1, refined ^ carry[p][user][k + 1])

        slot = roles.helper_slot(t)
        for p in range(pairs):
            link, back = roles.gain_link(p), roles.helper_link(p)
            for user in (0, 1):
                node = rx[user]
                if t < L:
                    i = t + 1
                    bottom = builder.received(t, node, link)[1]
                    heard[p][user][i] = bottom
                    own = builder.fresh(node, stream(bottoms[user], roles.helper, p), t, muted=muted_help)
                    back_own[p][user][i] = own
                    builder.send(slot, node, back, 0, builder.strip(node, bottom) ^ own)
                elif t == L:
                    bottom = builder.received(t, node, link)[1]
                    builder.send(slot, node, back, 0, builder.strip(node, bottom))
                else:
                    k = 2 * L + 1 - t
                    if k > 1:
                        builder.send(slot, node, back, 0, builder.strip(node, heard[p][user][k] ^ low[p][user][k]))

        if t < L:
            # what crosses back to TX_k this slot becomes its carry for the next stage-I slot
            for p in range(pairs):
                for user in (0, 1):
                    got = builder.received(slot, tx[user], roles.helper_link(p))[0]
                    carry[p][user][t + 2] = builder.strip(tx[user], got)

    return builder.build()


def build_nonfeedback(name: str, fwd: Sequence[Factor], bwd: Sequence[Factor], mute: Sequence[str]) -> LinearScheme:
    """Each factor runs its own nonfeedback code with fresh symbols every slot"""
    builder = SchemeBuilder(name, 1, list(fwd), list(bwd))
    for direction, factors in ((FWD, fwd), (BWD, bwd)):
        senders = Roles(direction).tx
        for f, (factor, variant) in enumerate(zip(factors, variants(factors))):
            layout = code_layout(factor[0], factor[1], variant)
            for user in (0, 1):
                forms = [
                    builder.fresh(senders[user], stream("uv"[user], direction, f), 0, s, muted=direction in mute)
                    for s in range(layout.symbols(user))
                ]
                for level, symbol in enumerate(layout.users[user]):
                    if symbol >= 0:
                        builder.send(0, senders[user], (direction, f), level, forms[symbol])
    return builder.build()
