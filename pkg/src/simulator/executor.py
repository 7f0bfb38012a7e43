"""
Executor for scheme plans
Runs compiled node policies over the two-way channel with random messages and checks every decode
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..capacity.polytope import RatePair, rate_json
from ..channel.core import BWD, FWD, ChannelParams, Node, transfer_batch
from ..decomposition.network import direction_factors
from ..decomposition.planner import SchemePlan
from ..errors import InvalidArgumentError, PlanMismatchError
from ..schemes.catalogue import SchemeEntry, compile_entry
from ..schemes.engine import PHASE, SENDERS, CompiledScheme
from .trace import format_line

logger = logging.getLogger(__name__)

MAX_LISTED_ERRORS = 20


@dataclass(frozen=True)
class Fault:
    """Flip one transmitted bit of block `block` in the given plan entry"""
    entry: int
    slot: int
    node: Node
    level: int
    link: int = 0
    block: int = 0


@dataclass
class SimulationReport:
    """Result of one simulation run"""
    seed: int
    blocks: int
    slots_run: int
    fwd_bits_delivered: int
    bwd_bits_delivered: int
    error_count: int
    entries: List[Dict[str, Any]]
    errors: List[str]
    execution_log: List[Dict[str, Any]]
    trace: Optional[List[str]] = None

    @property
    def achieved(self) -> RatePair:
        return RatePair.of(
            Fraction(self.fwd_bits_delivered, self.slots_run),
            Fraction(self.bwd_bits_delivered, self.slots_run),
        )

    @property
    def success(self) -> bool:
        return self.error_count == 0 and not self.errors

    def to_json(self) -> Dict[str, Any]:
        out = {
            "seed": self.seed,
            "blocks": self.blocks,
            "slots_run": self.slots_run,
            "fwd_bits_delivered": self.fwd_bits_delivered,
            "bwd_bits_delivered": self.bwd_bits_delivered,
            "achieved": rate_json(self.achieved),
            "error_count": self.error_count,
            "entries": self.entries,
            "errors": self.errors,
        }
        if self.trace is not None:
            out["trace"] = self.trace
        return out


@dataclass
class _EntryOutcome:
    fwd_bits: int = 0
    bwd_bits: int = 0
    errors: int = 0
    messages: List[str] = field(default_factory=list)


def _xor_columns(values: np.ndarray, columns: Sequence[int]) -> np.ndarray:
    if not columns:
        return np.zeros(values.shape[0], dtype=np.uint8)
    return np.bitwise_xor.reduce(values[:, list(columns)], axis=1)


class SchemeExecutor:
    """Executes plan entries on orthogonal subchannels"""

    def __init__(self, trace: bool = False, trace_slots: int = 64):
        self.trace = trace
        self.trace_slots = trace_slots
        self.execution_log: List[Dict[str, Any]] = []
        self.trace_lines: List[str] = []

    def run(self, plan: Union[SchemePlan, SchemeEntry], p: ChannelParams, blocks: int, seed: int,
            fault: Optional[Fault] = None) -> SimulationReport:
        if blocks < 1:
            raise InvalidArgumentError(f"blocks must be positive, got {blocks}")
        entries = self._entries(plan, p)
        compiled = [compile_entry(entry) for entry in entries]
        span = math.lcm(*(c.slots for c in compiled)) if compiled else 1
        rng = np.random.default_rng(seed)
        self.execution_log = []
        self.trace_lines = []

        summaries: List[Dict[str, Any]] = []
        fwd = bwd = errors = 0
        listed: List[str] = []
        for index, (entry, scheme) in enumerate(zip(entries, compiled)):
            reps = blocks * span // scheme.slots
            entry_fault = fault if fault is not None and fault.entry == index else None
            outcome = self._run_entry(index, scheme, reps, rng, entry_fault)
            fwd += outcome.fwd_bits
            bwd += outcome.bwd_bits
            errors += outcome.errors
            listed.extend(outcome.messages)
            summaries.append({
                "entry": entry.describe(),
                "slots_per_block": scheme.slots,
                "blocks": reps,
                "fwd_bits": outcome.fwd_bits,
                "bwd_bits": outcome.bwd_bits,
                "errors": outcome.errors,
            })
            self.execution_log.append({
                "stage": "execution",
                "action": "entry_complete",
                "details": f"{entry.describe()}: {reps} blocks of {scheme.slots} slots, "
                           f"{outcome.fwd_bits}/{outcome.bwd_bits} bits, {outcome.errors} errors",
            })
            logger.info("entry %d %s: %d blocks, %d/%d bits, %d errors",
                        index, entry.kind.value, reps, outcome.fwd_bits, outcome.bwd_bits, outcome.errors)

        return SimulationReport(
            seed=seed,
            blocks=blocks,
            slots_run=blocks * span,
            fwd_bits_delivered=fwd,
            bwd_bits_delivered=bwd,
            error_count=errors,
            entries=summaries,
            errors=listed[:MAX_LISTED_ERRORS],
            execution_log=self.execution_log,
            trace=self.trace_lines if self.trace else None,
        )

    def _entries(self, plan: Union[SchemePlan, SchemeEntry], p: ChannelParams) -> List[SchemeEntry]:
        fwd = Counter(direction_factors(p.n, p.m))
        bwd = Counter(direction_factors(p.n_b, p.m_b))
        if isinstance(plan, SchemeEntry):
            used_f, used_b = Counter(plan.fwd_factors), Counter(plan.bwd_factors)
            if used_f - fwd or used_b - bwd:
                raise PlanMismatchError(f"{plan.describe()} does not fit the subchannels of {p}")
            return [plan]
        if plan.factor_counts(FWD) != fwd or plan.factor_counts(BWD) != bwd:
            raise PlanMismatchError(
                f"plan factors {dict(plan.factor_counts(FWD))}/{dict(plan.factor_counts(BWD))} "
                f"do not match the decomposition {dict(fwd)}/{dict(bwd)} of {p}"
            )
        return list(plan.entries)

    def _run_entry(self, index: int, compiled: CompiledScheme, reps: int,
                   rng: np.random.Generator, fault: Optional[Fault]) -> _EntryOutcome:
        scheme = compiled.scheme
        links = dict(scheme.links)
        messages = rng.integers(0, 2, size=(reps, len(scheme.variables)), dtype=np.uint8)

        held: Dict[Node, np.ndarray] = {}
        rx_columns: Dict[Node, Dict[Tuple[int, Any, int], int]] = defaultdict(dict)
        for node, policy in compiled.policies.items():
            values = np.zeros((reps, len(policy.items)), dtype=np.uint8)
            for column, item in enumerate(policy.items):
                if item.kind == "var":
                    values[:, column] = messages[:, item.var]
                else:
                    rx_columns[node][(item.slot, item.link, item.level)] = column
            held[node] = values

        steps: Dict[Tuple[int, int], list] = defaultdict(list)
        for policy in compiled.policies.values():
            for transmission in policy.transmissions:
                steps[(transmission.slot, transmission.phase)].append(transmission)

        for slot in range(scheme.slots):
            for phase, direction in ((PHASE[FWD], FWD), (PHASE[BWD], BWD)):
                sent: Dict[Tuple[Node, Any], np.ndarray] = {}
                for tr in steps.get((slot, phase), ()):
                    q = max(links[tr.link])
                    x = sent.setdefault((tr.node, tr.link), np.zeros((reps, q), dtype=np.uint8))
                    x[:, tr.level] = _xor_columns(held[tr.node], tr.items)
                if fault is not None and fault.slot == slot and fault.node.link == direction:
                    link = (direction, fault.link)
                    q = max(links[link])
                    x = sent.setdefault((fault.node, link), np.zeros((reps, q), dtype=np.uint8))
                    x[fault.block, fault.level] ^= 1
                    logger.warning("fault injected: entry %d slot %d %s level %d", index, slot, fault.node.value, fault.level)

                received: Dict[Node, List[List[int]]] = {}
                for link, (n, m) in sorted(links.items()):
                    if link[0] != direction:
                        continue
                    q = max(n, m)
                    for receiver, (direct, cross) in SENDERS.items():
                        if direct.link != direction:
                            continue
                        zeros = np.zeros((reps, q), dtype=np.uint8)
                        y = transfer_batch(sent.get((direct, link), zeros), sent.get((cross, link), zeros), n, m)
                        for level in range(q):
                            held[receiver][:, rx_columns[receiver][(slot, link, level)]] = y[:, level]
                        received.setdefault(receiver, []).append(list(y[0]))

                if self.trace and slot < self.trace_slots:
                    transmitted = {
                        node: [list(sent.get((node, link), np.zeros((reps, max(shape)), dtype=np.uint8))[0])
                               for link, shape in sorted(links.items()) if link[0] == direction]
                        for node in Node if node.link == direction
                    }
                    self.trace_lines.append(format_line(slot, phase, index, transmitted))
                    self.trace_lines.append(format_line(slot, phase, index, received, kind="rx"))

        outcome = _EntryOutcome()
        for recipe in compiled.decodes:
            variable = scheme.variables[recipe.var]
            decoded = _xor_columns(held[recipe.receiver], recipe.items)
            wrong = np.flatnonzero(decoded != messages[:, recipe.var])
            good = reps - len(wrong)
            if variable.direction == FWD:
                outcome.fwd_bits += good
            else:
                outcome.bwd_bits += good
            if len(wrong):
                outcome.errors += len(wrong)
                outcome.messages.append(
                    f"entry {index} block {int(wrong[0])}: {recipe.receiver.value} decoded "
                    f"{variable.owner.value}:{variable.label} wrongly ({len(wrong)} blocks)"
                )
        return outcome


def run(plan: Union[SchemePlan, SchemeEntry], p: ChannelParams, blocks: int = 1, seed: int = 0,
        trace: bool = False, fault: Optional[Fault] = None, trace_slots: int = 64) -> SimulationReport:
    """Simulate a plan (or one catalogue entry) for `blocks` common blocks"""
    return SchemeExecutor(trace=trace, trace_slots=trace_slots).run(plan, p, blocks, seed, fault)
