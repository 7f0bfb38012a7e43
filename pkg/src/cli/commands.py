"""
Command-line interface
Subcommands: capacity, region, classify, decompose, simulate, sweep
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..capacity.formulas import (
    capacities, classify_interaction, classify_regime, corollary1_holds, feedback_gap, region,
)
from ..capacity.polytope import RatePair, RegionSpec, contains, rate_json, time_share
from ..channel.core import ChannelParams
from ..config import LabConfig
from ..decomposition.network import decompose, is_decomposable
from ..decomposition.planner import plan_scheme
from ..errors import (
    InfeasibleSchemeError, InvalidArgumentError, InvalidSignalError, InvalidTargetError, LabError,
    NotDecomposableError, PlanMismatchError, UnsupportedPlanError,
)
from ..schemes.catalogue import SchemeKind, entry_claim, entry_for
from ..simulator.critic import SimulationCritic, check_bounds, verify_zero_error
from ..simulator.executor import run
from .sweep import SweepGrid, sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_CERTIFICATION = 4

_INFEASIBLE = (InfeasibleSchemeError, InvalidTargetError, UnsupportedPlanError, NotDecomposableError, PlanMismatchError)


def _params(args: argparse.Namespace) -> ChannelParams:
    return ChannelParams.of(args.n, args.m, args.nb, args.mb)


def _emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, default=str))


def cmd_capacity(args: argparse.Namespace, config: LabConfig) -> int:
    cpf, cno, cpf_b, cno_b = capacities(_params(args))
    if args.json:
        _emit({"c_pf": cpf, "c_no": cno, "c_pf_bwd": cpf_b, "c_no_bwd": cno_b})
    else:
        print(f"c_pf={cpf} c_no={cno} c_pf~={cpf_b} c_no~={cno_b}")
    return EXIT_OK


def cmd_region(args: argparse.Namespace, config: LabConfig) -> int:
    spec = region(_params(args))
    _emit({
        "constraints": [{"a": a, "b": b, "c": c} for a, b, c in spec.constraints],
        "vertices": [rate_json(v) for v in spec.vertices],
    })
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, config: LabConfig) -> int:
    p = _params(args)
    corollary = corollary1_holds(p)
    _emit({
        "params": list(p.as_tuple()),
        "regime": classify_regime(p).value,
        "interaction": classify_interaction(p).value,
        "corollary1": {"holds": corollary.holds, "case": corollary.case},
        "feedback_gap": {"fwd": feedback_gap(p.n, p.m), "bwd": feedback_gap(p.n_b, p.m_b)},
    })
    return EXIT_OK


def _direction(n: int, m: int) -> Dict[str, Any]:
    if not is_decomposable(n, m):
        return {"whole": [n, m], "factors": {f"({n},{m})": 1}, "levels": []}
    d = decompose(n, m)
    return {
        "factors": {f"({i},{j})": c for (i, j), c in sorted(d.counts().items())},
        "levels": [
            {"factor": list(item.factor), "tx_levels": list(item.tx_levels), "rx_levels": list(item.rx_levels)}
            for item in d.level_map
        ],
    }


def cmd_decompose(args: argparse.Namespace, config: LabConfig) -> int:
    fwd, bwd = _direction(args.n, args.m), _direction(args.nb, args.mb)
    if args.table:
        rows = [
            {"direction": name, "factor": item["factor"], "tx_levels": item["tx_levels"], "rx_levels": item["rx_levels"]}
            for name, side in (("fwd", fwd), ("bwd", bwd)) for item in side["levels"]
        ]
        print(pd.DataFrame(rows, columns=["direction", "factor", "tx_levels", "rx_levels"]).to_string(index=False))
    else:
        _emit({"fwd": fwd, "bwd": bwd})
    return EXIT_OK


def _scheme_params(pairs: Sequence[str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise InvalidArgumentError(f"--param expects key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _share(text: str) -> Tuple[RatePair, Optional[Fraction]]:
    """'R,R~' or 'R,R~@w' with an exact weight w"""
    point, sep, weight = text.partition("@")
    if not sep:
        return RatePair.parse(point), None
    try:
        return RatePair.parse(point), Fraction(weight.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgumentError(f"cannot parse time-sharing weight in {text!r}") from exc


def _certify_vertex(p: ChannelParams, spec: RegionSpec, target: RatePair, run_args: Dict[str, Any]):
    """Plan, run and critique one vertex: (payload, passed, claimed, achieved)"""
    plan = plan_scheme(p, target, L=run_args["L"])
    report = run(
        plan, p, run_args["blocks"], run_args["seed"], trace=run_args["trace"], trace_slots=run_args["trace_slots"],
    )
    critique = SimulationCritic().critique(report, spec, plan)
    payload = {
        "target": rate_json(target),
        "plan": plan.describe(),
        "claimed": rate_json(plan.claimed_rate()),
        "report": report.to_json(),
        "certification": {
            "zero_error": verify_zero_error(report),
            "bounds": check_bounds(report, spec),
            "passed": critique.passed,
            "gap": [str(g) for g in critique.gap] if critique.gap else None,
            "issues": critique.issues,
        },
    }
    return payload, critique.passed, plan.claimed_rate(), report.achieved


def _time_shared(p: ChannelParams, spec: RegionSpec, shares: List[Tuple[RatePair, Optional[Fraction]]],
                 run_args: Dict[str, Any]) -> int:
    """Certify each vertex plan, then the weighted mix of their claimed and achieved rates"""
    weights = [w for _, w in shares]
    if all(w is None for w in weights):
        weights = [Fraction(1, len(shares))] * len(shares)
    elif any(w is None for w in weights):
        raise InvalidArgumentError("give a weight to every --vertex or to none of them")
    target = time_share([t for t, _ in shares], weights)
    runs, claimed, achieved = [], [], []
    passed = True
    for (vertex, _), weight in zip(shares, weights):
        payload, ok, claim, got = _certify_vertex(p, spec, vertex, run_args)
        payload["weight"] = str(weight)
        runs.append(payload)
        claimed.append(claim)
        achieved.append(got)
        passed = passed and ok
    mixed = time_share(achieved, weights)
    bounds = contains(spec, mixed)
    _emit({
        "params": list(p.as_tuple()),
        "target": rate_json(target),
        "shares": runs,
        "claimed": rate_json(time_share(claimed, weights)),
        "achieved": rate_json(mixed),
        "certification": {
            "zero_error": all(r["certification"]["zero_error"] for r in runs),
            "bounds": bounds,
            "passed": passed and bounds,
        },
    })
    return EXIT_OK if passed and bounds else EXIT_CERTIFICATION


def cmd_simulate(args: argparse.Namespace, config: LabConfig) -> int:
    p = _params(args)
    L = args.L if args.L is not None else config.default_L
    blocks = args.blocks if args.blocks is not None else config.default_blocks
    seed = args.seed if args.seed is not None else config.seed
    spec = region(p)

    if args.scheme:
        try:
            kind = SchemeKind(args.scheme.upper())
        except ValueError as exc:
            raise InvalidArgumentError(f"unknown scheme kind {args.scheme!r}") from exc
        params = _scheme_params(args.param)
        params.setdefault("L", L)
        entry = entry_for(kind, params)
        report = run(entry, p, blocks, seed, trace=args.trace, trace_slots=config.trace_slots)
        payload = {
            "params": list(p.as_tuple()),
            "scheme": entry.describe(),
            "claimed": rate_json(entry_claim(entry)),
            "report": report.to_json(),
        }
        zero_error, bounds = verify_zero_error(report), check_bounds(report, spec)
        payload["certification"] = {"zero_error": zero_error, "bounds": bounds, "issues": []}
        _emit(payload)
        return EXIT_OK if zero_error and bounds else EXIT_CERTIFICATION

    if not args.vertex:
        raise InvalidArgumentError("simulate needs --vertex R,R~ or --scheme KIND")
    shares = [_share(text) for text in args.vertex]
    run_args = {"L": L, "blocks": blocks, "seed": seed, "trace": args.trace, "trace_slots": config.trace_slots}
    if len(shares) > 1:
        return _time_shared(p, spec, shares, run_args)
    target, weight = shares[0]
    if weight is not None and weight != 1:
        raise InvalidArgumentError(f"a single --vertex must carry weight 1, got {weight}")
    payload, passed, _, _ = _certify_vertex(p, spec, target, run_args)
    _emit({"params": list(p.as_tuple()), **payload})
    return EXIT_OK if passed else EXIT_CERTIFICATION


def cmd_sweep(args: argparse.Namespace, config: LabConfig) -> int:
    grid = SweepGrid(
        gamma=args.gamma, alpha_step=args.step, alpha_max=args.max,
        base_n=args.base_n if args.base_n is not None else config.base_n,
    )
    workers = args.workers if args.workers is not None else config.workers
    frame = sweep(grid, workers=workers)
    if args.out:
        frame.to_csv(args.out, index=False)
        logger.info("wrote %d rows to %s", len(frame), args.out)
    else:
        frame.to_csv(sys.stdout, index=False)
    return EXIT_OK


def _add_channel(parser: argparse.ArgumentParser) -> None:
    for name in ("n", "m", "nb", "mb"):
        parser.add_argument(name, type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twic", description="Two-way linear deterministic interference channel lab")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="perfect-feedback and nonfeedback sum capacities")
    _add_channel(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_capacity)

    p = sub.add_parser("region", help="capacity region constraints and vertices")
    _add_channel(p)
    p.set_defaults(handler=cmd_region)

    p = sub.add_parser("classify", help="regime, interaction class and perfect-feedback test")
    _add_channel(p)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("decompose", help="elementary subchannels and their levels")
    _add_channel(p)
    p.add_argument("--table", action="store_true", help="print the level map as a table")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("simulate", help="plan a vertex or run one scheme, then certify it")
    _add_channel(p)
    target = p.add_mutually_exclusive_group()
    target.add_argument(
        "--vertex", action="append",
        help="region vertex as R,R~ (fractions allowed); repeat as R,R~@w to time-share vertices with weights w",
    )
    target.add_argument("--scheme", help="catalogue kind, e.g. SCHEME1")
    p.add_argument("--param", action="append", default=[], help="scheme parameter key=value (i, j, k, L, gain, ...)")
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("sweep", help="classify an (α, α̃) grid into CSV")
    p.add_argument("--gamma", required=True)
    p.add_argument("--step", required=True)
    p.add_argument("--max", required=True)
    p.add_argument("--base-n", dest="base_n", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None, config: Optional[LabConfig] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config or LabConfig.from_env()
    config.configure_logging(args.verbose)
    try:
        return args.handler(args, config)
    except _INFEASIBLE as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidArgumentError, InvalidSignalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
