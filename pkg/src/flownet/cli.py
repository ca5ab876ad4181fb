"""Command line entry point: ``flownet <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .exceptions import FlownetError, InvalidNetworkError, OptimizationError, SolverError
from .experiments import (brute_force_minimize, format_checks, run_paper_examples,
                          sweep_two_edge)
from .kirchhoff import solve_kirchhoff
from .network import validate_network
from .optimizer import OptimizeConfig, optimize
from .topology import analyze


def _default_seed() -> int:
    raw = os.environ.get("FLOWNET_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InvalidNetworkError([f"FLOWNET_SEED must be an integer, got {raw!r}"])


def _emit(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _network(path):
    net = io.load_network(path)
    validate_network(net).raise_if_invalid()
    return net


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def cmd_solve(args):
    net = _network(args.network)
    kappa = io.read_conductances(args.conductances, net.n_edges)
    state = solve_kirchhoff(net, kappa)
    _emit(io.flows_csv(net, state.flows), args.flows)
    if args.pressures is not None:
        _emit(io.pressures_csv(state.pressures), args.pressures)
    return 0


def cmd_optimize(args):
    net = _network(args.network)
    cfg = OptimizeConfig(
        objective=args.objective,
        mode=args.mode,
        material=args.material if args.mode == "constraint" else None,
        penalty_coeff=args.penalty_coeff,
        max_iters=args.max_iters,
        rel_tol=args.tol,
        restarts=args.restarts,
        rng_seed=args.seed,
    )
    result = optimize(net, cfg)
    _emit(io.result_json(result), args.output)
    if args.trace is not None:
        _emit(io.trace_csv(result.trace), args.trace)
    return 0


def cmd_analyze(args):
    net = _network(args.network)
    kappa = io.read_conductances(args.conductances, net.n_edges)
    state = solve_kirchhoff(net, kappa)
    report = analyze(net, kappa, state)
    _emit(io.dumps(io._jsonable(report.to_dict())), args.output)
    return 0


def cmd_sweep(args):
    if args.log_range is not None:
        lo, hi, n = args.log_range
        K = list(np.logspace(lo, hi, int(n)))
    else:
        K = args.K
    if not K or any(k <= 0 for k in K):
        raise InvalidNetworkError(["sweep needs positive K values"])
    _emit(io.sweep_csv(sweep_two_edge(K)), args.output)
    return 0


def cmd_oracle(args):
    net = _network(args.network)
    res = brute_force_minimize(net, args.material, args.objective, args.grid_steps)
    doc = {"conductances": res.kappa, "shares": res.shares, "objective": res.objective,
           "material": args.material, "material_squared": args.material ** 2,
           "evaluated": res.evaluated, "skipped": res.skipped}
    _emit(io.dumps(io._jsonable(doc)), args.output)
    return 0


def cmd_paper_examples(args):
    checks = run_paper_examples(restarts=args.restarts, seed=args.seed)
    _emit(format_checks(checks) + "\n", args.output)
    return 0 if all(c.passed for c in checks) else 3


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1 like every other input error
    def error(self, message):
        raise ValueError(f"{self.prog}: {message}")


def build_parser(seed: int) -> argparse.ArgumentParser:
    parser = _Parser(prog="flownet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve Kirchhoff flows for given conductances")
    p.add_argument("network")
    p.add_argument("--conductances", required=True, help="CSV with columns edge_index,kappa")
    p.add_argument("--flows", default=None, help="flows CSV path (default stdout)")
    p.add_argument("--pressures", default=None, help="pressures CSV path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("optimize", help="optimize conductances")
    p.add_argument("network")
    p.add_argument("--objective", choices=["dissipation", "complementary"], default="complementary")
    p.add_argument("--mode", choices=["constraint", "penalty"], default="constraint")
    p.add_argument("--material", type=float, default=1.0)
    p.add_argument("--penalty-coeff", type=float, default=None)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--output", default=None, help="result JSON path (default stdout)")
    p.add_argument("--trace", default=None, help="objective trace CSV path")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("analyze", help="topology certificates for given conductances")
    p.add_argument("network")
    p.add_argument("--conductances", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="two-edge even-split sweep over material K")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--K", type=_float_list, help="comma-separated K values")
    g.add_argument("--log-range", type=float, nargs=3, metavar=("LO", "HI", "N"),
                   help="N log-spaced values from 10**LO to 10**HI")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("paper-examples", help="run the worked examples and print a pass/fail table")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_paper_examples)

    p = sub.add_parser("oracle", help="brute-force grid minimum (at most 6 edges)")
    p.add_argument("network")
    p.add_argument("--material", type=float, default=1.0)
    p.add_argument("--objective", choices=["dissipation", "complementary"], default="dissipation")
    p.add_argument("--grid-steps", type=int, default=60)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    try:
        seed = _default_seed()
        parser = build_parser(seed)
        args = parser.parse_args(argv)
        return args.func(args)
    except (SolverError, OptimizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FlownetError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
