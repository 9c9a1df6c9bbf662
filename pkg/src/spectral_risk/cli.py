"""Command line entry point.

Subcommands: compute a single measure, sweep a weight family across a
parameter grid, export a weight curve, validate a weight function, run a
replication convergence study against the converged value, and stress
subadditivity on random sample pairs.

Exit codes: 0 success, 1 usage or parameter errors, 2 unreadable or
ill-formed input data, 3 numerical failure.  Output is deterministic for
a fixed command line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, measures
from .distributions import constant, normal, read_loss_csv, standard_normal, uniform
from .errors import DataError, NumericalError
from .quadrature import QuadratureConfig, convergence_study, srm_converged
from .risk_aversion import WeightSpec, check_admissibility

__all__ = ["main", "build_parser"]

_COMPUTE_DEFAULT_N = 10_000_001
_SWEEP_DEFAULT_N = 100_001
_SUBADD_DEFAULT_N = 100_001


class _CliError(Exception):
    """Usage-level problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _add_source_args(sp):
    sp.add_argument(
        "--dist",
        default="standard-normal",
        choices=["standard-normal", "normal", "empirical", "constant", "uniform"],
        help="loss distribution (default standard-normal)",
    )
    sp.add_argument("--mean", type=float, default=0.0, help="mean for --dist normal")
    sp.add_argument("--sd", type=float, default=1.0, help="sd for --dist normal")
    sp.add_argument("--input", help="loss CSV for --dist empirical (one loss per line)")
    sp.add_argument("--value", type=float, help="loss level for --dist constant")
    sp.add_argument("--lo", type=float, help="lower bound for --dist uniform")
    sp.add_argument("--hi", type=float, help="upper bound for --dist uniform")


def _add_weight_args(sp):
    sp.add_argument(
        "--family", choices=["exponential", "power", "es", "flat"], help="weight family"
    )
    sp.add_argument("--a", type=float, help="exponential family parameter")
    sp.add_argument("--gamma", type=float, help="reciprocal of --a (give one of the two)")
    sp.add_argument("--c", type=float, help="power family parameter in (0, 1)")
    sp.add_argument("--alpha", type=float, help="confidence level for es / var")


def _add_quad_args(sp):
    sp.add_argument("--n", type=int, help="odd replication grid size (SRM_DEFAULT_N overrides the built-in default)")
    sp.add_argument("--scheme", choices=["replication", "converged"])
    sp.add_argument("--endpoint-policy", choices=["zero-endpoints", "clip-epsilon"])
    sp.add_argument("--epsilon", type=float, help="clip width for clip-epsilon (default 1e-9)")
    sp.add_argument("--rel-tol", type=float, help="relative tolerance for the converged scheme (default 1e-6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="srm", description="Spectral risk measure toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("compute", help="compute one risk measure")
    sp.add_argument("--measure", required=True, choices=["var", "es", "srm"])
    _add_source_args(sp)
    _add_weight_args(sp)
    _add_quad_args(sp)
    sp.add_argument("--precision", type=int, default=6, help="decimal places printed (default 6)")

    sp = sub.add_parser("sweep", help="sweep a weight family across a parameter grid")
    sp.add_argument("--family", required=True, choices=["exponential", "power", "es"])
    sp.add_argument("--grid", required=True, help="parameter grid as min:max:count")
    sp.add_argument("--log-grid", action="store_true", help="space the grid geometrically")
    _add_source_args(sp)
    _add_quad_args(sp)
    sp.add_argument("--out", required=True, help="CSV output path (param,value)")

    sp = sub.add_parser("weights", help="export weight function samples")
    _add_weight_args(sp)
    sp.add_argument("--points", type=int, default=1001, help="samples on [0, p-max] (default 1001)")
    sp.add_argument("--p-max", type=float, default=0.999, help="last probability sampled (default 0.999)")
    sp.add_argument("--out", required=True, help="CSV output path (p,weight)")

    sp = sub.add_parser("validate", help="check a weight function for admissibility")
    _add_weight_args(sp)
    sp.add_argument("--grid-size", type=int, default=2001, help="interior check points (default 2001)")
    sp.add_argument("--out", help="write the JSON report here instead of stdout")

    sp = sub.add_parser("convergence", help="replication values by grid size, against the converged value")
    _add_weight_args(sp)
    _add_source_args(sp)
    sp.add_argument("--n-list", required=True, help="comma-separated odd grid sizes")
    sp.add_argument("--endpoint-policy", choices=["zero-endpoints", "clip-epsilon"])
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--rel-tol", type=float)
    sp.add_argument("--out", required=True, help="CSV output path (n,value)")

    sp = sub.add_parser("subadd", help="stress subadditivity on random sample pairs")
    _add_weight_args(sp)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--sample-size", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, help="replication grid size per evaluation")
    sp.add_argument("--out", help="write the JSON report here instead of stdout")

    return parser


def _make_source(args):
    kind = args.dist
    if kind == "empirical":
        if not args.input:
            raise _CliError("--dist empirical needs --input")
        return read_loss_csv(args.input)
    try:
        if kind == "constant":
            if args.value is None:
                raise _CliError("--dist constant needs --value")
            return constant(args.value)
        if kind == "uniform":
            if args.lo is None or args.hi is None:
                raise _CliError("--dist uniform needs --lo and --hi")
            return uniform(args.lo, args.hi)
        if kind == "normal":
            return normal(args.mean, args.sd)
        return standard_normal()
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _make_spec(args) -> WeightSpec:
    family = args.family
    if family is None:
        raise _CliError("--family is required")
    try:
        if family == "exponential":
            return WeightSpec.exponential(a=args.a, gamma=args.gamma)
        if family == "power":
            if args.c is None:
                raise _CliError("--family power needs --c")
            return WeightSpec.power(args.c)
        if family == "es":
            if args.alpha is None:
                raise _CliError("--family es needs --alpha")
            return WeightSpec.es(args.alpha)
        return WeightSpec.flat()
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _resolve_n(args, default_n: int) -> int:
    n = getattr(args, "n", None)
    if n is not None:
        return n
    env = os.environ.get("SRM_DEFAULT_N")
    if env:
        try:
            return int(env)
        except ValueError:
            raise _CliError(f"SRM_DEFAULT_N is not an integer: {env!r}") from None
    return default_n


def _quad_flags_given(args) -> bool:
    return any(
        getattr(args, name, None) is not None
        for name in ("n", "scheme", "endpoint_policy", "epsilon", "rel_tol")
    )


def _make_config(args, default_n: int) -> QuadratureConfig:
    policy = getattr(args, "endpoint_policy", None) or "zero-endpoints"
    try:
        return QuadratureConfig(
            n_points=_resolve_n(args, default_n),
            endpoint_policy=policy.replace("-", "_"),
            epsilon=args.epsilon if getattr(args, "epsilon", None) is not None else 1e-9,
            scheme=getattr(args, "scheme", None) or "replication",
            rel_tol=args.rel_tol if getattr(args, "rel_tol", None) is not None else 1e-6,
        )
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _cmd_compute(args) -> int:
    source = _make_source(args)
    if args.measure == "var":
        if args.alpha is None:
            raise _CliError("--measure var needs --alpha")
        value = measures.var(source, args.alpha)
    elif args.measure == "es":
        if args.alpha is None:
            raise _CliError("--measure es needs --alpha")
        if _quad_flags_given(args):
            value = measures.es(source, args.alpha, _make_config(args, _COMPUTE_DEFAULT_N))
        else:
            value = measures.es(source, args.alpha)
    else:
        spec = _make_spec(args)
        value = measures.srm(source, spec, _make_config(args, _COMPUTE_DEFAULT_N))
    if args.precision < 0:
        raise _CliError("--precision must be non-negative")
    print(f"{value:.{args.precision}f}")
    return 0


def _parse_grid(text: str, log_grid: bool) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise _CliError("--grid must look like min:max:count")
    try:
        lo = float(parts[0])
        hi = float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise _CliError(f"bad --grid value: {text!r}") from None
    if count < 1:
        raise _CliError("--grid count must be at least 1")
    if count == 1:
        return [lo]
    if not lo < hi:
        raise _CliError("--grid needs min < max")
    if log_grid:
        if not lo > 0.0:
            raise _CliError("--log-grid needs min > 0")
        return [float(x) for x in np.geomspace(lo, hi, count)]
    return [float(x) for x in np.linspace(lo, hi, count)]


def _cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid, args.log_grid)
    source = _make_source(args)
    config = _make_config(args, _SWEEP_DEFAULT_N)
    result = analysis.sweep_srm(args.family, grid, source, config)
    analysis.sweep_to_csv(result, args.out)
    print(args.out)
    return 0


def _cmd_weights(args) -> int:
    spec = _make_spec(args)
    if args.points < 2:
        raise _CliError("--points must be at least 2")
    rows = analysis.weight_curve(spec, n_points=args.points, p_max=args.p_max)
    analysis.curve_to_csv(rows, args.out)
    print(args.out)
    return 0


def _cmd_validate(args) -> int:
    spec = _make_spec(args)
    if args.grid_size < 3:
        raise _CliError("--grid-size must be at least 3")
    report = check_admissibility(spec, grid_size=args.grid_size)
    payload = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(args.out)
    else:
        print(payload, end="")
    return 0


def _parse_n_list(text: str) -> list[int]:
    try:
        ns = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _CliError(f"bad --n-list value: {text!r}") from None
    if not ns:
        raise _CliError("--n-list must not be empty")
    return ns


def _cmd_convergence(args) -> int:
    spec = _make_spec(args)
    source = _make_source(args)
    ns = _parse_n_list(args.n_list)
    policy = (args.endpoint_policy or "zero-endpoints").replace("-", "_")
    epsilon = args.epsilon if args.epsilon is not None else 1e-9
    rel_tol = args.rel_tol if args.rel_tol is not None else 1e-6
    try:
        rows = convergence_study(source, spec, ns, endpoint_policy=policy, epsilon=epsilon)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    analysis.convergence_to_csv(rows, args.out)
    converged = srm_converged(source, spec, rel_tol=rel_tol)
    gap = rows[-1][1] - converged.value
    print(args.out)
    print(f"converged {converged.value:.6f}")
    print(f"gap {gap:.6f}")
    return 0


def _cmd_subadd(args) -> int:
    spec = _make_spec(args)
    config = QuadratureConfig(n_points=_resolve_n(args, _SUBADD_DEFAULT_N))
    report = analysis.subadditivity_check(
        spec,
        sample_size=args.sample_size,
        trials=args.trials,
        seed=args.seed,
        config=config,
    )
    payload = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(args.out)
    else:
        print(payload, end="")
    return 0


_COMMANDS = {
    "compute": _cmd_compute,
    "sweep": _cmd_sweep,
    "weights": _cmd_weights,
    "validate": _cmd_validate,
    "convergence": _cmd_convergence,
    "subadd": _cmd_subadd,
}


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse --help exits through here
        code = exc.code
        return 0 if code in (0, None) else int(code)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
