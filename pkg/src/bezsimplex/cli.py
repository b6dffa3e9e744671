"""Command line interface for convergence and bound experiments.

Subcommands write deterministic CSV to --out (or stdout) and a JSON
metadata line to stderr. Exit codes: 0 success, 2 bound violation, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bernstein import basis_vector
from .errors import BezSimplexError, ConfigError
from .experiments import (
    BOUND_CHECK_COLUMNS,
    CONVERGENCE_COLUMNS,
    EVALUATORS,
    SCALING_COLUMNS,
    emit_csv,
    load_config,
    run_bound_check,
    run_convergence,
    run_metadata,
    run_scaling_study,
)
from .lattice import control_points, enumerate_multi_indices
from .experiments import _load_simplex_spec


def _emit(rows, columns, out_path) -> None:
    if out_path:
        emit_csv(rows, out_path, columns)
    else:
        emit_csv(rows, sys.stdout, columns)


def _print_metadata(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _cmd_converge(args) -> int:
    config = load_config(args.config)
    if args.evaluator:
        config = config.with_evaluator(args.evaluator)
    rows = run_convergence(config)
    _emit(rows, CONVERGENCE_COLUMNS, args.out or config.output)
    meta = run_metadata(config)
    meta["wall_ms"] = [round(row.wall_ms, 3) for row in rows]
    _print_metadata(meta)
    return 0


def _cmd_bound_check(args) -> int:
    config = load_config(args.config)
    result = run_bound_check(config, margin=args.margin)
    _emit(result.rows, BOUND_CHECK_COLUMNS, args.out or config.output)
    meta = run_metadata(config)
    meta["margin"] = result.margin
    meta["passed"] = result.passed
    _print_metadata(meta)
    return 0 if result.passed else 2


def _cmd_scaling(args) -> int:
    config = load_config(args.config)
    single = config.function.single_exponential()
    if single is None:
        raise ConfigError("scaling study requires a single-exponential function")
    try:
        scales = [float(s) for s in args.scales.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"--scales: non-numeric entry in {args.scales!r}") from exc
    order = max(config.n_values)
    rows = run_scaling_study(
        config.simplex,
        single.terms[0].direction_array,
        order,
        config.grid_resolution,
        scales,
    )
    _emit(rows, SCALING_COLUMNS, args.out or config.output)
    meta = run_metadata(config)
    meta["scales"] = scales
    meta["order"] = order
    _print_metadata(meta)
    return 0


def _cmd_basis(args) -> int:
    simplex = _load_simplex_spec(args.simplex)
    try:
        point = np.array([float(v) for v in args.point.split(",")])
    except ValueError as exc:
        raise ConfigError(f"--point: non-numeric entry in {args.point!r}") from exc
    values = basis_vector(simplex, args.n, point)
    indices = enumerate_multi_indices(args.n, simplex.dimension)
    header = [f"k_{j}" for j in range(simplex.dimension + 1)] + ["basis_value"]
    rows = [tuple(k) + (v,) for k, v in zip(indices, values)]
    _emit(rows, header, args.out)
    return 0


def _cmd_control_points(args) -> int:
    simplex = _load_simplex_spec(args.simplex)
    cps = control_points(simplex, args.n)
    if args.out:
        cps.write_csv(args.out)
    else:
        cps.write_csv(sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bezsimplex",
        description="Bernstein-Bezier approximation experiments on simplices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    converge = sub.add_parser("converge", help="sup-error sweep over polynomial orders")
    converge.add_argument("--config", required=True, help="config JSON: path or inline object")
    converge.add_argument("--evaluator", choices=EVALUATORS, help="override config evaluator")
    converge.add_argument("--out", help="CSV output path (default stdout)")
    converge.set_defaults(handler=_cmd_converge)

    bound = sub.add_parser("bound-check", help="observed error vs first-order bound")
    bound.add_argument("--config", required=True)
    bound.add_argument("--margin", type=float, default=0.25,
                       help="allowed overshoot of the predicted bound (default 0.25)")
    bound.add_argument("--out")
    bound.set_defaults(handler=_cmd_bound_check)

    scaling = sub.add_parser("scaling", help="error growth with diameter and direction size")
    scaling.add_argument("--config", required=True)
    scaling.add_argument("--scales", required=True, help="comma-separated positive factors")
    scaling.add_argument("--out")
    scaling.set_defaults(handler=_cmd_scaling)

    basis = sub.add_parser("basis", help="print all basis values at a point")
    basis.add_argument("--simplex", required=True, help="simplex JSON: path or inline object")
    basis.add_argument("--n", type=int, required=True)
    basis.add_argument("--point", required=True, help="comma-separated coordinates")
    basis.add_argument("--out")
    basis.set_defaults(handler=_cmd_basis)

    cpoints = sub.add_parser("control-points", help="export the control point lattice")
    cpoints.add_argument("--simplex", required=True)
    cpoints.add_argument("--n", type=int, required=True)
    cpoints.add_argument("--out")
    cpoints.set_defaults(handler=_cmd_control_points)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except BezSimplexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
