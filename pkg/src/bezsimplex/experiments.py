"""Experiment runner: convergence sweeps, rate fits, bound checks, scaling.

Everything here reduces to the same loop: sample a function into a control
net, evaluate the net over a barycentric lattice grid, take the sup of the
pointwise error, and tabulate per order. The sup over the lattice is a
lower bound on the true sup norm; that is acceptable for rate measurement
and is recorded in the run metadata.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .bernstein import DEFAULT_EVALUATOR, DE_CASTELJAU, DIRECT, ControlNet, evaluate_at_weights
from .errors import ConfigError, InsufficientDataError, ZeroError
from .exponentials import ExpPolynomial, error_budget, relative_error_report
from .geometry import Simplex
from .lattice import control_points, default_grid_resolution, grid_weights

# Rows with sup_error below this are floating-point noise, not signal.
NOISE_FLOOR = 1e-13

# The first-order bound is asymptotic; violations are only flagged from here on.
BOUND_CHECK_MIN_ORDER = 40

EVALUATORS = (DIRECT, DE_CASTELJAU)

CONVERGENCE_COLUMNS = ("n", "sup_error", "sup_relative_error", "predicted_rel_error", "evaluator")
BOUND_CHECK_COLUMNS = ("n", "observed_rel_error", "predicted_rel_error", "ratio", "violation")
SCALING_COLUMNS = (
    "diameter_scale", "magnitude_scale", "diameter", "direction_norm", "n", "sup_relative_error",
)


@dataclass
class TestFunction:
    """A named target function with optional batch path and exponential terms."""

    name: str
    scalar: Callable
    batch: Callable | None = None
    exp_terms: ExpPolynomial | None = None

    def __call__(self, x) -> float:
        return float(self.scalar(np.asarray(x, dtype=float)))

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.batch is not None:
            return np.asarray(self.batch(pts), dtype=float)
        return np.array([float(self.scalar(p)) for p in pts])

    def single_exponential(self) -> ExpPolynomial | None:
        """The underlying term when this is one exponential with c != 0."""
        poly = self.exp_terms
        if poly is not None and len(poly) == 1 and poly.terms[0].coefficient != 0.0:
            return poly
        return None


def make_function(spec, simplex: Simplex) -> TestFunction:
    """Build a test function from a builtin name or exponential-polynomial JSON.

    Builtins: "const1", "affine:v_1,..,v_D,b", "abs" (distance to the
    centroid along a fixed diagonal direction), "runge" (1/(1+25 r^2), r the
    distance to the centroid). Anything else must be an exponential
    polynomial given as a dict, inline JSON, or a path to a .json file.
    """
    dim = simplex.dimension
    centroid = simplex.centroid
    poly: ExpPolynomial | None = None

    if isinstance(spec, ExpPolynomial):
        poly = spec
    elif isinstance(spec, dict):
        poly = ExpPolynomial.from_dict(spec)
    elif isinstance(spec, str):
        text = spec.strip()
        if text == "const1":
            return TestFunction("const1", lambda x: 1.0, batch=lambda pts: np.ones(len(pts)))
        if text == "abs":
            u = np.ones(dim) / math.sqrt(dim)
            return TestFunction(
                "abs",
                lambda x: abs(float((x - centroid) @ u)),
                batch=lambda pts: np.abs((pts - centroid) @ u),
            )
        if text == "runge":
            return TestFunction(
                "runge",
                lambda x: 1.0 / (1.0 + 25.0 * float(((x - centroid) ** 2).sum())),
                batch=lambda pts: 1.0 / (1.0 + 25.0 * ((pts - centroid) ** 2).sum(axis=1)),
            )
        if text.startswith("affine:"):
            try:
                values = [float(v) for v in text[len("affine:"):].split(",")]
            except ValueError as exc:
                raise ConfigError(f"function {text!r}: non-numeric affine parameter") from exc
            if len(values) != dim + 1:
                raise ConfigError(
                    f"function {text!r}: affine needs {dim} direction entries plus an offset"
                )
            v = np.array(values[:dim])
            b = values[dim]
            return TestFunction(
                spec, lambda x: float(x @ v) + b, batch=lambda pts: pts @ v + b
            )
        if text.startswith("{"):
            try:
                poly = ExpPolynomial.from_json(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"function: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        elif text.endswith(".json"):
            try:
                with open(text) as handle:
                    poly = ExpPolynomial.from_dict(json.load(handle))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"function file {text!r}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        else:
            raise ConfigError(
                f"unknown function spec {text!r}; expected const1, abs, runge, affine:..., "
                "or an exponential polynomial as JSON"
            )
    else:
        raise ConfigError(f"function spec must be a string or mapping, got {type(spec).__name__}")

    if poly.dimension != dim:
        raise ConfigError(
            f"function dimension {poly.dimension} does not match simplex dimension {dim}"
        )
    return TestFunction("exp-polynomial", poly.evaluate, batch=poly.evaluate_many, exp_terms=poly)


@dataclass(frozen=True)
class ExperimentConfig:
    simplex: Simplex
    function: TestFunction
    n_values: tuple
    grid_resolution: int
    seed: int = 0
    output: str | None = None
    evaluator: str = DEFAULT_EVALUATOR

    def with_evaluator(self, evaluator: str) -> "ExperimentConfig":
        if evaluator not in EVALUATORS:
            raise ConfigError(f"evaluator must be one of {EVALUATORS}, got {evaluator!r}")
        return replace(self, evaluator=evaluator)


def _load_simplex_spec(spec) -> Simplex:
    if isinstance(spec, dict):
        return Simplex.from_dict(spec)
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            return Simplex.from_json(text)
        with open(text) as handle:
            return Simplex.from_dict(json.load(handle))
    raise ConfigError(f"simplex spec must be a mapping or path, got {type(spec).__name__}")


def load_config(source) -> ExperimentConfig:
    """Parse an experiment config from a dict, a JSON string, or a file path."""
    origin = "config"
    if isinstance(source, dict):
        data = source
    elif isinstance(source, (str, os.PathLike)):
        text = str(source).strip()
        if text.startswith("{"):
            raw = text
        else:
            origin = str(source)
            with open(source) as handle:
                raw = handle.read()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{origin}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    else:
        raise ConfigError(f"config must be a mapping or path, got {type(source).__name__}")

    if not isinstance(data, dict):
        raise ConfigError(f"{origin}: top level must be a JSON object")
    known = {"simplex", "function", "n_values", "grid_resolution", "seed", "output", "evaluator"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{origin}: unknown field(s) {sorted(unknown)}; known fields: {sorted(known)}")
    for field in ("simplex", "function", "n_values"):
        if field not in data:
            raise ConfigError(f"{origin}: missing required field {field!r}")

    try:
        simplex = _load_simplex_spec(data["simplex"])
    except (ValueError, OSError) as exc:
        raise ConfigError(f"{origin}: field 'simplex': {exc}") from exc

    function = make_function(data["function"], simplex)

    n_values = data["n_values"]
    if (
        not isinstance(n_values, (list, tuple))
        or not n_values
        or not all(isinstance(n, int) and n >= 1 for n in n_values)
    ):
        raise ConfigError(f"{origin}: field 'n_values': need a non-empty list of integers >= 1")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ConfigError(f"{origin}: field 'n_values': must be strictly increasing")

    resolution = data.get("grid_resolution", default_grid_resolution(simplex.dimension))
    if not isinstance(resolution, int) or resolution < 2:
        raise ConfigError(f"{origin}: field 'grid_resolution': need an integer >= 2")

    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"{origin}: field 'seed': need an integer")

    evaluator = data.get("evaluator", DEFAULT_EVALUATOR)
    if evaluator not in EVALUATORS:
        raise ConfigError(f"{origin}: field 'evaluator': must be one of {EVALUATORS}")

    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError(f"{origin}: field 'output': need a string path")

    return ExperimentConfig(
        simplex=simplex,
        function=function,
        n_values=tuple(n_values),
        grid_resolution=resolution,
        seed=seed,
        output=output,
        evaluator=evaluator,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    sup_error: float
    sup_relative_error: float
    predicted_rel_error: float | None
    evaluator: str
    wall_ms: float


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class BoundCheckRow:
    n: int
    observed_rel_error: float
    predicted_rel_error: float
    ratio: float
    violation: bool


@dataclass(frozen=True)
class BoundCheckResult:
    rows: tuple
    margin: float

    @property
    def passed(self) -> bool:
        return not any(row.violation for row in self.rows)


@dataclass(frozen=True)
class ScalingRow:
    diameter_scale: float
    magnitude_scale: float
    diameter: float
    direction_norm: float
    n: int
    sup_relative_error: float


def run_metadata(config: ExperimentConfig) -> dict:
    """Run provenance for sidecar output; not part of the CSV contract."""
    return {
        "function": config.function.name,
        "simplex_dimension": config.simplex.dimension,
        "simplex_diameter": config.simplex.diameter,
        "grid_resolution": config.grid_resolution,
        "n_values": list(config.n_values),
        "seed": config.seed,
        "evaluator": config.evaluator,
        "note": "sup taken over a barycentric lattice; a lower bound on the true sup norm",
    }


def run_convergence(config: ExperimentConfig) -> list:
    """One ConvergenceRow per configured order, sup over the lattice grid."""
    simplex = config.simplex
    function = config.function
    weights = grid_weights(config.grid_resolution, simplex.dimension)
    points = weights @ simplex.vertices
    exact = function.evaluate(points)
    sup_f = float(np.abs(exact).max())

    single = function.single_exponential()
    direction = single.terms[0].direction_array if single is not None else None

    rows = []
    for n in config.n_values:
        started = time.perf_counter()
        cps = control_points(simplex, n)
        net = ControlNet(simplex, n, function.evaluate(cps.points))
        values = evaluate_at_weights(net, weights, evaluator=config.evaluator)
        sup_error = float(np.abs(values - exact).max())
        wall_ms = (time.perf_counter() - started) * 1000.0
        predicted = (
            error_budget(simplex, direction, n).predicted_rel_error
            if direction is not None
            else None
        )
        rows.append(
            ConvergenceRow(
                n=n,
                sup_error=sup_error,
                sup_relative_error=sup_error / sup_f if sup_f > 0 else sup_error,
                predicted_rel_error=predicted,
                evaluator=config.evaluator,
                wall_ms=wall_ms,
            )
        )
    return rows


def fit_power_law(orders, errors) -> RateFit:
    """Least-squares fit of log(error) against log(order)."""
    ns = np.asarray(orders, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if ns.shape != errs.shape or ns.ndim != 1 or ns.shape[0] < 3:
        raise InsufficientDataError("rate fit needs at least 3 (order, error) pairs")
    if np.any(errs <= 0):
        raise InsufficientDataError("rate fit needs strictly positive errors")
    log_n = np.log(ns)
    log_e = np.log(errs)
    slope, intercept = np.polyfit(log_n, log_e, 1)
    predicted = slope * log_n + intercept
    ss_res = float(((log_e - predicted) ** 2).sum())
    ss_tot = float(((log_e - log_e.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def fit_rate(rows, noise_floor: float = NOISE_FLOOR) -> RateFit:
    """Fit the decay rate of sup_error across convergence rows.

    Rows at the noise floor are excluded; if nothing remains the
    reproduction was exact and ZeroError is raised instead of a bogus fit.
    """
    if len(rows) < 3:
        raise InsufficientDataError(f"rate fit needs >= 3 rows, got {len(rows)}")
    kept = [(row.n, row.sup_error) for row in rows if row.sup_error > noise_floor]
    if not kept:
        raise ZeroError("all sup errors at the noise floor: reproduction is exact")
    if len(kept) < 3:
        raise InsufficientDataError(
            f"only {len(kept)} rows above the noise floor; rate fit needs >= 3"
        )
    ns, errs = zip(*kept)
    return fit_power_law(ns, errs)


def run_bound_check(config: ExperimentConfig, margin: float = 0.25) -> BoundCheckResult:
    """Compare observed relative error with the first-order prediction per order.

    A row is a violation when the observed/predicted ratio exceeds 1+margin
    at order >= BOUND_CHECK_MIN_ORDER; below that the neglected second-order
    term may legitimately dominate.
    """
    if margin < 0:
        raise ConfigError("margin must be non-negative")
    single = config.function.single_exponential()
    if single is None:
        raise ConfigError(
            "bound check requires the function to be a single exponential term with c != 0"
        )
    direction = single.terms[0].direction_array
    simplex = config.simplex
    weights = grid_weights(config.grid_resolution, simplex.dimension)
    points = weights @ simplex.vertices

    rows = []
    for n in config.n_values:
        report = relative_error_report(simplex, direction, n, points)
        violation = n >= BOUND_CHECK_MIN_ORDER and report.ratio > 1.0 + margin
        rows.append(
            BoundCheckRow(
                n=n,
                observed_rel_error=report.max_rel_error,
                predicted_rel_error=report.predicted_rel_error,
                ratio=report.ratio,
                violation=violation,
            )
        )
    return BoundCheckResult(rows=tuple(rows), margin=margin)


def run_scaling_study(simplex: Simplex, direction, order: int, resolution: int,
                      scales) -> list:
    """Sup relative error of exp((m*a).x) on the d-scaled simplex, per (d, m).

    Exposes how the error grows with the diameter-magnitude product; the
    observed growth is roughly quadratic per doubling of either factor.
    """
    factors = [float(s) for s in scales]
    if not factors or any(s <= 0 for s in factors):
        raise ConfigError("scale factors must be positive")
    base_direction = np.asarray(direction, dtype=float)

    rows = []
    for d_scale in factors:
        scaled = simplex.scaled(d_scale)
        weights = grid_weights(resolution, scaled.dimension)
        points = weights @ scaled.vertices
        for m_scale in factors:
            a = base_direction * m_scale
            report = relative_error_report(scaled, a, order, points)
            rows.append(
                ScalingRow(
                    diameter_scale=d_scale,
                    magnitude_scale=m_scale,
                    diameter=scaled.diameter,
                    direction_norm=float(np.linalg.norm(a)),
                    n=order,
                    sup_relative_error=report.max_rel_error,
                )
            )
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def emit_csv(rows, destination, columns) -> None:
    """Write header + rows as CSV: newline-terminated, '.' decimal points.

    Rows may be dataclass instances (fields looked up by column name) or
    plain sequences matching the column order. Output is byte-stable for
    identical inputs.
    """
    def cells(row):
        if hasattr(row, "__dataclass_fields__"):
            return [getattr(row, name) for name in columns]
        return list(row)

    own_handle = isinstance(destination, (str, os.PathLike))
    handle = open(destination, "w", newline="") if own_handle else destination
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in cells(row)])
    finally:
        if own_handle:
            handle.close()
