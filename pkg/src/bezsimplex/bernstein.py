"""Bernstein operator on a simplex: basis evaluation and control nets.

The operator maps a function sampled at the control points to the degree-n
polynomial sum_k f(R(k/n)) B_k^n(x), where B_k^n(x) is the multinomial
coefficient times prod_j s_j(x)^k_j over the barycentric weights s of x.

Two evaluators are provided. Direct summation computes each basis value in
log space and is the correctness reference. De Casteljau reduction repeats
convex combinations of the net and is the production path: no large
coefficients ever appear, so it stays stable at high order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyGridError,
    FunctionEvaluationError,
    NegativeWeightError,
)
from .geometry import COORDINATE_TOL, Simplex, validate_barycentric
from .lattice import (
    control_points,
    count_multi_indices,
    enumerate_multi_indices,
    multinomial_log_table,
)

DIRECT = "direct"
DE_CASTELJAU = "decasteljau"
DEFAULT_EVALUATOR = DE_CASTELJAU

# Points per de Casteljau slab; keeps round buffers cache-friendly.
_CHUNK = 128


@dataclass(frozen=True)
class ControlNet:
    """Coefficient vector of a degree-n Bernstein polynomial on a simplex.

    Entry i holds the coefficient for the i-th multi-index in enumeration
    order; for a sampled net that is f at the i-th control point.
    """

    simplex: Simplex
    order: int
    coefficients: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise DimensionMismatchError("control net order must be >= 1")
        c = np.asarray(self.coefficients, dtype=float)
        expected = count_multi_indices(self.order, self.simplex.dimension)
        if c.ndim != 1 or c.shape[0] != expected:
            raise DimensionMismatchError(
                f"net of order {self.order} needs {expected} coefficients, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("control net coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def sample_control_net(simplex: Simplex, order: int, f) -> ControlNet:
    """Sample f at every control point, in enumeration order."""
    cps = control_points(simplex, order)
    values = np.empty(len(cps))
    for i, (k, point) in enumerate(cps):
        try:
            values[i] = float(f(point))
        except Exception as exc:
            raise FunctionEvaluationError(
                f"function failed at control point {point.tolist()} (index {tuple(k)})"
            ) from exc
    return ControlNet(simplex=simplex, order=order, coefficients=values)


@dataclass(frozen=True)
class BernsteinOperator:
    """Degree-n sampling operator attached to a simplex.

    Thin convenience over sample_control_net + evaluation: norm-1, positive,
    exact on affine functions. Stores only the geometry and the order, never
    the function.
    """

    simplex: Simplex
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise DimensionMismatchError("operator order must be >= 1")

    def sample(self, f) -> ControlNet:
        return sample_control_net(self.simplex, self.order, f)

    def apply(self, f, x, evaluator: str = DEFAULT_EVALUATOR) -> float:
        """Value of the operator image of f at x (resamples f each call)."""
        net = self.sample(f)
        weights = self.simplex.barycentric(x)
        return float(evaluate_at_weights(net, weights[None, :], evaluator=evaluator)[0])


def write_control_net_csv(net: ControlNet, destination) -> None:
    """Columns k_0..k_D then coefficient, one row per lattice entry."""
    from .experiments import emit_csv  # local import avoids a cycle

    d1 = net.simplex.dimension + 1
    header = [f"k_{j}" for j in range(d1)] + ["coefficient"]
    indices = enumerate_multi_indices(net.order, net.simplex.dimension)
    rows = [tuple(k) + (c,) for k, c in zip(indices, net.coefficients)]
    emit_csv(rows, destination, header)


def read_control_net_csv(simplex: Simplex, source) -> ControlNet:
    """Load a net written by write_control_net_csv; order is inferred.

    The multi-index columns must reproduce the enumeration order exactly;
    that is the portability contract for coefficient vectors.
    """
    import csv
    import os

    own = isinstance(source, (str, os.PathLike))
    handle = open(source, newline="") if own else source
    try:
        rows = list(csv.reader(handle))
    finally:
        if own:
            handle.close()
    d1 = simplex.dimension + 1
    if len(rows) < 2:
        raise DimensionMismatchError("control net CSV has no data rows")
    data = rows[1:]
    indices = np.array([[int(v) for v in row[:d1]] for row in data], dtype=np.int64)
    coefficients = np.array([float(row[d1]) for row in data])
    order = int(indices[0].sum())
    if order < 1 or not np.array_equal(indices, enumerate_multi_indices(order, simplex.dimension)):
        raise DimensionMismatchError(
            "control net CSV rows are not the lattice enumeration of a single order"
        )
    return ControlNet(simplex=simplex, order=order, coefficients=coefficients)


@lru_cache(maxsize=64)
def _basis_tables(order: int, dimension: int):
    indices = enumerate_multi_indices(order, dimension)
    log_multinomials = multinomial_log_table(indices)
    k_float = indices.astype(float)
    for arr in (indices, log_multinomials, k_float):
        arr.setflags(write=False)
    return indices, k_float, log_multinomials


def _checked_weights(weights: np.ndarray, tol: float = COORDINATE_TOL) -> np.ndarray:
    if np.any(weights < -tol):
        raise NegativeWeightError(
            f"barycentric weight {weights.min():.3e} below -{tol:g}: point outside simplex"
        )
    return np.clip(weights, 0.0, None)


def _basis_matrix(order: int, weights: np.ndarray) -> np.ndarray:
    # B[i, p] = B_{k_i}^order at weight row p, computed in log space with the
    # 0*log(0) = 0 convention handled by masking.
    dimension = weights.shape[1] - 1
    indices, k_float, logm = _basis_tables(order, dimension)
    w = _checked_weights(weights)
    zero = w == 0.0
    logw = np.where(zero, 0.0, np.log(np.where(zero, 1.0, w)))
    log_basis = k_float @ logw.T + logm[:, None]
    # Entries with k_j > 0 at a zero weight are exactly zero, not exp(placeholder).
    dead = ((indices > 0).astype(np.int8) @ zero.T.astype(np.int8)) > 0
    if dead.any():
        log_basis[dead] = -np.inf
    return np.exp(log_basis)


def basis_vector(simplex: Simplex, order: int, x) -> np.ndarray:
    """All basis values B_k^order(x) in enumeration order."""
    if order < 1:
        raise DimensionMismatchError("basis order must be >= 1")
    w = simplex.barycentric(x)
    return _basis_matrix(order, w[None, :])[:, 0]


def basis_value(simplex: Simplex, index, x) -> float:
    """Single basis value B_k^n(x) for the multi-index k, n = |k|."""
    k = np.asarray(index, dtype=np.int64)
    if k.ndim != 1 or k.shape[0] != simplex.dimension + 1 or np.any(k < 0):
        raise DimensionMismatchError(
            f"multi-index must have {simplex.dimension + 1} non-negative entries"
        )
    order = int(k.sum())
    if order < 1:
        raise DimensionMismatchError("basis order |k| must be >= 1")
    w = _checked_weights(simplex.barycentric(x))
    if np.any(w[k > 0] == 0.0):
        return 0.0
    logm = multinomial_log_table(k[None, :])[0]
    live = k > 0
    return float(np.exp(logm + k[live] @ np.log(w[live])))


@lru_cache(maxsize=512)
def _reduction_table(order: int, dimension: int) -> np.ndarray:
    # Row i: positions in M_order of k + e_j for the i-th index k of M_{order-1}.
    # Colex order on the tails (k_1..k_D) equals numeric order of their
    # mixed-radix keys, so positions come from a vectorized searchsorted.
    lower = enumerate_multi_indices(order - 1, dimension)
    upper = enumerate_multi_indices(order, dimension)
    table = np.empty((lower.shape[0], dimension + 1), dtype=np.int64)
    base = order + 1
    if dimension * np.log2(base) < 62:
        powers = base ** np.arange(dimension, dtype=np.int64)
        upper_keys = upper[:, 1:] @ powers
        lower_keys = lower[:, 1:] @ powers
        table[:, 0] = np.searchsorted(upper_keys, lower_keys)  # +e_0 keeps the tail
        for j in range(1, dimension + 1):
            table[:, j] = np.searchsorted(upper_keys, lower_keys + powers[j - 1])
    else:
        position = {tuple(row): i for i, row in enumerate(upper.tolist())}
        for i, row in enumerate(lower.tolist()):
            for j in range(dimension + 1):
                row[j] += 1
                table[i, j] = position[tuple(row)]
                row[j] -= 1
    table.setflags(write=False)
    return table


def _de_casteljau_chunk(coefficients: np.ndarray, order: int, dimension: int,
                        weights: np.ndarray) -> np.ndarray:
    n_pts = weights.shape[0]
    w_cols = [np.ascontiguousarray(weights[:, j]) for j in range(dimension + 1)]

    # First reduction reads the coefficient vector; later rounds ping-pong
    # between preallocated buffers so the loop never allocates.
    table = _reduction_table(order, dimension)
    top = table.shape[0]
    values = np.empty((top, n_pts))
    scratch = np.empty((top, n_pts))
    np.multiply(coefficients[table[:, 0]][:, None], w_cols[0], out=values)
    for j in range(1, dimension + 1):
        np.multiply(coefficients[table[:, j]][:, None], w_cols[j], out=scratch)
        values += scratch

    if order == 1:
        return values[0].copy()

    other = np.empty((top, n_pts))
    for m in range(order - 1, 0, -1):
        table = _reduction_table(m, dimension)
        rows = table.shape[0]
        dst = other[:rows]
        np.take(values, table[:, 0], axis=0, out=dst)
        dst *= w_cols[0]
        for j in range(1, dimension + 1):
            gathered = scratch[:rows]
            np.take(values, table[:, j], axis=0, out=gathered)
            gathered *= w_cols[j]
            dst += gathered
        values, other = other, values
    return values[0].copy()


def evaluate_at_weights(net: ControlNet, weights, evaluator: str = DEFAULT_EVALUATOR) -> np.ndarray:
    """Evaluate the net at a (P, D+1) batch of barycentric weights."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[1] != net.simplex.dimension + 1:
        raise DimensionMismatchError(
            f"expected weights of shape (P, {net.simplex.dimension + 1}), got {w.shape}"
        )
    if evaluator == DIRECT:
        return _basis_matrix(net.order, w).T @ net.coefficients
    if evaluator == DE_CASTELJAU:
        w = _checked_weights(w)
        out = np.empty(w.shape[0])
        for start in range(0, w.shape[0], _CHUNK):
            stop = min(start + _CHUNK, w.shape[0])
            out[start:stop] = _de_casteljau_chunk(
                net.coefficients, net.order, net.simplex.dimension, w[start:stop]
            )
        return out
    raise ValueError(f"unknown evaluator {evaluator!r}; use {DIRECT!r} or {DE_CASTELJAU!r}")


def apply_direct(net: ControlNet, x) -> float:
    """Reference evaluation at a point: explicit sum of coefficient * basis."""
    w = net.simplex.barycentric(x)
    return float(evaluate_at_weights(net, w[None, :], evaluator=DIRECT)[0])


def apply_de_casteljau(net: ControlNet, weights) -> float:
    """Stable evaluation at validated barycentric weights."""
    t = validate_barycentric(weights, net.simplex.dimension)
    return float(evaluate_at_weights(net, t[None, :], evaluator=DE_CASTELJAU)[0])


def operator_sup_error(net: ControlNet, f, grid, evaluator: str = DEFAULT_EVALUATOR) -> float:
    """Max over the grid of |net(x) - f(x)|; the discretized sup-norm error."""
    points = np.asarray(grid, dtype=float)
    if points.ndim == 1:
        points = points[:, None] if net.simplex.dimension == 1 else points[None, :]
    if points.shape[0] == 0:
        raise EmptyGridError("sup error requested over an empty grid")
    weights = net.simplex.barycentric_many(points)
    values = evaluate_at_weights(net, weights, evaluator=evaluator)
    exact = np.array([float(f(p)) for p in points])
    return float(np.abs(values - exact).max())
