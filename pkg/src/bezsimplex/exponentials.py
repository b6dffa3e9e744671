"""Exponential functions and their exact Bernstein images on a simplex.

For f(x) = exp(a.x) the Bernstein polynomial collapses, via the multinomial
theorem, to the closed form

    [ sum_j s_j(x) exp(a.x_j / n) ]^n

over the barycentric weights s_j of x. Exponentials are therefore the one
family whose operator error carries an a-priori first-order rate constant;
``error_budget`` computes that constant and ``relative_error_report``
measures the observed error against it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyGridError,
    ExpOverflowError,
    NegativeWeightError,
)
from .geometry import COORDINATE_TOL, Simplex

# exp() overflows double precision near 709; stay clear with a round guard.
EXP_ARG_LIMIT = 700.0

# Observed relative errors at or below this are treated as exactly zero when
# forming observed/predicted ratios (the predicted bound may be exactly 0).
ZERO_OBSERVED_FLOOR = 1e-12


@dataclass(frozen=True)
class ExpTerm:
    """One term c * exp(a.x); the direction a is stored as a plain tuple."""

    coefficient: float
    direction: tuple

    @classmethod
    def of(cls, coefficient, direction) -> "ExpTerm":
        vec = tuple(float(v) for v in np.atleast_1d(direction))
        return cls(coefficient=float(coefficient), direction=vec)

    @property
    def direction_array(self) -> np.ndarray:
        return np.array(self.direction, dtype=float)


class ExpPolynomial:
    """Finite linear combination sum_i c_i exp(a_i . x)."""

    def __init__(self, terms) -> None:
        terms = [t if isinstance(t, ExpTerm) else ExpTerm.of(*t) for t in terms]
        if not terms:
            raise DimensionMismatchError("exponential polynomial needs at least one term")
        dim = len(terms[0].direction)
        if any(len(t.direction) != dim for t in terms):
            raise DimensionMismatchError("all term directions must share one dimension")
        if not all(np.isfinite(t.coefficient) and np.all(np.isfinite(t.direction)) for t in terms):
            raise ValueError("exponential polynomial entries must be finite")
        self.terms = tuple(terms)
        self.dimension = dim

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"ExpPolynomial({len(self.terms)} terms, dimension={self.dimension})"

    def _dots(self, points: np.ndarray) -> np.ndarray:
        directions = np.array([t.direction for t in self.terms])
        dots = points @ directions.T
        if np.any(dots > EXP_ARG_LIMIT):
            raise ExpOverflowError(
                f"exponent {dots.max():.3g} exceeds the overflow guard {EXP_ARG_LIMIT:g}"
            )
        return dots

    def evaluate(self, x) -> float:
        p = np.asarray(x, dtype=float)
        if p.ndim != 1 or p.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"expected point of length {self.dimension}, got shape {p.shape}"
            )
        return float(self.evaluate_many(p[None, :])[0])

    def evaluate_many(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        dots = self._dots(pts)
        coeffs = np.array([t.coefficient for t in self.terms])
        return np.exp(dots) @ coeffs

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def to_dict(self) -> dict:
        return {"terms": [{"c": t.coefficient, "a": list(t.direction)} for t in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ExpPolynomial":
        if not isinstance(data, dict) or "terms" not in data:
            raise DimensionMismatchError('exponential polynomial JSON must be {"terms": [...]}')
        terms = [ExpTerm.of(entry["c"], entry["a"]) for entry in data["terms"]]
        return cls(terms)

    @classmethod
    def from_json(cls, text: str) -> "ExpPolynomial":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ErrorBudget:
    """First-order error constants for exp(a.x) on a fixed simplex.

    remainder_coeff bounds n^2 times the Taylor residual at this order;
    remainder_cap is its order-independent majorant; rate_constant divided
    by the order is the predicted relative error bound.
    """

    order: int
    remainder_coeff: float
    remainder_cap: float
    rate_constant: float
    predicted_rel_error: float


@dataclass(frozen=True)
class RelativeErrorReport:
    order: int
    max_rel_error: float
    predicted_rel_error: float
    ratio: float


def _direction(simplex: Simplex, direction) -> np.ndarray:
    a = np.asarray(direction, dtype=float)
    if a.ndim != 1 or a.shape[0] != simplex.dimension:
        raise DimensionMismatchError(
            f"direction must have length {simplex.dimension}, got shape {a.shape}"
        )
    return a


def _vertex_dots(simplex: Simplex, direction) -> np.ndarray:
    dots = simplex.vertices @ _direction(simplex, direction)
    if np.any(dots > EXP_ARG_LIMIT):
        raise ExpOverflowError(
            f"a.x reaches {dots.max():.3g} at a vertex, beyond the guard {EXP_ARG_LIMIT:g}"
        )
    return dots


def _clipped_weights(weights: np.ndarray) -> np.ndarray:
    if np.any(weights < -COORDINATE_TOL):
        raise NegativeWeightError(
            f"barycentric weight {weights.min():.3e} below tolerance: outside simplex"
        )
    return np.clip(weights, 0.0, None)


def closed_form_at_weights(simplex: Simplex, order: int, direction,
                           weights: np.ndarray) -> np.ndarray:
    """Bernstein image of exp(a.x) at a (P, D+1) batch of barycentric weights.

    Evaluated as exp(n * log(sum_j s_j exp(a.x_j / n))) so high orders never
    overflow an intermediate power.
    """
    if order < 1:
        raise DimensionMismatchError("order must be >= 1")
    dots = _vertex_dots(simplex, direction)
    w = _clipped_weights(np.asarray(weights, dtype=float))
    inner = w @ np.exp(dots / order)
    return np.exp(order * np.log(inner))


def bezier_exp_closed_form(simplex: Simplex, order: int, direction, x) -> float:
    """Closed-form Bernstein image of exp(a.x) at a single point."""
    w = simplex.barycentric(x)
    return float(closed_form_at_weights(simplex, order, direction, w[None, :])[0])


def residual_at_weights(simplex: Simplex, order: int, direction,
                        weights: np.ndarray) -> np.ndarray:
    """First-order residual sum_j s_j exp(a.x_j/n) - 1 - a.x/n, batched."""
    if order < 1:
        raise DimensionMismatchError("order must be >= 1")
    a = _direction(simplex, direction)
    dots = _vertex_dots(simplex, a)
    w = _clipped_weights(np.asarray(weights, dtype=float))
    x_dots = (w @ simplex.vertices) @ a
    return w @ np.exp(dots / order) - 1.0 - x_dots / order


def first_order_residual(simplex: Simplex, order: int, direction, x) -> float:
    """Residual of the first-order expansion of the weighted exponential mean.

    Zero for a = 0 and O(1/n^2) in the order; its n^2-scaled magnitude is
    capped by the remainder coefficient of ``error_budget``.
    """
    a = _direction(simplex, direction)
    dots = _vertex_dots(simplex, a)
    w = _clipped_weights(simplex.barycentric(x))
    x_arr = np.asarray(x, dtype=float)
    return float(w @ np.exp(dots / order) - 1.0 - (x_arr @ a) / order)


def error_budget(simplex: Simplex, direction, order: int) -> ErrorBudget:
    """First-order error constants for exp(a.x) at the given order.

    remainder_coeff = 1/2 sum_j (a.x_j)^2 exp(a.x_j / n)
    remainder_cap   = 1/2 sum_j (a.x_j)^2 exp(max(a.x_j, 0))   (n-independent)
    rate_constant   = remainder_cap + 1/2 max_j a.x_j

    The cap majorizes the coefficient for every order >= 1, and the max of
    the linear functional a.x over the simplex is attained at a vertex.
    """
    if order < 1:
        raise DimensionMismatchError("order must be >= 1")
    dots = _vertex_dots(simplex, direction)
    remainder_coeff = 0.5 * float(np.sum(dots**2 * np.exp(dots / order)))
    remainder_cap = 0.5 * float(np.sum(dots**2 * np.exp(np.maximum(dots, 0.0))))
    rate_constant = remainder_cap + 0.5 * float(dots.max())
    return ErrorBudget(
        order=order,
        remainder_coeff=remainder_coeff,
        remainder_cap=remainder_cap,
        rate_constant=rate_constant,
        predicted_rel_error=rate_constant / order,
    )


def relative_error_report(simplex: Simplex, direction, order: int,
                          grid) -> RelativeErrorReport:
    """Max pointwise relative error of the closed form against exp(a.x).

    The ratio field compares the observation with the predicted first-order
    bound; observations at the zero floor give ratio 0 even when the
    prediction is exactly zero.
    """
    points = np.asarray(grid, dtype=float)
    if points.ndim == 1:
        points = points[:, None] if simplex.dimension == 1 else points[None, :]
    if points.shape[0] == 0:
        raise EmptyGridError("relative error requested over an empty grid")
    a = _direction(simplex, direction)
    weights = simplex.barycentric_many(points)
    dots = _vertex_dots(simplex, a)
    w = _clipped_weights(weights)
    inner = w @ np.exp(dots / order)
    # closed_form / exp(a.x) computed without forming either huge factor
    log_ratio = order * np.log(inner) - points @ a
    observed = float(np.abs(np.expm1(log_ratio)).max())
    predicted = error_budget(simplex, a, order).predicted_rel_error
    if predicted > 0.0:
        ratio = observed / predicted
    else:
        ratio = 0.0 if observed <= ZERO_OBSERVED_FLOOR else float("inf")
    return RelativeErrorReport(
        order=order,
        max_rel_error=observed,
        predicted_rel_error=predicted,
        ratio=ratio,
    )


def bezier_of_exp_polynomial(simplex: Simplex, order: int, poly: ExpPolynomial, x) -> float:
    """Bernstein image of an exponential polynomial: term-wise closed forms."""
    if poly.dimension != simplex.dimension:
        raise DimensionMismatchError(
            f"polynomial dimension {poly.dimension} != simplex dimension {simplex.dimension}"
        )
    w = simplex.barycentric(x)[None, :]
    total = 0.0
    for term in poly.terms:
        total += term.coefficient * float(
            closed_form_at_weights(simplex, order, term.direction_array, w)[0]
        )
    return total
