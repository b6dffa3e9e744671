"""Simplex geometry and barycentric coordinate maps.

Points are plain numpy arrays of length D. Barycentric coordinates are
arrays of length D+1: the unique weights t with x = sum_i t_i x_i and
sum_i t_i = 1. For points outside the simplex some weights are negative;
the solve still succeeds and callers use the signs for containment.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    DegenerateSimplexError,
    DimensionMismatchError,
    InvalidBarycentricError,
)

# Absolute slack on barycentric non-negativity. Admits face points produced
# by floating-point grid generation.
COORDINATE_TOL = 1e-9

# Tolerance on sum(t) == 1 when validating externally supplied weights.
WEIGHT_SUM_TOL = 1e-12


def validate_barycentric(weights, dimension: int) -> np.ndarray:
    """Check a weight vector against the barycentric invariants.

    Returns the weights as a float array of length dimension+1. Raises
    DimensionMismatchError on wrong length, InvalidBarycentricError if any
    weight is below -COORDINATE_TOL or the sum strays from one.
    """
    t = np.asarray(weights, dtype=float)
    if t.ndim != 1 or t.shape[0] != dimension + 1:
        raise DimensionMismatchError(
            f"expected {dimension + 1} barycentric weights, got shape {t.shape}"
        )
    if not np.all(np.isfinite(t)):
        raise InvalidBarycentricError("barycentric weights must be finite")
    if np.any(t < -COORDINATE_TOL):
        raise InvalidBarycentricError(
            f"negative barycentric weight {t.min():.3e} below tolerance"
        )
    total = float(t.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidBarycentricError(f"weights sum to {total!r}, expected 1")
    return t


class Simplex:
    """Closed, non-degenerate simplex spanned by D+1 vertices in R^D.

    The (D+1)x(D+1) affine system (ones row stacked on the vertex columns)
    that maps cartesian to barycentric coordinates is LU-factorized once at
    construction and reused for every query. Vertex order is fixed for the
    lifetime of the instance; instances are immutable and safe to share
    across threads.
    """

    def __init__(self, vertices) -> None:
        vtx = np.array(vertices, dtype=float)
        if vtx.ndim != 2:
            raise DimensionMismatchError(
                f"vertices must be a 2-d array of shape (D+1, D), got ndim={vtx.ndim}"
            )
        n_vertices, dim = vtx.shape
        if dim < 1 or n_vertices != dim + 1:
            raise DimensionMismatchError(
                f"expected D+1 vertices of length D, got {n_vertices} of length {dim}"
            )
        if not np.all(np.isfinite(vtx)):
            raise ValueError("simplex vertices must be finite")

        deltas = vtx[:, None, :] - vtx[None, :, :]
        diameter = float(np.sqrt((deltas**2).sum(axis=2)).max())

        # Column i of the system matrix is (1, x_i).
        system = np.vstack([np.ones(n_vertices), vtx.T])
        det = float(np.linalg.det(system))
        # Scale-relative degeneracy threshold: insensitive to units.
        if abs(det) <= 1e-12 * diameter**dim:
            raise DegenerateSimplexError(
                f"vertices are affinely dependent (|det| = {abs(det):.3e})"
            )

        vtx.setflags(write=False)
        self._vertices = vtx
        self._dimension = dim
        self._diameter = diameter
        self._lu = lu_factor(system)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def vertices(self) -> np.ndarray:
        """Read-only (D+1, D) vertex array; row j is vertex x_j."""
        return self._vertices

    @property
    def diameter(self) -> float:
        """Largest pairwise vertex distance (the longest side)."""
        return self._diameter

    @property
    def centroid(self) -> np.ndarray:
        return self._vertices.mean(axis=0)

    def __repr__(self) -> str:
        return f"Simplex(dimension={self._dimension}, diameter={self._diameter:.6g})"

    def _check_point(self, x) -> np.ndarray:
        p = np.asarray(x, dtype=float)
        if p.ndim != 1 or p.shape[0] != self._dimension:
            raise DimensionMismatchError(
                f"expected point of length {self._dimension}, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise ValueError("point coordinates must be finite")
        return p

    def barycentric(self, x) -> np.ndarray:
        """Barycentric coordinates of x; signed, so valid outside the simplex too."""
        p = self._check_point(x)
        rhs = np.empty(self._dimension + 1)
        rhs[0] = 1.0
        rhs[1:] = p
        return lu_solve(self._lu, rhs)

    def barycentric_many(self, points) -> np.ndarray:
        """Barycentric coordinates of a (P, D) batch of points, shape (P, D+1)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self._dimension:
            raise DimensionMismatchError(
                f"expected points of shape (P, {self._dimension}), got {pts.shape}"
            )
        rhs = np.empty((self._dimension + 1, pts.shape[0]))
        rhs[0] = 1.0
        rhs[1:] = pts.T
        return lu_solve(self._lu, rhs).T

    def point_from_barycentric(self, weights) -> np.ndarray:
        """Map validated barycentric weights back to a cartesian point."""
        t = validate_barycentric(weights, self._dimension)
        return t @ self._vertices

    def contains(self, x, tol: float = COORDINATE_TOL) -> bool:
        """True iff every barycentric weight of x is >= -tol (closed simplex)."""
        if tol < 0:
            raise ValueError("tolerance must be non-negative")
        return bool(np.all(self.barycentric(x) >= -tol))

    def scaled(self, factor: float) -> "Simplex":
        """Simplex with all vertices scaled about the origin."""
        return Simplex(self._vertices * float(factor))

    def to_dict(self) -> dict:
        return {"vertices": self._vertices.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Simplex":
        if not isinstance(data, dict) or "vertices" not in data:
            raise DimensionMismatchError('simplex JSON must be {"vertices": [[...], ...]}')
        return cls(data["vertices"])

    @classmethod
    def from_json(cls, text: str) -> "Simplex":
        return cls.from_dict(json.loads(text))


def standard_simplex(dimension: int) -> Simplex:
    """Simplex with vertices at the origin and the unit coordinate points."""
    if dimension < 1:
        raise DimensionMismatchError("dimension must be >= 1")
    vertices = np.vstack([np.zeros(dimension), np.eye(dimension)])
    return Simplex(vertices)
