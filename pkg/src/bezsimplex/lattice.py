"""Multi-index lattices, multinomial coefficients and control points.

A multi-index of order n over a D-simplex is a vector k of D+1 non-negative
integers with |k| = sum(k) = n; there are binomial(n+D, D) of them. The
enumeration order used everywhere in this package is colexicographic on
(k_1, ..., k_D) with k_0 = n - sum implied, so coefficient vectors written
by one process can be read back by any other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatchError, SizeOverflowError
from .geometry import Simplex

# Refuse lattices with more entries than this (desk-scale guarantee).
SIZE_CAP = 100_000_000

# Largest order served by the exact integer path.
EXACT_ORDER_LIMIT = 60


def count_multi_indices(order: int, dimension: int) -> int:
    """Number of multi-indices of the given order: binomial(order+D, D)."""
    if order < 0 or dimension < 1:
        raise DimensionMismatchError("order must be >= 0 and dimension >= 1")
    return math.comb(order + dimension, dimension)


# Shared sub-blocks of the enumeration, reused across orders; only blocks up
# to this many rows are kept so the cache stays desk-scale.
_TAIL_CACHE: dict = {}
_TAIL_CACHE_ROW_LIMIT = 500_000
_EMPTY_TAIL = np.zeros((1, 0), dtype=np.int64)


def _tail_blocks(budget: int, length: int) -> np.ndarray:
    # All (k_1..k_length) with sum <= budget, colexicographic ascending:
    # the last coordinate is most significant. Returned arrays are shared
    # and read-only; callers must copy before mutating.
    if length == 0:
        return _EMPTY_TAIL
    key = (budget, length)
    cached = _TAIL_CACHE.get(key)
    if cached is not None:
        return cached
    blocks = []
    for last in range(budget + 1):
        head = _tail_blocks(budget - last, length - 1)
        col = np.full((head.shape[0], 1), last, dtype=np.int64)
        blocks.append(np.hstack([head, col]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    if out.shape[0] <= _TAIL_CACHE_ROW_LIMIT:
        _TAIL_CACHE[key] = out
    return out


def enumerate_multi_indices(order: int, dimension: int) -> np.ndarray:
    """All multi-indices of the given order, one per row, shape (count, D+1).

    Deterministic colexicographic order on (k_1..k_D); row sums all equal
    ``order``. Raises SizeOverflowError beyond SIZE_CAP entries.
    """
    count = count_multi_indices(order, dimension)
    if count > SIZE_CAP:
        raise SizeOverflowError(
            f"lattice of order {order} in dimension {dimension} has {count} entries"
            f" (cap {SIZE_CAP})"
        )
    tails = _tail_blocks(order, dimension)
    k0 = order - tails.sum(axis=1, keepdims=True)
    return np.hstack([k0, tails])


def _check_index(index) -> np.ndarray:
    k = np.asarray(index, dtype=np.int64)
    if k.ndim != 1 or k.shape[0] < 2:
        raise DimensionMismatchError(f"multi-index must be a flat vector of D+1 >= 2 entries, got shape {k.shape}")
    if np.any(k < 0):
        raise DimensionMismatchError("multi-index entries must be non-negative")
    return k


def multinomial_log(index) -> float:
    """Natural log of the multinomial coefficient n! / prod(k_j!), n = |k|."""
    k = _check_index(index)
    n = int(k.sum())
    return math.lgamma(n + 1) - sum(math.lgamma(int(kj) + 1) for kj in k)


def multinomial_log_table(indices: np.ndarray) -> np.ndarray:
    """Vectorized multinomial_log over rows of an index array."""
    k = np.asarray(indices, dtype=np.int64)
    n = k.sum(axis=1)
    return gammaln(n + 1) - gammaln(k + 1).sum(axis=1)


def multinomial_exact(index) -> int:
    """Exact integer multinomial coefficient; the test oracle for the log path.

    Restricted to |k| <= EXACT_ORDER_LIMIT where factorial products stay cheap.
    """
    k = _check_index(index)
    n = int(k.sum())
    if n > EXACT_ORDER_LIMIT:
        raise SizeOverflowError(
            f"exact multinomial limited to order {EXACT_ORDER_LIMIT}, got {n}"
        )
    value = math.factorial(n)
    for kj in k:
        value //= math.factorial(int(kj))
    return value


def grid_weights(resolution: int, dimension: int) -> np.ndarray:
    """Barycentric lattice of the given resolution: rows k/m over all |k| = m.

    Covers the closed simplex uniformly, faces and vertices included.
    """
    if resolution < 1:
        raise DimensionMismatchError("grid resolution must be >= 1")
    return enumerate_multi_indices(resolution, dimension) / float(resolution)


def default_grid_resolution(dimension: int) -> int:
    """Default sup-norm grid resolution, tapered so point counts stay desk-scale."""
    if dimension <= 2:
        return 50
    if dimension == 3:
        return 15
    return 8


@dataclass(frozen=True)
class ControlPointSet:
    """Lattice points R(k/n) of a simplex, aligned with enumeration order."""

    order: int
    indices: np.ndarray  # (count, D+1) int64
    points: np.ndarray   # (count, D) float

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        for k, p in zip(self.indices, self.points):
            yield k, p

    def write_csv(self, destination) -> None:
        """Write columns k_0..k_D, x_1..x_D; one row per control point."""
        from .experiments import emit_csv  # local import avoids a cycle

        d1 = self.indices.shape[1]
        header = [f"k_{j}" for j in range(d1)] + [f"x_{j}" for j in range(1, d1)]
        rows = [tuple(k) + tuple(p) for k, p in self]
        emit_csv(rows, destination, header)


def control_points(simplex: Simplex, order: int) -> ControlPointSet:
    """Control points sum_j (k_j/n) x_j for every multi-index of the order."""
    if order < 1:
        raise DimensionMismatchError("control point order must be >= 1")
    indices = enumerate_multi_indices(order, simplex.dimension)
    points = (indices / float(order)) @ simplex.vertices
    indices.setflags(write=False)
    points.setflags(write=False)
    return ControlPointSet(order=order, indices=indices, points=points)
