"""Points, squared distances and cost bookkeeping shared by every seeding routine.

A :class:`Dataset` holds ``n`` points in ``d`` dimensions plus nonnegative
weights.  Points are a dense ``float64`` array, or a CSR matrix for very
high-dimensional sparse instances (the simplex lower-bound construction).
Costs are always *weighted*: ``cost(x, C) = w_x * min_c ||x - c||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class AllCoveredError(ValueError):
    """Raised when D^2 sampling is requested but every point has cost zero."""


@dataclass(frozen=True, eq=False)
class Dataset:
    points: np.ndarray | sp.csr_matrix
    weights: np.ndarray
    _sq_norms: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = self.points
        if sp.issparse(pts):
            pts = sp.csr_matrix(pts, dtype=np.float64)
            if not np.all(np.isfinite(pts.data)):
                raise ValueError("dataset contains non-finite coordinates")
        else:
            pts = np.ascontiguousarray(pts, dtype=np.float64)
            if pts.ndim == 1:
                pts = pts[:, None]
            if pts.ndim != 2:
                raise ValueError(f"points must be 2-D, got shape {pts.shape}")
            if not np.all(np.isfinite(pts)):
                raise ValueError("dataset contains non-finite coordinates")
        n, d = pts.shape
        if n < 1 or d < 1:
            raise ValueError(f"dataset needs n >= 1 and d >= 1, got {n}x{d}")
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.shape != (n,):
            raise ValueError(f"expected {n} weights, got {w.shape[0]}")
        if not np.all(np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be finite, nonnegative and not all zero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        if sp.issparse(pts):
            sq = np.asarray(pts.multiply(pts).sum(axis=1)).reshape(-1)
        else:
            sq = None
        object.__setattr__(self, "_sq_norms", sq)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.points)

    @property
    def unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def row(self, i: int) -> np.ndarray:
        """Dense copy of point ``i``."""
        if self.is_sparse:
            return self.points[i].toarray().reshape(-1)
        return self.points[i]

    def rows(self, idx) -> np.ndarray:
        """Dense ``(m, d)`` array of the points at ``idx``."""
        idx = np.asarray(idx, dtype=np.intp).reshape(-1)
        if self.is_sparse:
            return self.points[idx].toarray()
        return self.points[idx]

    def subset(self, idx) -> Dataset:
        idx = np.asarray(idx, dtype=np.intp).reshape(-1)
        if idx.size == 0:
            raise ValueError("empty subset")
        return Dataset(self.points[idx], self.weights[idx])

    def dense(self) -> np.ndarray:
        return self.points.toarray() if self.is_sparse else self.points


def as_dataset(X, weights=None) -> Dataset:
    """Wrap an array (or pass through a Dataset) with default unit weights."""
    if isinstance(X, Dataset):
        if weights is None:
            return X
        return Dataset(X.points, weights)
    if not sp.issparse(X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
    if weights is None:
        weights = np.ones(X.shape[0])
    return Dataset(X, weights)


def _as_centers(C, d: int) -> np.ndarray:
    C = np.asarray(C, dtype=np.float64)
    if C.ndim == 1:
        C = C.reshape(-1, d)
    if C.ndim != 2 or (C.shape[0] and C.shape[1] != d):
        raise ValueError(f"center dimension mismatch: expected d={d}, got shape {C.shape}")
    return C


def sq_dists(X: Dataset, c: np.ndarray) -> np.ndarray:
    """Unweighted squared distances from every point of ``X`` to the point ``c``."""
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    if c.shape[0] != X.d:
        raise ValueError(f"center dimension mismatch: expected d={X.d}, got {c.shape[0]}")
    if X.is_sparse:
        # ||x||^2 + ||c||^2 - 2<x, c>; O(nnz) per center
        out = X._sq_norms + c @ c - 2.0 * (X.points @ c)
        return np.maximum(out, 0.0, out=out)
    diff = X.points - c
    return np.einsum("ij,ij->i", diff, diff)


def nearest(X: Dataset, C) -> tuple[np.ndarray, np.ndarray]:
    """Squared distance to, and index of, the nearest row of ``C`` for every point.

    Ties go to the lowest center index.
    """
    C = _as_centers(C, X.d)
    if C.shape[0] == 0:
        raise ValueError("no centers")
    best = sq_dists(X, C[0])
    arg = np.zeros(X.n, dtype=np.intp)
    for j in range(1, C.shape[0]):
        dj = sq_dists(X, C[j])
        closer = dj < best
        best[closer] = dj[closer]
        arg[closer] = j
    return best, arg


def point_cost(x, C) -> float:
    """``min_c ||x - c||^2`` over the rows of ``C``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    C = _as_centers(C, x.shape[0])
    if C.shape[0] == 0:
        raise ValueError("no centers")
    diff = C - x
    return float(np.min(np.einsum("ij,ij->i", diff, diff)))


def total_cost(X, C) -> float:
    """Weighted k-means cost of ``X`` against the centers ``C``."""
    X = as_dataset(X)
    best, _ = nearest(X, C)
    return float(np.dot(X.weights, best))


def opt1(Y) -> tuple[np.ndarray, float]:
    """Optimal single-center cost: the (weighted) centroid and the sum of
    weighted squared deviations from it."""
    Y = as_dataset(Y)
    W = Y.weights.sum()
    if Y.is_sparse:
        mu = np.asarray(Y.points.T @ Y.weights).reshape(-1) / W
        cost = float(Y.weights @ Y._sq_norms - W * (mu @ mu))
        return mu, max(cost, 0.0)
    mu = Y.weights @ Y.points / W
    diff = Y.points - mu
    return mu, float(Y.weights @ np.einsum("ij,ij->i", diff, diff))


@dataclass
class CostCache:
    """Per-point weighted cost against the centers chosen so far.

    ``costs[i] = w_i * min_c ||x_i - c||^2``; ``total`` is their sum,
    recomputed from the array on every update so it never drifts.
    """

    costs: np.ndarray
    total: float
    n_centers: int = 0

    def copy(self) -> CostCache:
        return CostCache(self.costs.copy(), self.total, self.n_centers)


def new_cache(X: Dataset, C, source_index=None) -> CostCache:
    """Cache for ``X`` against the centers ``C`` (rows of a 2-D array)."""
    C = _as_centers(C, X.d)
    if C.shape[0] == 0:
        raise ValueError("no centers")
    best, _ = nearest(X, C)
    costs = X.weights * best
    if source_index is not None:
        costs[np.asarray(source_index, dtype=np.intp)] = 0.0
    return CostCache(costs, float(costs.sum()), C.shape[0])


def extend_cache(cache: CostCache, X: Dataset, new_centers, source_index=None) -> CostCache:
    """Return a cache consistent with the old centers plus ``new_centers``.

    Only distances to the new centers are computed.  ``source_index`` lists
    dataset indices of the new centers, whose cost is pinned to exactly zero
    (the sparse distance expansion can leave rounding residue otherwise).
    """
    C = _as_centers(new_centers, X.d)
    if C.shape[0] == 0:
        return cache
    costs = cache.costs.copy()
    for c in C:
        np.minimum(costs, X.weights * sq_dists(X, c), out=costs)
    if source_index is not None:
        costs[np.asarray(source_index, dtype=np.intp)] = 0.0
    return CostCache(costs, float(costs.sum()), cache.n_centers + C.shape[0])


def lloyd_iterate(X, C, iterations: int) -> np.ndarray:
    """Plain (weighted) Lloyd iterations starting from the centers ``C``.

    Clusters that lose all their points keep their previous center.
    """
    X = as_dataset(X)
    C = _as_centers(C, X.d).copy()
    if C.shape[0] == 0:
        raise ValueError("no centers")
    for _ in range(iterations):
        _, labels = nearest(X, C)
        w = np.bincount(labels, weights=X.weights, minlength=C.shape[0])
        if X.is_sparse:
            onehot = sp.csr_matrix((X.weights, (labels, np.arange(X.n))), shape=(C.shape[0], X.n))
            sums = np.asarray((onehot @ X.points).todense())
        else:
            sums = np.zeros_like(C)
            np.add.at(sums, labels, X.weights[:, None] * X.points)
        live = w > 0
        C[live] = sums[live] / w[live, None]
    return C
