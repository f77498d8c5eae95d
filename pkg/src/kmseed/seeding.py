"""D^2 sampling: k-means++, its weighted and bi-criteria variants, and pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import AllCoveredError, CostCache, Dataset, as_dataset, nearest, sq_dists


@dataclass(frozen=True, eq=False)
class CenterList:
    """Chosen centers in selection order.

    Attributes:
        indices: dataset row of each center.
        rounds: round (or step) in which each center was chosen; nondecreasing.
        cost: weighted cost of the whole dataset against these centers.
        exhausted: True when every point reached cost zero before the
            requested number of centers (or rounds) was used up.
    """

    indices: np.ndarray
    rounds: np.ndarray
    cost: float
    exhausted: bool = False

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def unique(self) -> bool:
        return len(np.unique(self.indices)) == len(self.indices)

    def points(self, X: Dataset) -> np.ndarray:
        return X.rows(self.indices)

    def key(self) -> tuple[int, ...]:
        """Ordered tuple of indices, the outcome label used in equivalence tests."""
        return tuple(int(i) for i in self.indices)


@dataclass(frozen=True)
class BiCriteriaConfig:
    k: int
    delta: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")


def _prefix_pick(mass: np.ndarray, rng: np.random.Generator) -> int:
    # u in (0, total]; smallest i with prefix[i] >= u, so zero-mass entries
    # can never be returned and a boundary hit resolves to the lower index
    prefix = np.cumsum(mass)
    total = prefix[-1]
    if not total > 0:
        raise AllCoveredError("all points covered")
    u = (1.0 - rng.random()) * total
    return int(np.searchsorted(prefix, u, side="left"))


def dsq_sample(cache: CostCache | np.ndarray, rng: np.random.Generator) -> int:
    """Draw an index with probability ``cost[i] / sum(cost)``.

    One uniform draw and a left-to-right prefix scan.  Raises
    :class:`AllCoveredError` when the total cost is zero.
    """
    costs = cache.costs if isinstance(cache, CostCache) else np.asarray(cache, dtype=np.float64)
    return _prefix_pick(costs, rng)


def _seed(X: Dataset, k: int, rng: np.random.Generator) -> CenterList:
    unit = X.unit_weights
    first = _prefix_pick(X.weights, rng)
    costs = sq_dists(X, X.row(first))
    if not unit:
        costs *= X.weights
    costs[first] = 0.0
    chosen = [first]
    exhausted = False
    while len(chosen) < k:
        prefix = np.cumsum(costs)
        total = prefix[-1]
        if not total > 0:
            exhausted = True
            break
        i = int(np.searchsorted(prefix, (1.0 - rng.random()) * total, side="left"))
        dist = sq_dists(X, X.row(i))
        if not unit:
            dist *= X.weights
        np.minimum(costs, dist, out=costs)
        costs[i] = 0.0
        chosen.append(i)
    idx = np.asarray(chosen, dtype=np.intp)
    return CenterList(idx, np.arange(len(idx)), float(costs.sum()), exhausted)


def kmeanspp(X, k: int, rng: np.random.Generator) -> CenterList:
    """k-means++ seeding.

    The first center is drawn proportionally to the point weights (uniformly
    for unit weights); each later center by D^2 sampling against all centers
    chosen so far.  If every point is covered before ``k`` centers are chosen
    the list is returned short with ``exhausted=True``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _seed(as_dataset(X), k, rng)


def weighted_kmeanspp(points, weights, k: int, rng: np.random.Generator) -> CenterList:
    """k-means++ on a weighted point set; zero-weight points are never chosen."""
    return kmeanspp(as_dataset(points, weights), k, rng)


def bicriteria_kmeanspp(X, cfg: BiCriteriaConfig, rng: np.random.Generator) -> CenterList:
    """k-means++ run for ``k + delta`` steps."""
    return kmeanspp(X, cfg.k + cfg.delta, rng)


def prune_weights(X: Dataset, oversampled: CenterList) -> np.ndarray:
    """Total weight of the points of ``X`` whose nearest oversampled center is
    each center (ties to the lowest center position)."""
    _, owner = nearest(X, oversampled.points(X))
    return np.bincount(owner, weights=X.weights, minlength=len(oversampled))


def prune(X, oversampled: CenterList, k: int, rng: np.random.Generator) -> CenterList:
    """Reduce an oversampled center list to ``k`` centers with weighted k-means++.

    Returned indices refer to rows of ``X``; ``rounds`` records the step of the
    pruning run and ``cost`` is measured on the full dataset.
    """
    X = as_dataset(X)
    if len(oversampled) < k:
        raise ValueError(f"cannot prune {len(oversampled)} centers down to k={k}")
    w = prune_weights(X, oversampled)
    pts = oversampled.points(X)
    inner = kmeanspp(Dataset(pts, w), k, rng)
    idx = oversampled.indices[inner.indices]
    best, _ = nearest(X, X.rows(idx))
    return CenterList(idx, inner.rounds, float(X.weights @ best), inner.exhausted)


def kmeanspp_batch(X, k: int, trials: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``trials`` independent k-means++ runs advanced in lockstep.

    Meant for small dense inputs: it holds the full ``n x n`` distance table
    and a ``trials x n`` cost array.  Returns ``(indices, costs)`` with
    ``indices`` of shape ``(trials, k)`` (``-1`` after a run is exhausted) and
    the final cost of every run.  Same distribution as :func:`kmeanspp`, not
    the same random stream.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    X = as_dataset(X)
    if X.is_sparse:
        raise ValueError("kmeanspp_batch needs dense points")
    P = X.points
    diff = P[:, None, :] - P[None, :, :]
    D = np.einsum("ijk,ijk->ij", diff, diff) * X.weights[None, :]
    np.fill_diagonal(D, 0.0)
    rows = np.arange(trials)

    def pick(mass):
        prefix = np.cumsum(mass, axis=1)
        total = prefix[:, -1]
        u = (1.0 - rng.random(trials)) * total
        i = (prefix < u[:, None]).sum(axis=1)
        return np.minimum(i, X.n - 1), total > 0

    out = np.full((trials, k), -1, dtype=np.intp)
    first, _ = pick(np.broadcast_to(X.weights, (trials, X.n)))
    out[:, 0] = first
    costs = D[first].copy()
    for j in range(1, k):
        i, alive = pick(costs)
        out[alive, j] = i[alive]
        upd = np.minimum(costs[alive], D[i[alive]])
        upd[np.arange(upd.shape[0]), i[alive]] = 0.0
        costs[alive] = upd
    return out, costs[rows].sum(axis=1)
