"""Round-based oversampling: k-means|| and its Poisson variant.

In every round each point ``x`` has rate
``lam(x) = ell * cost(x, C) / cost(X, C)`` computed from the costs frozen at
the start of the round.  k-means|| includes ``x`` with probability
``min(1, lam)``, the Poisson variant with ``1 - exp(-lam)``.  Uniforms are
consumed one per point in index order, which makes the two variants
directly coupled when run on the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CostCache, Dataset, as_dataset, sq_dists
from .seeding import CenterList, _prefix_pick, prune


@dataclass(frozen=True)
class ParallelConfig:
    """``k`` target clusters, oversampling factor ``ell`` and ``rounds`` T.

    ``ell`` between ``0.1 k`` and ``10 k`` is the usual practical range; it is
    not enforced.
    """

    k: int
    ell: float
    rounds: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.ell > 0:
            raise ValueError(f"ell must be positive, got {self.ell}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


def sampling_rates(cache: CostCache | np.ndarray, ell: float) -> np.ndarray:
    """``lam(x) = ell * cost(x) / total``; all zero when the total is zero."""
    costs = cache.costs if isinstance(cache, CostCache) else np.asarray(cache, dtype=np.float64)
    total = costs.sum()
    if not total > 0:
        return np.zeros_like(costs)
    return ell * costs / total


def inclusion_probs(lam: np.ndarray, poisson: bool) -> np.ndarray:
    if poisson:
        return -np.expm1(-lam)
    return np.minimum(lam, 1.0)


def coupled_round(cache: CostCache, ell: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One round of both variants driven by the same uniforms.

    Returns boolean masks ``(poisson, clamped)``; since
    ``1 - exp(-lam) <= min(1, lam)`` the first is always a subset of the second.
    """
    lam = sampling_rates(cache, ell)
    u = rng.random(lam.shape[0])
    return u < inclusion_probs(lam, True), u < inclusion_probs(lam, False)


def _oversample(X: Dataset, cfg: ParallelConfig, rng: np.random.Generator, poisson: bool) -> CenterList:
    unit = X.unit_weights
    first = _prefix_pick(X.weights, rng)
    costs = sq_dists(X, X.row(first))
    if not unit:
        costs *= X.weights
    costs[first] = 0.0
    chosen = [first]
    rounds = [0]
    exhausted = False
    for t in range(1, cfg.rounds + 1):
        total = costs.sum()
        if not total > 0:
            exhausted = True
            break
        p = inclusion_probs(cfg.ell * costs / total, poisson)
        new = np.flatnonzero(rng.random(X.n) < p)
        for i in new:
            dist = sq_dists(X, X.row(i))
            if not unit:
                dist *= X.weights
            np.minimum(costs, dist, out=costs)
        costs[new] = 0.0
        chosen.extend(new.tolist())
        rounds.extend([t] * len(new))
    return CenterList(np.asarray(chosen, dtype=np.intp), np.asarray(rounds), float(costs.sum()), exhausted)


def kmeans_parallel(X, cfg: ParallelConfig, rng: np.random.Generator) -> CenterList:
    """k-means|| oversampling: one weighted-uniform center, then ``cfg.rounds``
    rounds of independent inclusion with probability ``min(1, lam(x))``.

    ``exhausted`` is set if the cost hit zero and the remaining rounds were
    skipped.
    """
    return _oversample(as_dataset(X), cfg, rng, poisson=False)


def kmeans_parallel_pois(X, cfg: ParallelConfig, rng: np.random.Generator) -> CenterList:
    """As :func:`kmeans_parallel` with inclusion probability ``1 - exp(-lam(x))``."""
    return _oversample(as_dataset(X), cfg, rng, poisson=True)


def kmeans_parallel_pruned(X, cfg: ParallelConfig, rng: np.random.Generator, poisson: bool = False) -> CenterList:
    """Oversample with k-means|| and prune to ``cfg.k`` centers.

    If oversampling produced at most ``k`` centers they are returned as is.
    """
    X = as_dataset(X)
    over = _oversample(X, cfg, rng, poisson)
    if len(over) <= cfg.k:
        return over
    return prune(X, over, cfg.k, rng)


def _parts(partition, n: int) -> list[np.ndarray]:
    if isinstance(partition, np.ndarray) and partition.ndim == 1 and partition.shape[0] == n:
        labels = partition
        return [np.flatnonzero(labels == c) for c in np.unique(labels)]
    parts = [np.asarray(P, dtype=np.intp) for P in partition]
    seen = np.concatenate(parts) if parts else np.empty(0, dtype=np.intp)
    if seen.shape[0] != n or np.unique(seen).shape[0] != n:
        raise ValueError("partition must cover every point exactly once")
    return parts


def pois_round_clusterwise(X, partition, cache: CostCache, ell: float, rng: np.random.Generator) -> np.ndarray:
    """One Poisson-variant round simulated cluster by cluster.

    For each part ``P`` draw ``Z ~ Poisson(lam(P))`` and then ``Z`` points of
    ``P`` with replacement, each with probability ``lam(x) / lam(P)``.  Returns
    the drawn indices in draw order; duplicates are kept (they collapse when
    added to a center set).
    """
    X = as_dataset(X)
    lam = sampling_rates(cache, ell)
    out = []
    for P in _parts(partition, X.n):
        rate = lam[P].sum()
        if not rate > 0:
            continue
        z = rng.poisson(rate)
        if z:
            out.append(P[rng.choice(P.shape[0], size=z, p=lam[P] / rate)])
    if not out:
        return np.empty(0, dtype=np.intp)
    return np.concatenate(out)
