"""Covered/uncovered cost accounting along a seeding trajectory and
distribution-equivalence statistics.

Given a reference partition ``P_1..P_k`` and an ordered center list, after
``t`` centers:

* ``H_t`` - cost of clusters that contain a center (covered),
* ``U_t`` - cost of the remaining clusters,
* ``Htilde_t`` - covered clusters frozen at their cost right after the first
  hit, uncovered clusters counted as ``5 OPT_1(P_i)``,
* ``M_t`` - centers that landed in an already covered cluster (misses),
* ``K_t`` - clusters still uncovered,
* ``Psi_t = M_t U_t / K_t`` (0 when ``K_t = 0``).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable

import numpy as np

from .geometry import as_dataset, new_cache, opt1, sq_dists
from .seeding import CenterList, kmeanspp


@dataclass
class CoverageReport:
    """Series indexed by step ``t = 1..m`` (row ``t - 1``)."""

    covered_cost: np.ndarray
    uncovered_cost: np.ndarray
    total_cost: np.ndarray
    proxy_cost: np.ndarray
    misses: np.ndarray
    uncovered_clusters: np.ndarray
    psi: np.ndarray
    hit: np.ndarray
    opt_k: float
    k: int

    @property
    def proxy_initial(self) -> float:
        """``Htilde_0 = 5 OPT_k``."""
        return 5.0 * self.opt_k


def _labels_of(partition, n: int) -> np.ndarray:
    if isinstance(partition, np.ndarray) and partition.ndim == 1 and partition.shape[0] == n:
        return partition.astype(np.intp)
    labels = np.full(n, -1, dtype=np.intp)
    for c, P in enumerate(partition):
        labels[np.asarray(P, dtype=np.intp)] = c
    if np.any(labels < 0):
        raise ValueError("partition must cover every point")
    return labels


def coverage_report(X, partition, centers: CenterList | Iterable[int]) -> CoverageReport:
    """Replay ``centers`` in order and record the coverage series."""
    X = as_dataset(X)
    labels = _labels_of(partition, X.n)
    k = int(labels.max()) + 1
    idx = np.asarray(centers.indices if isinstance(centers, CenterList) else list(centers), dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= X.n):
        raise ValueError("center index outside the dataset")
    opt1s = np.array([opt1(X.subset(np.flatnonzero(labels == c)))[1] for c in range(k)])
    m = idx.shape[0]
    H = np.empty(m)
    U = np.empty(m)
    tot = np.empty(m)
    Ht = np.empty(m)
    M = np.empty(m, dtype=np.intp)
    K = np.empty(m, dtype=np.intp)
    hit = np.empty(m, dtype=bool)
    covered = np.zeros(k, dtype=bool)
    frozen = 5.0 * opt1s
    costs = None
    misses = 0
    for t, i in enumerate(idx):
        d2 = X.weights * sq_dists(X, X.row(i))
        costs = d2 if costs is None else np.minimum(costs, d2)
        costs[i] = 0.0
        c = labels[i]
        per_cluster = np.bincount(labels, weights=costs, minlength=k)
        hit[t] = not covered[c]
        if hit[t]:
            covered[c] = True
            frozen[c] = per_cluster[c]
        else:
            misses += 1
        on_covered = covered[labels]
        H[t] = math.fsum(costs[on_covered])
        U[t] = math.fsum(costs[~on_covered])
        tot[t] = math.fsum(costs)
        Ht[t] = math.fsum(frozen)
        M[t] = misses
        K[t] = k - int(covered.sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        psi = np.where(K > 0, M * U / np.maximum(K, 1), 0.0)
    return CoverageReport(H, U, tot, Ht, M, K, psi, hit, float(opt1s.sum()), k)


REPORT_COLUMNS = ("instance", "algorithm", "seed", "t", "hit", "H", "U", "Htilde", "M", "K", "Psi")


def report_rows(rep: CoverageReport, instance: str, algorithm: str, seed) -> list[tuple]:
    """One row per step, keyed by ``(instance, algorithm, seed, t)``; step 0
    carries only the definitional ``Htilde_0``."""
    rows = [(instance, algorithm, seed, 0, "", "", "", rep.proxy_initial, 0, rep.k, 0.0)]
    for t in range(len(rep.hit)):
        rows.append(
            (
                instance,
                algorithm,
                seed,
                t + 1,
                int(rep.hit[t]),
                float(rep.covered_cost[t]),
                float(rep.uncovered_cost[t]),
                float(rep.proxy_cost[t]),
                int(rep.misses[t]),
                int(rep.uncovered_clusters[t]),
                float(rep.psi[t]),
            )
        )
    return rows


@dataclass(frozen=True)
class EquivalenceResult:
    tv_distance: float
    trials_a: int
    trials_b: int
    outcomes: int


def tv_distance(samples_a: Iterable[Hashable], samples_b: Iterable[Hashable]) -> EquivalenceResult:
    """Total variation distance ``1/2 sum |p_a - p_b|`` between two empirical
    outcome distributions."""
    ca, cb = Counter(samples_a), Counter(samples_b)
    na, nb = sum(ca.values()), sum(cb.values())
    if na == 0 or nb == 0:
        raise ValueError("both sample sets must be nonempty")
    support = set(ca) | set(cb)
    tv = 0.5 * sum(abs(ca[o] / na - cb[o] / nb) for o in support)
    return EquivalenceResult(min(max(tv, 0.0), 1.0), na, nb, len(support))


def supermartingale_probe(X, partition, trials: int, rng: np.random.Generator, steps: int | None = None):
    """Monte Carlo mean and standard error of ``Htilde_t`` over k-means++ runs.

    Returns ``(means, stderrs)`` for ``t = 0..steps`` (default ``steps = k``);
    entry 0 is the definitional ``5 OPT_k``.
    """
    X = as_dataset(X)
    labels = _labels_of(partition, X.n)
    k = int(labels.max()) + 1
    steps = k if steps is None else steps
    series = np.empty((trials, steps + 1))
    for r in range(trials):
        rep = coverage_report(X, labels, kmeanspp(X, steps, rng))
        series[r, 0] = rep.proxy_initial
        series[r, 1 : len(rep.proxy_cost) + 1] = rep.proxy_cost
        series[r, len(rep.proxy_cost) + 1 :] = rep.proxy_cost[-1]
    se = series.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(steps + 1)
    return series.mean(axis=0), se


def conditional_hit_costs(X, subset, preset_points, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Cost of ``subset`` after adding one center drawn from it by D^2 sampling
    against ``preset_points``, for ``draws`` independent draws.

    The center is drawn directly from the restriction of the D^2 distribution
    to ``subset`` (equivalent to rejection-sampling the unrestricted draw).
    Post-pick costs are computed once per distinct point location.
    """
    X = as_dataset(X)
    subset = np.asarray(subset, dtype=np.intp)
    Y = X.subset(subset)
    base = new_cache(Y, preset_points).costs
    if not base.sum() > 0:
        raise ValueError("subset is already fully covered")
    prefix = np.cumsum(base)
    u = (1.0 - rng.random(draws)) * prefix[-1]
    picks = np.searchsorted(prefix, u, side="left")
    locs, inverse = np.unique(Y.dense(), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    loc_cost = np.array([float(np.minimum(base, Y.weights * sq_dists(Y, p)).sum()) for p in locs])
    return loc_cost[inverse[picks]]
