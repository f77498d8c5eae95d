"""Instances with known optimal structure: the tight covered-cluster example,
the bi-criteria lower-bound construction, Gaussian blobs, and an exact
OPT_k oracle for tiny inputs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import Dataset, as_dataset, opt1

MAX_BRUTE_FORCE_N = 14


@dataclass(eq=False)
class GroundTruthInstance:
    """A dataset with a reference partition.

    Attributes:
        dataset: the points.
        labels: reference cluster of every point, ``0..k-1``.
        opt_k: cost of the reference partition (sum of per-cluster OPT_1).
        exact: whether the reference partition is known to be optimal.
        preset_points: fixed centers (coordinates, not data points) for
            conditional experiments.
        meta: generator parameters and derived constants.
    """

    dataset: Dataset
    labels: np.ndarray
    opt_k: float
    exact: bool = True
    preset_points: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1

    def parts(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.k)]


def partition_cost(X, labels) -> float:
    """Sum of OPT_1 over the parts given by ``labels``."""
    X = as_dataset(X)
    labels = np.asarray(labels)
    return float(sum(opt1(X.subset(np.flatnonzero(labels == c)))[1] for c in np.unique(labels)))


def tight_covered_instance(t: int) -> GroundTruthInstance:
    """``t`` points at 0 and one point at 1 on the line, with a fixed center at -1.

    Drawing one new center from the cluster by D^2 sampling against the fixed
    center leaves an expected cluster cost of ``5 t / (t + 4)`` while OPT_1 of
    the cluster is ``t / (t + 1)``; the ratio tends to 5.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    pts = np.zeros((t + 1, 1))
    pts[t, 0] = 1.0
    X = as_dataset(pts)
    labels = np.zeros(t + 1, dtype=np.intp)
    return GroundTruthInstance(
        X,
        labels,
        opt1(X)[1],
        preset_points=np.array([[-1.0]]),
        meta={"t": t, "expected_hit_cost": 5.0 * t / (t + 4.0)},
    )


def bicriteria_lb_instance(k: int, delta: int, N: int, edge_length: float | None = None) -> GroundTruthInstance:
    """Heavy simplex cluster plus ``k - 1`` light singletons.

    The heavy cluster is a regular ``N``-vertex simplex (scaled standard basis
    vectors in the first ``N`` coordinates).  Light point ``j`` sits at the
    simplex centroid plus ``sqrt(alpha)`` along coordinate ``N + j``, with
    ``alpha = ln(k / delta) / (4 delta)``; light points are ``sqrt(2 alpha)``
    apart.

    ``edge_length`` defaults to ``1 / sqrt(N - 1)``, which makes the heavy
    cluster's OPT_1 exactly 1/2 for every ``N`` (``sqrt(2 / (N - 1))`` gives
    1).  The instance is translated so the heavy cluster is *not*
    mean-centered: that keeps the point matrix sparse (CSR) and changes no
    distance.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 1 <= delta <= k:
        raise ValueError("need 1 <= delta <= k")
    if N < 2:
        raise ValueError("N must be >= 2")
    if edge_length is None:
        edge_length = 1.0 / math.sqrt(N - 1)
    alpha = math.log(k / delta) / (4.0 * delta)
    s = edge_length / math.sqrt(2.0)
    m = k - 1
    dim = N + m
    heavy = sp.csr_matrix((np.full(N, s), (np.arange(N), np.arange(N))), shape=(N, dim))
    rows = np.repeat(np.arange(m), N + 1)
    cols = np.concatenate([np.append(np.arange(N), N + j) for j in range(m)])
    vals = np.tile(np.append(np.full(N, s / N), math.sqrt(alpha)), m)
    light = sp.csr_matrix((vals, (rows, cols)), shape=(m, dim))
    X = as_dataset(sp.vstack([heavy, light], format="csr"))
    labels = np.concatenate([np.zeros(N, dtype=np.intp), np.arange(1, k, dtype=np.intp)])
    heavy_cost = opt1(X.subset(np.arange(N)))[1]
    return GroundTruthInstance(
        X,
        labels,
        heavy_cost,
        meta={"k": k, "delta": delta, "N": N, "alpha": alpha, "edge_length": edge_length, "heavy_opt1": heavy_cost},
    )


def synthetic_blobs(
    k: int,
    n_per: int,
    d: int,
    separation: float,
    rng: np.random.Generator,
    sigma: float = 1.0,
) -> GroundTruthInstance:
    """``k`` isotropic Gaussian blobs whose means are at least
    ``separation * sigma`` apart.  The reference cost is the per-blob OPT_1 sum,
    an upper bound on OPT_k (``exact=False``)."""
    if k < 1 or n_per < 1 or d < 1:
        raise ValueError("k, n_per and d must be >= 1")
    min_gap = separation * sigma
    side = max(min_gap, 1e-12) * max(k, 2) ** (1.0 / d) * 2.0
    means = np.empty((0, d))
    attempts = 0
    while means.shape[0] < k:
        cand = rng.uniform(0.0, side, size=d)
        if means.shape[0] == 0 or np.min(np.sum((means - cand) ** 2, axis=1)) >= min_gap**2:
            means = np.vstack([means, cand])
        attempts += 1
        if attempts % 1000 == 0:
            side *= 1.5
    pts = np.concatenate([rng.normal(mu, sigma, size=(n_per, d)) for mu in means])
    labels = np.repeat(np.arange(k), n_per)
    X = as_dataset(pts)
    return GroundTruthInstance(
        X,
        labels,
        partition_cost(X, labels),
        exact=False,
        meta={"k": k, "n_per": n_per, "d": d, "separation": separation, "sigma": sigma, "means": means},
    )


def _subset_costs(X: Dataset) -> np.ndarray:
    """OPT_1 of every subset of the points, indexed by bitmask."""
    n = X.n
    P = X.dense()
    P = P - P.mean(axis=0)
    w = X.weights
    masks = np.arange(1 << n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    W = bits @ w
    S = bits @ (w[:, None] * P)
    Q = bits @ (w * np.einsum("ij,ij->i", P, P))
    with np.errstate(invalid="ignore", divide="ignore"):
        cost = Q - np.einsum("ij,ij->i", S, S) / W
    cost[W == 0] = 0.0
    return np.maximum(cost, 0.0)


def optimal_partition(X, k: int) -> tuple[float, np.ndarray]:
    """Exact k-means optimum by dynamic programming over subsets.

    Minimises the summed OPT_1 over all partitions into at most ``k`` parts,
    which equals OPT_k.  Exponential in ``n``; limited to ``n <= 14``.
    """
    X = as_dataset(X)
    n = X.n
    if n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force OPT_k needs n <= {MAX_BRUTE_FORCE_N}, got {n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    full = (1 << n) - 1
    c1 = _subset_costs(X)
    best = c1.copy()
    choice = []  # per level: block containing the lowest member, or 0 for "fewer parts"
    for level in range(2, min(k, n) + 1):
        prev = best
        masks = [full] if level == min(k, n) else range(1, full + 1)
        cur = prev.copy()
        pick = np.zeros(full + 1, dtype=np.int64)
        for mask in masks:
            low = mask & -mask
            rest = mask ^ low
            b = prev[mask]
            arg = 0
            sub = rest
            while True:
                # block = low | (rest - sub): every split where the first block holds `low`
                block = low | (rest ^ sub)
                if block != mask:
                    v = c1[block] + prev[mask ^ block]
                    if v < b:
                        b, arg = v, block
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            cur[mask] = b
            pick[mask] = arg
        best = cur
        choice.append(pick)

    labels = np.empty(n, dtype=np.intp)
    mask, label = full, 0
    for pick in reversed(choice):
        block = int(pick[mask])
        if block:
            labels[[i for i in range(n) if block >> i & 1]] = label
            label += 1
            mask ^= block
    labels[[i for i in range(n) if mask >> i & 1]] = label
    return float(best[full]), labels


def brute_force_optk(X, k: int) -> float:
    """Exact OPT_k for at most 14 points."""
    return optimal_partition(X, k)[0]
