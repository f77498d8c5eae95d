"""Seeding a small Gaussian mixture three ways and comparing against the
exact optimum.

Run:  python3 demos/01_seeding_basics.py
"""

import numpy as np

from kmseed import (
    BiCriteriaConfig,
    ParallelConfig,
    bicriteria_kmeanspp,
    brute_force_optk,
    kmeans_parallel_pruned,
    kmeanspp,
    kmeanspp_factor,
    make_rng,
)

rng = make_rng(7)
centers = np.array([[0.0, 0.0], [6.0, 0.0], [3.0, 5.0]])
X = np.vstack([c + rng.normal(scale=0.8, size=(4, 2)) for c in centers])  # 12 points
k = 3

optk = brute_force_optk(X, k)
print(f"exact OPT_{k} = {optk:.4f}")

trials = 5000
runs = {
    "k-means++": [kmeanspp(X, k, rng).cost for _ in range(trials)],
    "k-means++ with k+3 centers": [bicriteria_kmeanspp(X, BiCriteriaConfig(k, 3), rng).cost for _ in range(trials)],
    "k-means|| + prune (l=k, T=3)": [
        kmeans_parallel_pruned(X, ParallelConfig(k, float(k), 3), rng).cost for _ in range(trials)
    ],
}
for name, costs in runs.items():
    costs = np.asarray(costs)
    print(f"{name:32s} mean cost / OPT_k = {costs.mean() / optk:6.3f}   worst = {costs.max() / optk:7.3f}")

print(f"guarantee for k-means++ in expectation: {kmeanspp_factor(k):.3f} x OPT_k")
