"""Exponential Race k-means++ picks the same centers in distribution as
sequential k-means++, but in a handful of rounds.

Run:  python3 demos/02_exponential_race.py
"""

import numpy as np

from kmseed import RaceConfig, er_kmeanspp, kmeanspp, make_rng, synthetic_blobs, tv_distance

# distribution check on a five point instance
P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 3.0], [-1.0, 1.0]])
rng = make_rng(0)
n = 50_000
er = [er_kmeanspp(P, RaceConfig(3, 3.0), rng).centers.key() for _ in range(n)]
pp = [kmeanspp(P, 3, rng).key() for _ in range(n)]
pp2 = [kmeanspp(P, 3, rng).key() for _ in range(n)]
print(f"TV(race, k-means++)      = {tv_distance(er, pp).tv_distance:.4f}")
print(f"TV(k-means++, k-means++) = {tv_distance(pp, pp2).tv_distance:.4f}   (sampling noise)")

# round counts on a larger instance
inst = synthetic_blobs(50, 40, 5, 3.0, rng)
k = 50
for mult in (0.25, 1.0, 4.0):
    res = [er_kmeanspp(inst.dataset, RaceConfig(k, mult * k), rng) for _ in range(50)]
    rounds = np.array([r.rounds_used for r in res])
    z = np.concatenate([r.tentative_sizes for r in res])
    print(f"ell = {mult:4.2f} k: rounds {rounds.mean():5.2f} (max {rounds.max()}), mean |Z| per round {z.mean():6.2f}")
