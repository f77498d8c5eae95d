"""Exponential Race k-means++ with lazy per-round updates.

Every point runs a Poisson process whose rate is its current cost; the next
center is whichever process fires first, which reproduces the k-means++
distribution exactly.  Time is split into rounds ``[t_{i-1}, t_i]`` with
``t_i = t_{i-1} + ell / cost(X, C_{t_{i-1}})``.  At the start of a round every
point draws a fresh unit exponential ``S(x)`` and gets the tentative firing
time ``tau(x) = S(x) / lam(x)``; only the tentative set
``Z = {x : t_{i-1} + tau(x) <= t_i}`` can fire during the round, so rates are
updated for ``Z`` alone and the full cost pass happens once per round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import as_dataset, sq_dists
from .seeding import CenterList, _prefix_pick


@dataclass(frozen=True)
class RaceConfig:
    """``k`` centers, per-round rate budget ``ell`` and an optional round cap
    ``r_star`` (``None`` runs until ``k`` centers are chosen)."""

    k: int
    ell: float
    r_star: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.ell > 0:
            raise ValueError(f"ell must be positive, got {self.ell}")
        if self.r_star is not None and self.r_star < 0:
            raise ValueError(f"r_star must be >= 0, got {self.r_star}")


@dataclass
class RaceResult:
    centers: CenterList
    rounds_used: int
    tentative_sizes: np.ndarray = field(repr=False)
    boundaries: np.ndarray = field(repr=False)
    fallback_rounds: int = 0


def er_kmeanspp(X, cfg: RaceConfig, rng: np.random.Generator) -> RaceResult:
    """Run Exponential Race k-means++.

    Returns the centers (``rounds`` holds the race round of each center, 0 for
    the initial pick), the number of rounds used, the size of ``Z`` at the
    start of every round and the round boundaries ``t_0, t_1, ...``.

    A round whose initial ``Z`` is empty still selects one center: the point
    with the smallest ``tau``.  The round clock is not reset by that pick; the
    next round starts at the current boundary.
    """
    X = as_dataset(X)
    n = X.n
    w = X.weights
    unit = X.unit_weights

    first = _prefix_pick(w, rng)
    costs = sq_dists(X, X.row(first))
    if not unit:
        costs *= w
    costs[first] = 0.0
    chosen = [first]
    chosen_round = [0]
    sizes: list[int] = []
    fallbacks = 0

    total = float(costs.sum())
    boundaries = [0.0]
    R = 0
    exhausted = False
    if len(chosen) < cfg.k and not total > 0:
        exhausted = True
    elif len(chosen) < cfg.k:
        boundaries.append(cfg.ell / total)

    while not exhausted and len(chosen) < cfg.k and (cfg.r_star is None or R < cfg.r_star):
        R += 1
        t_start, t_end = boundaries[-2], boundaries[-1]
        S = rng.standard_exponential(n)
        with np.errstate(divide="ignore"):
            tau = np.where(costs > 0, S / costs, math.inf)
        Z = np.flatnonzero(t_start + tau <= t_end)
        sizes.append(Z.shape[0])
        new: list[int] = []

        if Z.shape[0] == 0:
            x = int(np.argmin(tau))
            new.append(x)
            fallbacks += 1
        else:
            t = t_start
            lam = costs[Z]
            rem = S[Z]
            tz = tau[Z]
            while Z.shape[0] and len(chosen) + len(new) < cfg.k:
                j = int(np.argmin(tz))  # Z stays sorted, so ties go to the lowest index
                x = int(Z[j])
                dt = tz[j]
                new.append(x)
                rem = np.maximum(rem - lam * dt, 0.0)
                diff = X.rows(Z) - X.row(x)
                d2 = np.einsum("ij,ij->i", diff, diff)
                lam = np.minimum(lam, d2 if unit else w[Z] * d2)
                lam[j] = 0.0
                with np.errstate(divide="ignore"):
                    tz = np.where(lam > 0, rem / np.where(lam > 0, lam, 1.0), math.inf)
                t += dt
                keep = t + tz <= t_end
                Z, lam, rem, tz = Z[keep], lam[keep], rem[keep], tz[keep]

        for x in new:
            d2 = sq_dists(X, X.row(x))
            if not unit:
                d2 *= w
            np.minimum(costs, d2, out=costs)
        costs[new] = 0.0
        chosen.extend(new)
        chosen_round.extend([R] * len(new))
        total = float(costs.sum())
        if len(chosen) >= cfg.k:
            break
        if not total > 0:
            exhausted = True
            break
        boundaries.append(t_end + cfg.ell / total)

    centers = CenterList(
        np.asarray(chosen, dtype=np.intp), np.asarray(chosen_round), float(costs.sum()), exhausted
    )
    return RaceResult(centers, R, np.asarray(sizes, dtype=np.intp), np.asarray(boundaries), fallbacks)


def er_expected_rounds_estimate(X, cfg: RaceConfig, trials: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo mean number of rounds (with standard error) over ``trials``
    unbounded runs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    X = as_dataset(X)
    free = RaceConfig(cfg.k, cfg.ell, None)
    rounds = np.array([er_kmeanspp(X, free, rng).rounds_used for _ in range(trials)], dtype=float)
    se = rounds.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
    return float(rounds.mean()), float(se)
