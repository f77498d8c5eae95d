"""Closed-form approximation guarantees for k-means++, bi-criteria k-means++,
k-means|| and Exponential Race k-means++, plus prior-work comparators.

All logarithms are natural.  Factor functions accept numpy arrays and
broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def kmeanspp_factor(k):
    """``5 (ln k + 2)``."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 1):
        raise ValueError("k must be >= 1")
    out = 5.0 * (np.log(k) + 2.0)
    return float(out) if out.ndim == 0 else out


def bicriteria_branches(k, delta):
    """The two bi-criteria factors ``(first, second)`` before taking the minimum.

    first  = 5 (2 + 1/(2e) + max(ln(2k/delta), 0))
    second = 5 (1 + k / (e (delta - 1)))   (infinite for delta = 1)
    """
    k = np.asarray(k, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 1):
        raise ValueError("delta must be >= 1")
    first = 5.0 * (2.0 + 1.0 / (2.0 * math.e) + np.maximum(np.log(2.0 * k / delta), 0.0))
    with np.errstate(divide="ignore"):
        second = np.where(delta > 1, 5.0 * (1.0 + k / (math.e * (delta - 1.0))), np.inf)
    return first, second


def bicriteria_factor(k, delta):
    """Expected-cost factor of k-means++ with ``k + delta`` centers against OPT_k."""
    first, second = bicriteria_branches(k, delta)
    out = np.minimum(first, second)
    return float(out) if out.ndim == 0 else out


def wei_factor(k, delta):
    """Earlier bi-criteria comparator ``8 (1 + phi k / delta)``."""
    k = np.asarray(k, dtype=float)
    delta = np.asarray(delta, dtype=float)
    out = 8.0 * (1.0 + GOLDEN * k / delta)
    return float(out) if out.ndim == 0 else out


def contraction(k: float, ell: float) -> float:
    """Per-round shrink factor gamma of the k-means|| bound:
    ``exp(-ell/k)`` for ``ell < k`` and ``k / (e ell)`` otherwise."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    if ell < k:
        return math.exp(-ell / k)
    return k / (math.e * ell)


def parallel_bound(k: float, ell: float, T: int, cost1: float, optk: float) -> float:
    """Expected cost after T rounds of k-means|| (no pruning):
    ``gamma^T cost1 + 5 optk / (1 - gamma)``.

    ``T`` counts rounds after the initial uniform center, so the value bounds
    the cost of the center set those T rounds produce.  At ``T = 0`` the
    additive term is still the closed-form geometric limit, so the value is
    ``cost1 + 5 optk / (1 - gamma)``.
    """
    g = contraction(k, ell)
    return g**T * cost1 + 5.0 * optk / (1.0 - g)


def beta_param(k: float, ell: float) -> float:
    """``beta = k (1 - exp(-ell/k)) / ell``."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    return k * -math.expm1(-ell / k) / ell


def f_step(beta: float, x):
    """One application of ``x -> (1 - beta x / (x + 1)) x``."""
    return (1.0 - beta * x / (x + 1.0)) * x


def f_recurrence(beta: float, t: int, x):
    """``F_t(x)`` defined by ``F_0(x) = x`` and ``F_{t+1}(x) = F_t(f_step(x))``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    for _ in range(t):
        x = f_step(beta, x)
    return x


def f_trajectory(beta: float, t_max: int, x0: float = 1.0) -> np.ndarray:
    """``[F_0(x0), ..., F_{t_max}(x0)]``."""
    out = np.empty(t_max + 1)
    x = x0
    for t in range(t_max + 1):
        out[t] = x
        x = f_step(beta, x)
    return out


def decay_offset(beta: float) -> int:
    """``t0 = ceil(2 (1 - beta) / beta)``."""
    return math.ceil(2.0 * (1.0 - beta) / beta)


def f_decay_bound(beta: float, t):
    """``2 / (beta (t + t0))``; valid for starting points ``x0 <= 2 / (beta t0)``."""
    t0 = decay_offset(beta)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = 2.0 / (beta * (t + t0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ConvergenceBounds:
    """Late-round bounds for the Poisson variant of k-means||.

    ``asymptotic`` is the ``(18 / (beta (T - T0 + t0)) + 5) optk`` form (needs
    ``ell >= k`` and ``T >= T0 = ln(opt1/optk)``); ``two_regime`` is the form
    with ``t_ell`` rounds of burn-in.  ``None`` marks a bound whose
    preconditions fail.
    """

    asymptotic: float | None
    two_regime: float | None
    beta: float
    t0: int
    T0: float
    t_ell: float


def parallel_convergence_bound(k: float, ell: float, T: int, opt1: float, optk: float) -> ConvergenceBounds:
    beta = beta_param(k, ell)
    t0 = decay_offset(beta)
    T0 = math.log(opt1 / optk)
    g = contraction(k, ell)
    # number of rounds for g^t * opt1 to fall to optk
    t_ell = T0 / math.log(1.0 / g)
    asym = None
    if ell >= k and T >= T0:
        asym = (18.0 / (beta * (T - T0 + t0)) + 5.0) * optk
    two = None
    if T >= t_ell:
        two = (2.0 / (beta * (T - t_ell + t0)) * (6.0 - g) / (1.0 - g) + 5.0) * optk
    return ConvergenceBounds(asym, two, beta, t0, T0, t_ell)


@dataclass(frozen=True)
class RaceBounds:
    """Round and cost guarantees of Exponential Race k-means++.

    ``rounds`` is the leading expression ``ceil(k/ell) + ln(2 opt1/optk)``; the
    multiplicative ``1 + o_k(1)`` is not computable and is dropped, so treat
    it as asymptotic.  ``rounds_proof`` is the looser ``2e ceil(k/ell)`` form
    that appears inside the argument.
    """

    rounds: float
    rounds_proof: float
    cost: float
    asymptotic: bool = True


def er_bounds(k: int, ell: float, r_star: int | None, opt1: float, optk: float) -> RaceBounds:
    c = math.ceil(k / ell)
    tail = math.log(2.0 * opt1 / optk)
    cost = kmeanspp_factor(k) * optk
    if r_star is not None:
        cost += 2.0 * r_star * (4.0 * k / (math.e * ell * r_star)) ** r_star * opt1
    return RaceBounds(c + tail, 2.0 * math.e * c + tail, cost)


def bahmani_bound(k: float, ell: float, T: int, opt1: float, optk: float) -> float:
    """Original k-means|| guarantee ``16/(1-a) optk + ((1+a)/2)^T opt1`` with
    ``a = exp(-(1 - exp(-ell/(2k))))``."""
    a = math.exp(-(1.0 - math.exp(-ell / (2.0 * k))))
    return 16.0 / (1.0 - a) * optk + ((1.0 + a) / 2.0) ** T * opt1


def bachem_bound(k: float, ell: float, T: int, opt1: float, optk: float) -> float:
    """``26 optk + 2 (k/(e ell))^T opt1`` (stated for ``ell >= k``)."""
    return 26.0 * optk + 2.0 * (k / (math.e * ell)) ** T * opt1


@dataclass
class BoundTable:
    inputs: dict
    values: dict[str, float | None] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, float | None]]:
        return list(self.values.items())


def bound_table(
    k: int,
    ell: float | None = None,
    T: int | None = None,
    delta: int | None = None,
    r_star: int | None = None,
    opt1: float | None = None,
    optk: float | None = None,
    cost1: float | None = None,
) -> BoundTable:
    """Evaluate every applicable guarantee for one configuration.

    Factors are unitless; entries ending in ``_cost`` are absolute costs and
    need ``opt1``/``optk``.  ``cost1`` defaults to ``2 opt1``, the expected
    cost of a uniformly chosen first center.
    """
    if cost1 is None and opt1 is not None:
        cost1 = 2.0 * opt1
    tab = BoundTable(dict(k=k, ell=ell, T=T, delta=delta, r_star=r_star, opt1=opt1, optk=optk, cost1=cost1))
    v = tab.values
    v["kmeanspp_factor"] = kmeanspp_factor(k)
    v["arthur_vassilvitskii_factor"] = 8.0 * (math.log(k) + 2.0)
    if delta is not None and delta >= 1:
        first, second = bicriteria_branches(k, delta)
        v["bicriteria_factor"] = bicriteria_factor(k, delta)
        v["bicriteria_first_branch"] = float(first)
        v["bicriteria_second_branch"] = float(second) if np.isfinite(second) else None
        v["wei_factor"] = wei_factor(k, delta)
    have_opt = opt1 is not None and optk is not None and optk > 0
    if ell is not None:
        beta = beta_param(k, ell)
        v["beta"] = beta
        v["t0"] = float(decay_offset(beta))
        v["gamma"] = contraction(k, ell)
        if ell >= k:
            v["parallel_additive_factor"] = 5.0 / (1.0 - contraction(k, ell))
        if T is not None and have_opt:
            v["parallel_cost"] = parallel_bound(k, ell, T, cost1, optk)
            v["bahmani_cost"] = bahmani_bound(k, ell, T, opt1, optk)
            if ell >= k:
                v["bachem_cost"] = bachem_bound(k, ell, T, opt1, optk)
            cb = parallel_convergence_bound(k, ell, T, opt1, optk)
            v["convergence_asymptotic_cost"] = cb.asymptotic
            v["convergence_two_regime_cost"] = cb.two_regime
            v["f_decay_bound"] = f_decay_bound(beta, T)
        if have_opt:
            rb = er_bounds(k, ell, r_star, opt1, optk)
            v["er_rounds"] = rb.rounds
            v["er_rounds_proof_form"] = rb.rounds_proof
            v["er_cost"] = rb.cost
    return tab
