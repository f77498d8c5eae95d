import math

import numpy as np
import pytest

from kmseed import make_rng
from kmseed.diagnostics import tv_distance
from kmseed.geometry import as_dataset, new_cache, total_cost
from kmseed.parallel import (
    ParallelConfig,
    coupled_round,
    inclusion_probs,
    kmeans_parallel,
    kmeans_parallel_pois,
    kmeans_parallel_pruned,
    pois_round_clusterwise,
    sampling_rates,
)
from oracles import poisson_round_set_distribution


def test_config_validation():
    with pytest.raises(ValueError):
        ParallelConfig(0, 1.0, 1)
    with pytest.raises(ValueError):
        ParallelConfig(2, 0.0, 1)
    with pytest.raises(ValueError):
        ParallelConfig(2, 1.0, 0)


def test_rates_sum_to_ell():
    lam = sampling_rates(np.array([1.0, 2.0, 0.0, 5.0]), 3.0)
    assert lam.sum() == pytest.approx(3.0)
    assert lam[2] == 0.0
    assert np.all(sampling_rates(np.zeros(3), 2.0) == 0)


def test_inclusion_probs():
    lam = np.array([0.0, 0.5, 1.0, 4.0])
    np.testing.assert_allclose(inclusion_probs(lam, False), [0, 0.5, 1, 1])
    np.testing.assert_allclose(inclusion_probs(lam, True), 1 - np.exp(-lam))
    assert np.all(inclusion_probs(lam, True) <= inclusion_probs(lam, False))


def test_large_ell_takes_every_positive_cost_point():
    # lam >= 1 everywhere: k-means|| includes every point with positive cost
    P = np.array([[0.0], [1.0], [2.0]])
    X = as_dataset(P)
    for _ in range(50):
        cl = kmeans_parallel(X, ParallelConfig(1, 1e6, 1), make_rng(_))
        assert sorted(cl.indices) == [0, 1, 2]


def test_tiny_ell_rarely_samples():
    P = np.random.default_rng(0).normal(size=(50, 2))
    sizes = [len(kmeans_parallel(P, ParallelConfig(2, 1e-9, 3), make_rng(s))) for s in range(100)]
    assert max(sizes) == 1


def test_expected_round_size_is_ell():
    P = np.random.default_rng(1).normal(size=(200, 2))
    rng = make_rng(1)
    sizes = np.array([len(kmeans_parallel_pois(P, ParallelConfig(10, 5.0, 1), rng)) - 1 for _ in range(3000)])
    # Pois-variant: expected count sum(1 - exp(-lam)) <= ell
    assert sizes.mean() <= 5.0 + 3 * sizes.std() / math.sqrt(len(sizes))


def test_rounds_recorded_and_cost():
    P = np.random.default_rng(2).normal(size=(100, 2))
    cl = kmeans_parallel(P, ParallelConfig(5, 5.0, 4), make_rng(2))
    assert cl.rounds[0] == 0 and np.all(np.diff(cl.rounds) >= 0) and cl.rounds.max() <= 4
    assert cl.unique
    assert cl.cost == pytest.approx(total_cost(P, P[cl.indices]))


def test_exhausted_when_cost_zero():
    cl = kmeans_parallel(np.zeros((4, 1)), ParallelConfig(2, 2.0, 3), make_rng(0))
    assert cl.exhausted and len(cl) == 1


def test_pruned_returns_k():
    P = np.random.default_rng(3).normal(size=(150, 2))
    cl = kmeans_parallel_pruned(P, ParallelConfig(6, 6.0, 3), make_rng(3))
    assert len(cl) == 6
    assert cl.cost == pytest.approx(total_cost(P, P[cl.indices]))


def test_pruned_small_oversample_passthrough():
    P = np.random.default_rng(4).normal(size=(30, 2))
    cl = kmeans_parallel_pruned(P, ParallelConfig(10, 1e-9, 1), make_rng(4))
    assert len(cl) == 1


def test_coupling_subset():
    X = as_dataset(np.random.default_rng(5).normal(size=(40, 2)))
    cache = new_cache(X, X.rows([0]), source_index=[0])
    rng = make_rng(5)
    for _ in range(500):
        a, b = coupled_round(cache, 8.0, rng)
        assert np.all(~a | b)


def test_clusterwise_matches_exact_set_distribution():
    P = np.array([[0.0], [0.5], [4.0], [5.0]])
    X = as_dataset(P)
    cache = new_cache(X, [[2.0]])
    exact = poisson_round_set_distribution(cache.costs.tolist(), 2.0)
    rng = make_rng(6)
    n = 60_000
    emp = [frozenset(pois_round_clusterwise(X, [[0, 1], [2, 3]], cache, 2.0, rng).tolist()) for _ in range(n)]
    ref = [s for s, p in exact.items() for _ in range(int(round(p * n)))]
    assert tv_distance(emp, ref).tv_distance < 0.015


def test_clusterwise_partition_checks():
    X = as_dataset(np.arange(4.0))
    cache = new_cache(X, [[10.0]])
    with pytest.raises(ValueError):
        pois_round_clusterwise(X, [[0, 1], [2]], cache, 1.0, make_rng(0))
    labels = np.array([0, 0, 1, 1])
    out = pois_round_clusterwise(X, labels, cache, 1.0, make_rng(0))
    assert out.dtype.kind == "i"
