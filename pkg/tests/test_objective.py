import math

import numpy as np
import pytest

from edattack import (
    DeepWalkConfig,
    Perturbation,
    deepwalk,
    derive_rng,
    distance_matrix,
    fitness,
    row_correlation,
    row_correlation_sum,
)
from edattack.objective import deepwalk_embedder


# -- independent straight-from-formula oracle -----------------------------------


def pearson_bruteforce(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    dx = math.sqrt(sum((x - mx) ** 2 for x in xs))
    dy = math.sqrt(sum((y - my) ** 2 for y in ys))
    if dx == 0.0 or dy == 0.0:
        return 0.0
    return num / (dx * dy)


def phi_bruteforce(d, d_hat):
    n = d.shape[0]
    total = 0.0
    for i in range(n):
        xs = [d[i][j] for j in range(n) if j != i]
        ys = [d_hat[i][j] for j in range(n) if j != i]
        total += abs(pearson_bruteforce(xs, ys))
    return total


def random_distance_matrix(n, rng):
    r = rng.normal(size=(n, max(2, n // 2)))
    return distance_matrix(r)


# -- distance matrix ---------------------------------------------------------------


def test_distance_345():
    d = distance_matrix(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert d[0, 1] == d[1, 0] == 5.0


def test_distance_identical_rows():
    d = distance_matrix(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))
    assert d[0, 1] == 0.0


def test_distance_unit_simplex():
    d = distance_matrix(np.eye(2))
    assert abs(d[0, 1] - math.sqrt(2)) < 1e-12


def test_distance_rejects_nonfinite():
    with pytest.raises(ValueError):
        distance_matrix(np.array([[0.0, np.nan], [1.0, 2.0]]))


def test_distance_symmetry_and_triangle_inequality():
    rng = derive_rng("triangle")
    for _ in range(20):
        d = random_distance_matrix(12, rng)
        assert np.array_equal(d, d.T)
        assert (np.diag(d) == 0).all()
        assert (d >= 0).all()
        for i in range(12):
            for j in range(12):
                for k in range(12):
                    assert d[i, k] <= d[i, j] + d[j, k] + 1e-9


# -- row correlation ------------------------------------------------------------------


def test_row_correlation_perfect():
    assert row_correlation([1, 2, 3], [1, 2, 3]) == 1.0


def test_row_correlation_anti():
    assert row_correlation([1, 2, 3], [3, 2, 1]) == -1.0


def test_row_correlation_constant_convention():
    assert row_correlation([1, 1, 1], [1, 2, 3]) == 0.0


def test_row_correlation_mismatch():
    with pytest.raises(ValueError):
        row_correlation([1, 2], [1, 2, 3])


def test_row_correlation_exclusion():
    # excluding index 0 drops the pair that breaks perfect correlation
    a = [9.0, 1.0, 2.0, 3.0]
    b = [0.0, 2.0, 4.0, 6.0]
    assert row_correlation(a, b, exclude_index=0) == 1.0


# -- summed row correlation --------------------------------------------------------------


def test_row_correlation_sum_identity():
    d = random_distance_matrix(4, derive_rng(0))
    assert abs(row_correlation_sum(d, d) - 4.0) < 1e-12


def test_row_correlation_sum_affine_invariance():
    d = random_distance_matrix(6, derive_rng(1))
    j = 1.0 - np.eye(6)
    d_hat = 5.0 * d + 2.0 * j
    assert abs(row_correlation_sum(d, d_hat) - 6.0) < 1e-9


def test_row_correlation_sum_matches_bruteforce():
    rng = derive_rng(2)
    for n in (4, 5, 6, 8):
        for _ in range(25):
            a = random_distance_matrix(n, rng)
            b = random_distance_matrix(n, rng)
            assert abs(row_correlation_sum(a, b) - phi_bruteforce(a, b)) < 1e-12


def test_row_correlation_sum_permutation_invariance():
    rng = derive_rng(3)
    a = random_distance_matrix(7, rng)
    b = random_distance_matrix(7, rng)
    perm = rng.permutation(7)
    pa = a[np.ix_(perm, perm)]
    pb = b[np.ix_(perm, perm)]
    assert abs(row_correlation_sum(pa, pb) - row_correlation_sum(a, b)) < 1e-12


def test_row_correlation_sum_shape_mismatch():
    with pytest.raises(ValueError):
        row_correlation_sum(np.zeros((3, 3)), np.zeros((4, 4)))


# -- fitness -----------------------------------------------------------------------------


def test_fitness_zero_when_reference_returned(karate_graph):
    ref = derive_rng(4).normal(size=(34, 8))
    d_ref = distance_matrix(ref)
    stub = lambda graph, rng: ref
    assert fitness(karate_graph, Perturbation(), d_ref, stub, derive_rng(5)) == 0.0


def test_fitness_one_when_rows_constant(karate_graph):
    ref = derive_rng(6).normal(size=(34, 8))
    d_ref = distance_matrix(ref)
    stub = lambda graph, rng: np.ones((34, 8))  # all coincident -> zero distance rows
    assert fitness(karate_graph, Perturbation(), d_ref, stub, derive_rng(7)) == 1.0


def test_fitness_in_unit_interval_randomized(karate_graph):
    d_ref = distance_matrix(derive_rng(8).normal(size=(34, 6)))
    stub = lambda graph, rng: rng.normal(size=(34, 6))
    for seed in range(50):
        f = fitness(karate_graph, Perturbation(), d_ref, stub, derive_rng("unit", seed))
        assert 0.0 <= f <= 1.0


def test_fitness_empty_perturbation_below_self_consistency_threshold(karate_graph):
    """Distances of two independent embeddings of the SAME graph must look as
    self-consistent as an unperturbed fitness evaluation: the 95th percentile
    of the two-seed consistency distribution bounds the mean empty-P fitness."""
    cfg = DeepWalkConfig(dim=16)
    emb = deepwalk_embedder(cfg)
    consistency = []
    for trial in range(50):
        ra = deepwalk(karate_graph, cfg, derive_rng("selfcons-a", trial))
        rb = deepwalk(karate_graph, cfg, derive_rng("selfcons-b", trial))
        value = 1.0 - row_correlation_sum(distance_matrix(ra), distance_matrix(rb)) / 34
        consistency.append(value)
    t0 = float(np.quantile(consistency, 0.95))
    d_ref = distance_matrix(deepwalk(karate_graph, cfg, derive_rng("selfcons-ref")))
    values = [
        fitness(karate_graph, Perturbation(), d_ref, emb, derive_rng("selfcons-fit", s))
        for s in range(20)
    ]
    assert float(np.mean(values)) < t0
