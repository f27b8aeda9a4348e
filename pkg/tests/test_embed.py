import hashlib
import subprocess
import sys

import numpy as np
import pytest

from edattack import DeepWalkConfig, Graph, deepwalk, derive_rng, hope, random_walks
from edattack.embed import (
    _alias_table,
    _train_sgns,
    sgns_gradients,
    sgns_loss,
    spectral_radius,
)


# -- config -----------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        DeepWalkConfig(window=40, walk_length=40)
    with pytest.raises(ValueError):
        DeepWalkConfig(dim=1)
    with pytest.raises(ValueError):
        DeepWalkConfig(initial_lr=0.001, final_lr=0.01)
    with pytest.raises(ValueError):
        DeepWalkConfig(walks_per_node=0)


# -- walks -------------------------------------------------------------------------


def test_walks_isolated_node():
    g = Graph(1, [])
    walks = random_walks(g, DeepWalkConfig(walks_per_node=2, walk_length=5, window=2), derive_rng(0))
    assert len(walks) == 2
    assert all(w.tolist() == [0] for w in walks)


def test_walks_forced_alternation():
    g = Graph(2, [(0, 1)])
    walks = random_walks(g, DeepWalkConfig(walks_per_node=1, walk_length=3, window=1), derive_rng(0))
    by_start = {int(w[0]): w.tolist() for w in walks}
    assert by_start[0] == [0, 1, 0]
    assert by_start[1] == [1, 0, 1]


def test_walks_counts_and_starts(karate_graph):
    cfg = DeepWalkConfig(walks_per_node=10, walk_length=40)
    walks = random_walks(karate_graph, cfg, derive_rng(3))
    assert len(walks) == 340
    starts = sorted(int(w[0]) for w in walks)
    assert starts == sorted(list(range(34)) * 10)
    adj = {v: set(map(int, karate_graph.adj[v])) for v in range(34)}
    for w in walks:
        assert len(w) <= 40
        for a, b in zip(w[:-1], w[1:]):
            assert int(b) in adj[int(a)]


def test_walks_deterministic(karate_graph, fast_dw):
    a = random_walks(karate_graph, fast_dw, derive_rng(9))
    b = random_walks(karate_graph, fast_dw, derive_rng(9))
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


# -- skip-gram training ----------------------------------------------------------------


def test_deepwalk_deterministic_in_process(karate_graph, fast_dw):
    r1 = deepwalk(karate_graph, fast_dw, derive_rng(7))
    r2 = deepwalk(karate_graph, fast_dw, derive_rng(7))
    assert np.array_equal(r1, r2)


def test_deepwalk_deterministic_across_processes(karate_graph, fast_dw):
    local = deepwalk(karate_graph, fast_dw, derive_rng(21))
    digest = hashlib.sha256(local.tobytes()).hexdigest()
    code = (
        "import hashlib\n"
        "from edattack import DeepWalkConfig, deepwalk, derive_rng\n"
        "from edattack.datasets import load_dataset\n"
        "g = load_dataset('karate').graph\n"
        "cfg = DeepWalkConfig(walks_per_node=3, walk_length=10, window=3, dim=4)\n"
        "r = deepwalk(g, cfg, derive_rng(21))\n"
        "print(hashlib.sha256(r.tobytes()).hexdigest())\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == digest


def test_deepwalk_shape_and_finiteness(karate_graph):
    r = deepwalk(karate_graph, DeepWalkConfig(dim=16), derive_rng(5))
    assert r.shape == (34, 16)
    assert np.isfinite(r).all()


def test_deepwalk_isolated_and_disconnected_nodes_finite():
    g = Graph(7, [(0, 1), (1, 2), (4, 5)])  # nodes 3 and 6 isolated
    r = deepwalk(g, DeepWalkConfig(walks_per_node=4, walk_length=8, window=2, dim=4), derive_rng(8))
    assert np.isfinite(r).all()
    # untouched rows keep their small uniform initialization
    assert np.abs(r[3]).max() <= 0.5 / 4
    assert np.abs(r[6]).max() <= 0.5 / 4


def test_deepwalk_separates_components():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    cfg = DeepWalkConfig(dim=4)
    wins = 0
    for seed in range(20):
        r = deepwalk(g, cfg, derive_rng("components", seed))
        intra, inter = [], []
        for i in range(6):
            for j in range(i + 1, 6):
                d = float(np.linalg.norm(r[i] - r[j]))
                (intra if (i < 3) == (j < 3) else inter).append(d)
        if np.mean(intra) < np.mean(inter):
            wins += 1
    assert wins >= 18


def test_sgns_gradient_matches_finite_differences():
    rng = derive_rng(13)
    center = rng.normal(size=4)
    context = rng.normal(size=4)
    negs = [rng.normal(size=4) for _ in range(3)]
    g_center, g_context, g_negs = sgns_gradients(center, context, negs)

    def fd(vec, apply):
        grad = np.zeros_like(vec)
        h = 1e-6
        for i in range(vec.size):
            up, down = vec.copy(), vec.copy()
            up[i] += h
            down[i] -= h
            grad[i] = (apply(up) - apply(down)) / (2 * h)
        return grad

    fd_center = fd(center, lambda v: sgns_loss(v, context, negs))
    fd_context = fd(context, lambda v: sgns_loss(center, v, negs))
    assert np.abs(fd_center - g_center).max() / np.abs(fd_center).max() < 1e-4
    assert np.abs(fd_context - g_context).max() / max(np.abs(fd_context).max(), 1e-12) < 1e-4
    for j in range(3):
        fd_neg = fd(negs[j], lambda v: sgns_loss(center, context, negs[:j] + [v] + negs[j + 1:]))
        assert np.abs(fd_neg - g_negs[j]).max() / max(np.abs(fd_neg).max(), 1e-12) < 1e-4


def test_kernel_single_update_matches_analytic_gradient_step():
    # one training pair, distinct negatives: kernel step == -lr * gradients
    rng = derive_rng(14)
    w_in = rng.normal(size=(6, 4))
    w_out = rng.normal(size=(6, 4))
    probs = np.full(6, 1.0 / 6.0)
    prob, alias = _alias_table(probs)
    c, o = 0, 2
    draws = np.array([[0.5, 0.9]])  # alias-samples two distinct nodes != o
    from edattack.embed import _alias_draw

    negs_idx = [int(_alias_draw(prob, alias, r)) for r in draws[0]]
    assert o not in negs_idx and len(set(negs_idx)) == 2
    lr = 0.05
    expect_in = w_in.copy()
    expect_out = w_out.copy()
    g_center, g_context, g_negs = sgns_gradients(w_in[c], w_out[o], [w_out[t] for t in negs_idx])
    expect_in[c] -= lr * g_center
    expect_out[o] -= lr * g_context
    for t, g in zip(negs_idx, g_negs):
        expect_out[t] -= lr * g

    centers = np.array([c], dtype=np.int32)
    contexts = np.array([o], dtype=np.int32)
    _train_sgns(w_in, w_out, centers, contexts, draws, prob, alias, 0, 1, lr, lr)
    assert np.allclose(w_in, expect_in, atol=1e-12)
    assert np.allclose(w_out, expect_out, atol=1e-12)


def test_alias_table_distribution():
    weights = np.array([5.0, 1.0, 3.0, 1.0])
    probs = weights / weights.sum()
    prob, alias = _alias_table(probs)
    from edattack.embed import _alias_draw

    draws = derive_rng(15).random(200000)
    counts = np.zeros(4)
    for r in draws:
        counts[_alias_draw(prob, alias, r)] += 1
    assert np.abs(counts / counts.sum() - probs).max() < 0.01


# -- Katz-SVD embedding -------------------------------------------------------------


def test_hope_empty_graph_all_zeros():
    g = Graph(4, [])
    e = hope(g, 4)
    assert e.shape == (4, 4)
    assert np.all(e == 0.0)


def test_hope_single_edge_symmetry():
    g = Graph(2, [(0, 1)])
    e = hope(g, 2, beta=0.5)
    assert np.allclose(e[0], e[1], atol=1e-6)


def test_hope_complete_graph_rows_equal():
    # dim=2 keeps the truncation outside K4's degenerate eigenspace, where the
    # SVD basis is arbitrary and automorphic rows legitimately differ
    g = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    e = hope(g, 2)
    for i in range(1, 4):
        assert np.allclose(e[0], e[i], atol=1e-6)


def test_hope_validation(karate_graph):
    with pytest.raises(ValueError):
        hope(karate_graph, 5)  # odd dim
    sigma = spectral_radius(karate_graph.adjacency_matrix())
    with pytest.raises(ValueError):
        hope(karate_graph, 4, beta=1.0 / sigma)  # at the convergence bound
    with pytest.raises(ValueError):
        hope(karate_graph, 4, beta=-0.1)


def test_hope_rank_ordering_karate(karate_graph):
    # oracle: dense Katz matrix and its SVD truncations
    beta = 0.01
    a = karate_graph.adjacency_matrix()
    s = np.linalg.solve(np.eye(34) - beta * a, beta * a)

    def reconstruction(dim):
        e = hope(karate_graph, dim, beta=beta)
        k = dim // 2
        return e[:, :k] @ e[:, k:].T

    err8 = np.linalg.norm(s - reconstruction(16))
    err4 = np.linalg.norm(s - reconstruction(8))
    assert err8 < err4


def test_hope_matches_dense_svd_oracle(karate_graph):
    beta = 0.01
    a = karate_graph.adjacency_matrix()
    s = np.linalg.solve(np.eye(34) - beta * a, beta * a)
    u, sv, vt = np.linalg.svd(s)
    k = 4
    oracle = u[:, :k] * np.sqrt(sv[:k]) @ np.diag(np.ones(k))
    got = hope(karate_graph, 8, beta=beta)[:, :k]
    # singular vectors match up to sign
    for col in range(k):
        assert np.allclose(np.abs(got[:, col]), np.abs(oracle[:, col]), atol=1e-8)


def test_hope_finite_on_disconnected():
    g = Graph(6, [(0, 1), (2, 3)])
    e = hope(g, 4)
    assert np.isfinite(e).all()


def test_hope_operator_path_matches_dense(karate_graph):
    dense = hope(karate_graph, 8, beta=0.02)
    sparse = hope(karate_graph, 8, beta=0.02, dense_cutoff=1)
    k = 4
    rec_dense = dense[:, :k] @ dense[:, k:].T
    rec_sparse = sparse[:, :k] @ sparse[:, k:].T
    assert np.allclose(rec_dense, rec_sparse, atol=1e-6)


def test_spectral_radius_known_value():
    g = Graph(2, [(0, 1)])
    assert abs(spectral_radius(g.adjacency_matrix()) - 1.0) < 1e-6
    star = Graph(5, [(0, i) for i in range(1, 5)])
    assert abs(spectral_radius(star.adjacency_matrix()) - 2.0) < 1e-6


def test_hope_dim_exceeding_rank_rejected():
    g = Graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        hope(g, 8)  # rank dim/2 = 4 > 2 nodes
