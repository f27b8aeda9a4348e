"""Attack objective: how much a perturbation disturbs embedding distances.

The score of an adversarial graph is the row-wise absolute Pearson
correlation between the original and perturbed Euclidean distance matrices,
summed over nodes. A perturbation's fitness is one minus that sum normalized
by the node count, so fitness 0 means distances kept their structure and
fitness 1 means every row was decorrelated.
"""

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .graph import apply_perturbation

__all__ = [
    "distance_matrix",
    "row_correlation",
    "row_correlation_sum",
    "fitness",
    "deepwalk_embedder",
    "hope_embedder",
]


def distance_matrix(embedding):
    """Pairwise Euclidean distances between embedding rows.

    Each pair is computed once and mirrored, so the result is exactly
    symmetric with a zero diagonal.
    """
    emb = np.asarray(embedding, dtype=np.float64)
    if emb.ndim != 2:
        raise ValueError("embedding must be a 2-d matrix")
    if not np.isfinite(emb).all():
        raise ValueError("embedding contains non-finite values")
    if emb.shape[0] < 2:
        return np.zeros((emb.shape[0], emb.shape[0]))
    return squareform(pdist(emb, metric="euclidean"))


def row_correlation(a, b, exclude_index=None):
    """Pearson correlation of two vectors, optionally skipping one index.

    Constant inputs (zero variance after exclusion) correlate at 0 by
    convention. The result is clipped to [-1, 1].
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if exclude_index is not None:
        keep = np.ones(a.shape[0], dtype=bool)
        keep[exclude_index] = False
        a = a[keep]
        b = b[keep]
    if a.size < 2:
        return 0.0
    am = a - a.mean()
    bm = b - b.mean()
    denom = np.sqrt((am @ am) * (bm @ bm))
    if denom == 0.0:
        return 0.0
    return float(np.clip((am @ bm) / denom, -1.0, 1.0))


def row_correlation_sum(d_ref, d_hat):
    """Summed |Pearson| between matching rows of two distance matrices.

    Row i of each matrix is compared with its own index excluded, dropping
    the zero self-distance that would otherwise inflate the correlation.
    Returns a value in [0, n].
    """
    d_ref = np.asarray(d_ref, dtype=np.float64)
    d_hat = np.asarray(d_hat, dtype=np.float64)
    if d_ref.shape != d_hat.shape or d_ref.ndim != 2 or d_ref.shape[0] != d_ref.shape[1]:
        raise ValueError(f"distance matrices must share a square shape: "
                         f"{d_ref.shape} vs {d_hat.shape}")
    n = d_ref.shape[0]
    if n < 2:
        return 0.0
    off = ~np.eye(n, dtype=bool)
    a = d_ref[off].reshape(n, n - 1)
    b = d_hat[off].reshape(n, n - 1)
    am = a - a.mean(axis=1, keepdims=True)
    bm = b - b.mean(axis=1, keepdims=True)
    denom = np.sqrt((am * am).sum(axis=1) * (bm * bm).sum(axis=1))
    num = (am * bm).sum(axis=1)
    rho = np.zeros(n)
    ok = denom > 0.0
    rho[ok] = num[ok] / denom[ok]
    np.clip(rho, -1.0, 1.0, out=rho)
    return float(np.abs(rho).sum())


def fitness(graph, perturbation, d_ref, embedder, rng):
    """Fitness of a perturbation: 1 - row_correlation_sum / n.

    Applies the perturbation, embeds the perturbed graph with `embedder`
    (a callable ``(graph, rng) -> embedding``) and scores its distance matrix
    against the frozen reference `d_ref`. Lies in [0, 1]; higher disturbs
    distances more.
    """
    d_ref = np.asarray(d_ref, dtype=np.float64)
    if d_ref.shape != (graph.n, graph.n):
        raise ValueError("d_ref shape does not match the graph")
    perturbed = apply_perturbation(graph, perturbation)
    emb = embedder(perturbed, rng)
    d_hat = distance_matrix(emb)
    return 1.0 - row_correlation_sum(d_ref, d_hat) / graph.n


def deepwalk_embedder(cfg=None):
    """Embedder callable running skip-gram walks with the given config."""
    from .embed import DeepWalkConfig, deepwalk

    cfg = cfg or DeepWalkConfig()
    return lambda graph, rng: deepwalk(graph, cfg, rng)


def hope_embedder(dim=16, beta=None):
    """Embedder callable for the Katz-SVD method (rng is accepted, unused)."""
    from .embed import hope

    return lambda graph, rng: hope(graph, dim, beta=beta)
