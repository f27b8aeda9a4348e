"""Node embeddings: random-walk skip-gram training and Katz-proximity SVD.

The skip-gram trainer is deliberately self-contained: embeddings must be
bitwise reproducible given (graph, config, seed), across processes, because
attack fitness values and experiment CSVs are compared byte-for-byte. All
randomness is drawn from numpy generators up front; the numba kernels are
purely sequential IEEE arithmetic.
"""

import math
from dataclasses import dataclass

import numba
import numpy as np

__all__ = [
    "DeepWalkConfig",
    "random_walks",
    "deepwalk",
    "hope",
    "sgns_loss",
    "sgns_gradients",
]


@dataclass
class DeepWalkConfig:
    """Walk and skip-gram hyperparameters.

    Defaults follow the common setting for this family of experiments:
    10 walks of length 40 per node, window 5, one epoch of negative-sampling
    SGD with learning rate decaying linearly from 0.025 to 0.0001.
    """

    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    dim: int = 16
    epochs: int = 1
    negative_samples: int = 5
    initial_lr: float = 0.025
    final_lr: float = 0.0001

    def __post_init__(self):
        if min(self.walks_per_node, self.walk_length, self.window, self.dim, self.epochs) < 1:
            raise ValueError("walk/window/dim/epoch parameters must be positive")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.window >= self.walk_length:
            raise ValueError("window must be smaller than walk_length")
        if self.negative_samples < 1:
            raise ValueError("negative_samples must be positive")
        if not (0 < self.final_lr <= self.initial_lr):
            raise ValueError("need 0 < final_lr <= initial_lr")


# -- numba kernels -------------------------------------------------------------


@numba.njit(cache=True, nogil=True)
def _fill_walks(indptr, indices, starts, uniforms, out, out_len):
    for w in range(starts.shape[0]):
        v = starts[w]
        out[w, 0] = v
        length = 1
        for t in range(uniforms.shape[1]):
            lo = indptr[v]
            deg = indptr[v + 1] - lo
            if deg == 0:
                break
            v = indices[lo + int(uniforms[w, t] * deg)]
            out[w, length] = v
            length += 1
        out_len[w] = length


@numba.njit(cache=True, nogil=True)
def _count_pairs(out_len, window):
    total = 0
    for w in range(out_len.shape[0]):
        L = out_len[w]
        for i in range(L):
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > L - 1:
                hi = L - 1
            total += hi - lo
    return total


@numba.njit(cache=True, nogil=True)
def _fill_pairs(walks, out_len, window, centers, contexts):
    t = 0
    for w in range(out_len.shape[0]):
        L = out_len[w]
        for i in range(L):
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > L - 1:
                hi = L - 1
            for j in range(lo, hi + 1):
                if j == i:
                    continue
                centers[t] = walks[w, i]
                contexts[t] = walks[w, j]
                t += 1


@numba.njit(inline="always")
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _alias_table(probs):
    """Vose alias tables for O(1) categorical sampling."""
    k = probs.size
    prob = np.zeros(k)
    alias = np.zeros(k, dtype=np.int32)
    scaled = probs * k
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    scaled = scaled.copy()
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] + scaled[s] - 1.0
        (small if scaled[l] < 1.0 else large).append(l)
    for i in large:
        prob[i] = 1.0
    for i in small:
        prob[i] = 1.0
    return prob, alias


@numba.njit(inline="always")
def _alias_draw(prob, alias, r):
    u = r * prob.shape[0]
    j = int(u)
    if j >= prob.shape[0]:
        j = prob.shape[0] - 1
    if u - j < prob[j]:
        return j
    return alias[j]


@numba.njit(cache=True, nogil=True)
def _train_sgns(w_in, w_out, centers, contexts, draws, prob, alias, step0, total_steps, lr0, lr1):
    dim = w_in.shape[1]
    k = draws.shape[1]
    grad = np.empty(dim)
    for p in range(centers.shape[0]):
        step = step0 + p
        if total_steps > 1:
            lr = lr0 + (lr1 - lr0) * (step / (total_steps - 1))
        else:
            lr = lr0
        c = centers[p]
        o = contexts[p]
        for q in range(dim):
            grad[q] = 0.0
        dot = 0.0
        for q in range(dim):
            dot += w_in[c, q] * w_out[o, q]
        g = (1.0 - _sigmoid(dot)) * lr
        for q in range(dim):
            grad[q] += g * w_out[o, q]
            w_out[o, q] += g * w_in[c, q]
        for j in range(k):
            tgt = _alias_draw(prob, alias, draws[p, j])
            if tgt == o:
                continue
            dot = 0.0
            for q in range(dim):
                dot += w_in[c, q] * w_out[tgt, q]
            g = -_sigmoid(dot) * lr
            for q in range(dim):
                grad[q] += g * w_out[tgt, q]
                w_out[tgt, q] += g * w_in[c, q]
        for q in range(dim):
            w_in[c, q] += grad[q]


# -- public operations ----------------------------------------------------------


def _packed_walks(graph, cfg, rng):
    if graph.n == 0:
        raise ValueError("cannot walk on an empty graph")
    n, wpn, length = graph.n, cfg.walks_per_node, cfg.walk_length
    starts = np.empty(n * wpn, dtype=np.int32)
    row = 0
    for _ in range(wpn):
        order = rng.permutation(n)
        starts[row : row + n] = order
        row += n
    uniforms = rng.random((n * wpn, length - 1))
    indptr, indices = graph.csr()
    out = np.zeros((n * wpn, length), dtype=np.int32)
    out_len = np.zeros(n * wpn, dtype=np.int64)
    _fill_walks(indptr, indices, starts, uniforms, out, out_len)
    return out, out_len


def random_walks(graph, cfg, rng):
    """Generate the walk corpus: walks_per_node truncated walks per node.

    Every walk starts at its node and moves to uniformly random neighbors; a
    walk ends early only at a neighborless node. Walk order interleaves the
    nodes in a fresh shuffled order per pass, which is also the SGD
    consumption order. Deterministic given (graph, cfg, generator state).
    """
    out, out_len = _packed_walks(graph, cfg, rng)
    return [out[w, : out_len[w]].copy() for w in range(out.shape[0])]


def deepwalk(graph, cfg=None, rng=None):
    """Embed a graph with skip-gram over random walks.

    Returns a (n, dim) float64 matrix of input vectors. Negative samples are
    drawn from the degree^0.75 noise distribution; context vectors start at
    zero and input vectors uniform in [-0.5/dim, 0.5/dim]. Isolated nodes keep
    their initialization (length-1 walks produce no training pairs).
    """
    if cfg is None:
        cfg = DeepWalkConfig()
    if rng is None:
        raise ValueError("deepwalk requires an explicit seeded generator")
    if graph.n == 0:
        raise ValueError("cannot embed an empty graph")
    walks_rng, init_rng, train_rng = rng.spawn(3)
    walks, out_len = _packed_walks(graph, cfg, walks_rng)

    w_in = (init_rng.random((graph.n, cfg.dim)) - 0.5) / cfg.dim
    w_out = np.zeros((graph.n, cfg.dim))

    n_pairs = int(_count_pairs(out_len, cfg.window))
    if n_pairs == 0:
        return w_in
    centers = np.empty(n_pairs, dtype=np.int32)
    contexts = np.empty(n_pairs, dtype=np.int32)
    _fill_pairs(walks, out_len, cfg.window, centers, contexts)

    weights = graph.degrees.astype(np.float64) ** 0.75
    total_weight = weights.sum()
    if total_weight == 0.0:
        weights = np.ones(graph.n)
        total_weight = float(graph.n)
    prob, alias = _alias_table(weights / total_weight)

    total_steps = n_pairs * cfg.epochs
    chunk = 1 << 19
    step = 0
    for _ in range(cfg.epochs):
        for lo in range(0, n_pairs, chunk):
            hi = min(lo + chunk, n_pairs)
            draws = train_rng.random((hi - lo, cfg.negative_samples))
            _train_sgns(
                w_in,
                w_out,
                centers[lo:hi],
                contexts[lo:hi],
                draws,
                prob,
                alias,
                step,
                total_steps,
                cfg.initial_lr,
                cfg.final_lr,
            )
            step += hi - lo
    return w_in


def sgns_loss(center_vec, context_vec, negative_vecs):
    """Negative-sampling loss of one (center, context, negatives) update."""
    pos = float(center_vec @ context_vec)
    loss = -_log_sigmoid(pos)
    for neg in negative_vecs:
        loss -= _log_sigmoid(-float(center_vec @ neg))
    return loss


def sgns_gradients(center_vec, context_vec, negative_vecs):
    """Analytic gradients of :func:`sgns_loss` w.r.t. each vector."""
    sig = 1.0 / (1.0 + np.exp(-(center_vec @ context_vec)))
    g_center = (sig - 1.0) * context_vec
    g_context = (sig - 1.0) * center_vec
    g_negs = []
    for neg in negative_vecs:
        s = 1.0 / (1.0 + np.exp(-(center_vec @ neg)))
        g_center = g_center + s * neg
        g_negs.append(s * center_vec)
    return g_center, g_context, g_negs


def _log_sigmoid(x):
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


# -- Katz-proximity embedding ----------------------------------------------------


def spectral_radius(matrix, tol=1e-8, max_iters=1000):
    """Spectral radius of a symmetric nonnegative matrix by power iteration.

    Iterates on the shifted matrix A + cI (c = max row sum) so bipartite
    +/-lambda eigenvalue pairs cannot make the iteration oscillate; for a
    nonnegative matrix the radius equals the largest eigenvalue.
    """
    n = matrix.shape[0]
    if n == 0:
        return 0.0
    shift = float(matrix.sum(axis=1).max())
    if shift == 0.0:
        return 0.0
    v = np.full(n, 1.0 / math.sqrt(n))
    last = 0.0
    for _ in range(max_iters):
        w = matrix @ v + shift * v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - last) <= tol * max(1.0, norm):
            break
        last = norm
    return float(abs(v @ (matrix @ v)))


def hope(graph, dim, beta=None, dense_cutoff=5000):
    """Katz-proximity embedding via truncated SVD.

    Computes S = (I - beta*A)^-1 * beta*A, truncates its SVD at rank dim/2 and
    returns [U sqrt(S), V sqrt(S)] stacked column-wise as a (n, dim) matrix.
    `beta` defaults to half the convergence bound 1/sigma_max(A).
    """
    if dim % 2 != 0 or dim <= 0:
        raise ValueError("dim must be a positive even integer")
    if graph.n == 0:
        raise ValueError("cannot embed an empty graph")
    if dim // 2 > graph.n:
        raise ValueError(f"dim/2 = {dim // 2} exceeds the node count {graph.n}")
    a = graph.adjacency_matrix()
    sigma = spectral_radius(a)
    if beta is None:
        beta = 0.5 / sigma if sigma > 0 else 1.0
    else:
        beta = float(beta)
        if beta <= 0:
            raise ValueError("beta must be positive")
        if sigma > 0 and beta >= 1.0 / sigma:
            raise ValueError(
                f"beta={beta} does not satisfy beta < 1/sigma_max(A) = {1.0 / sigma:.6g}"
            )
    k = dim // 2
    if graph.n <= dense_cutoff:
        s_matrix = np.linalg.solve(np.eye(graph.n) - beta * a, beta * a)
        u, s, vt = np.linalg.svd(s_matrix)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    else:
        u, s, vt = _katz_svds(a, beta, k)
    scale = np.sqrt(s)
    return np.hstack([u * scale, vt.T * scale])


def _katz_svds(a, beta, k):
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    n = a.shape[0]
    lu = spla.splu(sp.csc_matrix(sp.eye(n) - beta * sp.csr_matrix(a)))
    ba = beta * a

    op = spla.LinearOperator(
        (n, n),
        matvec=lambda x: lu.solve(ba @ x),
        rmatvec=lambda x: ba @ lu.solve(x, trans="T"),
    )
    u, s, vt = spla.svds(op, k=k, v0=np.full(n, 1.0 / math.sqrt(n)))
    order = np.argsort(-s)
    return u[:, order], s[order], vt[order]
