"""Downstream tasks that quantify attack damage.

Community detection (k-means on embeddings, label propagation, spectral
modularity bisection) is scored with normalized mutual information against
ground-truth labels; node classification (softmax regression on embeddings)
with micro/macro F1. Partitions and label vectors are plain int arrays with
contiguous ids.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "kmeans",
    "nmi",
    "RegressionConfig",
    "LogisticModel",
    "train_logistic",
    "logistic_loss_grad",
    "stratified_split",
    "ClassificationReport",
    "f1_report",
    "lpa",
    "em_communities",
    "modularity",
]


def _compact(assignment):
    """Relabel to contiguous ids in order of first appearance."""
    assignment = np.asarray(assignment, dtype=np.int64)
    mapping = {}
    out = np.empty_like(assignment)
    for i, c in enumerate(assignment):
        c = int(c)
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


# -- k-means ---------------------------------------------------------------------


def _kmeanspp_init(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            cum = np.cumsum(d2 / total)
            cum[-1] = 1.0
            idx = int(np.searchsorted(cum, rng.random(), side="right"))
        centers[c] = points[idx]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(points, centers, max_iters):
    """One Lloyd run; returns (assignment, per-iteration WCSS trace)."""
    n, k = points.shape[0], centers.shape[0]
    assign = None
    trace = []
    for _ in range(max_iters):
        d2 = cdist(points, centers, metric="sqeuclidean")
        new_assign = d2.argmin(axis=1)
        row = np.arange(n)
        for c in range(k):
            if not (new_assign == c).any():
                far = int(d2[row, new_assign].argmax())
                centers[c] = points[far]
                d2[:, c] = ((points - centers[c]) ** 2).sum(axis=1)
                new_assign = d2.argmin(axis=1)
        if assign is not None and (new_assign == assign).all():
            break
        assign = new_assign
        for c in range(k):
            centers[c] = points[assign == c].mean(axis=0)
        trace.append(float(((points - centers[assign]) ** 2).sum()))
    return assign, trace


def kmeans(embedding, k, restarts=10, rng=None, max_iters=300):
    """Cluster embedding rows with Lloyd's algorithm and k-means++ seeding.

    Runs `restarts` independently seeded attempts and keeps the assignment
    with the lowest within-cluster sum of squares. Clusters that empty out
    are reseeded to the point farthest from its assigned center. Labels are
    contiguous ids ordered by first appearance.
    """
    points = np.asarray(embedding, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("embedding must be a 2-d matrix")
    n = points.shape[0]
    k = int(k)
    if k < 1 or k > n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if rng is None:
        raise ValueError("kmeans requires an explicit seeded generator")
    best_assign, best_wcss = None, np.inf
    for attempt_rng in rng.spawn(int(restarts)):
        centers = _kmeanspp_init(points, k, attempt_rng)
        assign, trace = _lloyd(points, centers, max_iters)
        wcss = trace[-1] if trace else 0.0
        if wcss < best_wcss:
            best_wcss, best_assign = wcss, assign
    return _compact(best_assign)


# -- normalized mutual information -------------------------------------------------


def nmi(pred, truth):
    """Normalized mutual information between two partitions, in [0, 1].

    Identical partitions (up to label permutation) score 1; if either side is
    a single block and they differ, the normalizer vanishes and the score is
    0 by convention.
    """
    pred = _compact(pred)
    truth = _compact(truth)
    if pred.shape != truth.shape:
        raise ValueError("partitions must have the same length")
    n = pred.shape[0]
    if n == 0:
        raise ValueError("partitions are empty")
    if (pred == truth).all():
        return 1.0
    kp = int(pred.max()) + 1
    kt = int(truth.max()) + 1
    if kp == 1 or kt == 1:
        return 0.0
    table = np.zeros((kp, kt))
    np.add.at(table, (pred, truth), 1.0)
    pxy = table / n
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    nz = pxy > 0
    mi = float((pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz])).sum())
    hx = float(-(px[px > 0] * np.log(px[px > 0])).sum())
    hy = float(-(py[py > 0] * np.log(py[py > 0])).sum())
    if hx <= 0.0 or hy <= 0.0:
        return 0.0
    return float(np.clip(mi / np.sqrt(hx * hy), 0.0, 1.0))


# -- logistic regression ------------------------------------------------------------


@dataclass
class RegressionConfig:
    l2: float = 1e-4
    lr: float = 0.1
    max_iters: int = 5000
    tol: float = 1e-7
    standardize: bool = True


@dataclass
class LogisticModel:
    weights: np.ndarray  # (classes, features + 1), bias last
    classes: np.ndarray
    mean: np.ndarray
    scale: np.ndarray

    def decision(self, features):
        x = (np.asarray(features, dtype=np.float64) - self.mean) / self.scale
        x = np.hstack([x, np.ones((x.shape[0], 1))])
        return x @ self.weights.T

    def predict(self, features):
        return self.classes[self.decision(features).argmax(axis=1)]


def logistic_loss_grad(weights, x, y, l2):
    """Mean cross-entropy of softmax regression with L2 on non-bias weights.

    `x` must already carry the bias column; returns (loss, gradient) with the
    gradient shaped like `weights`.
    """
    n = x.shape[0]
    z = x @ weights.T
    z -= z.max(axis=1, keepdims=True)
    expz = np.exp(z)
    prob = expz / expz.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    loss = float(-np.log(prob[rows, y] + 1e-300).mean())
    loss += 0.5 * l2 * float((weights[:, :-1] ** 2).sum())
    gz = prob.copy()
    gz[rows, y] -= 1.0
    grad = gz.T @ x / n
    grad[:, :-1] += l2 * weights[:, :-1]
    return loss, grad


def train_logistic(embedding, labels, train_idx, cfg=None):
    """Fit multinomial logistic regression on the training rows.

    Features are standardized with statistics of the training split only.
    Deterministic: weights start at zero and plain gradient descent runs until
    the gradient norm drops below `tol` or `max_iters` is hit. Raises if any
    class of `labels` is missing from the training split.
    """
    cfg = cfg or RegressionConfig()
    points = np.asarray(embedding, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    train_idx = np.asarray(train_idx, dtype=np.int64)
    if train_idx.size == 0:
        raise ValueError("training index set is empty")
    classes = np.unique(labels)
    train_classes = set(np.unique(labels[train_idx]).tolist())
    missing = [int(c) for c in classes if int(c) not in train_classes]
    if missing:
        raise ValueError(f"classes {missing} are missing from the training split")

    x = points[train_idx]
    if cfg.standardize:
        mean = x.mean(axis=0)
        scale = x.std(axis=0)
        scale[scale == 0.0] = 1.0
    else:
        mean = np.zeros(points.shape[1])
        scale = np.ones(points.shape[1])
    x = (x - mean) / scale
    x = np.hstack([x, np.ones((x.shape[0], 1))])
    class_index = {int(c): i for i, c in enumerate(classes)}
    y = np.array([class_index[int(c)] for c in labels[train_idx]])

    weights = np.zeros((classes.size, x.shape[1]))
    for _ in range(cfg.max_iters):
        _, grad = logistic_loss_grad(weights, x, y, cfg.l2)
        weights -= cfg.lr * grad
        if np.abs(grad).max() < cfg.tol:
            break
    return LogisticModel(weights=weights, classes=classes, mean=mean, scale=scale)


def stratified_split(labels, train_fraction=0.8, rng=None):
    """Per-class shuffled split; every class keeps at least one training row."""
    labels = np.asarray(labels, dtype=np.int64)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        n_train = max(1, int(round(train_fraction * idx.size)))
        train.extend(idx[:n_train].tolist())
        test.extend(idx[n_train:].tolist())
    return np.array(sorted(train)), np.array(sorted(test))


# -- F1 ------------------------------------------------------------------------------


@dataclass
class ClassificationReport:
    micro_f1: float
    macro_f1: float
    per_class: list = field(default_factory=list)  # (label, precision, recall, f1, support)


def f1_report(pred, truth):
    """Micro/macro F1 over the classes present in `truth`.

    Per-class precision and recall use the 0/0 -> 0 convention, so a class
    never predicted contributes an F1 of 0 to the macro average. Micro F1
    aggregates TP/FP/FN over the truth classes.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth must have the same length")
    classes = np.unique(truth)
    per_class = []
    tp_sum = fp_sum = fn_sum = 0
    f1s = []
    for c in classes:
        tp = int(((pred == c) & (truth == c)).sum())
        fp = int(((pred == c) & (truth != c)).sum())
        fn = int(((pred != c) & (truth == c)).sum())
        support = int((truth == c).sum())
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append((int(c), precision, recall, f1, support))
        f1s.append(f1)
        tp_sum += tp
        fp_sum += fp
        fn_sum += fn
    micro_p = tp_sum / (tp_sum + fp_sum) if tp_sum + fp_sum else 0.0
    micro_r = tp_sum / (tp_sum + fn_sum) if tp_sum + fn_sum else 0.0
    micro = 2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r else 0.0
    return ClassificationReport(
        micro_f1=float(micro),
        macro_f1=float(np.mean(f1s)) if f1s else 0.0,
        per_class=per_class,
    )


# -- label propagation ----------------------------------------------------------------


def lpa(graph, max_iters=100, rng=None):
    """Asynchronous label propagation.

    Starts from unique labels; every sweep visits nodes in a fresh random
    order and each node adopts the plurality label among its neighbors (ties
    broken uniformly). Stops at a fixed point: every node already holds one
    of its neighborhood's plurality labels.
    """
    if rng is None:
        raise ValueError("lpa requires an explicit seeded generator")
    n = graph.n
    labels = np.arange(n, dtype=np.int64)
    adj = graph.adj
    for _ in range(max_iters):
        order = rng.permutation(n)
        for v in order:
            nbrs = adj[v]
            if nbrs.size == 0:
                continue
            counts = np.bincount(labels[nbrs])
            best = counts.max()
            top = np.flatnonzero(counts == best)
            labels[v] = int(top[rng.integers(top.size)])
        stable = True
        for v in range(n):
            nbrs = adj[v]
            if nbrs.size == 0:
                continue
            counts = np.bincount(labels[nbrs])
            own = counts[labels[v]] if labels[v] < counts.size else 0
            if own != counts.max():
                stable = False
                break
        if stable:
            break
    return _compact(labels)


# -- spectral modularity bisection ------------------------------------------------------


def modularity(graph, partition):
    """Modularity Q of a partition: intra-edge fraction minus its expectation."""
    partition = np.asarray(partition)
    m = graph.m
    if m == 0:
        raise ValueError("modularity is undefined for an edgeless graph")
    intra = {}
    for u, v in graph.edges:
        if partition[u] == partition[v]:
            c = int(partition[u])
            intra[c] = intra.get(c, 0) + 1
    q = 0.0
    degrees = graph.degrees
    for c in np.unique(partition):
        degree_sum = float(degrees[partition == c].sum())
        q += intra.get(int(c), 0) / m - (degree_sum / (2 * m)) ** 2
    return float(q)


def _leading_eigen(block, tol=1e-10, max_iters=10**4):
    """Algebraically largest eigenpair by shifted power iteration.

    The start vector is a deterministic index ramp with the mean removed
    (the all-ones direction is the trivial null vector of the block).
    """
    size = block.shape[0]
    shift = float(np.abs(block).sum(axis=1).max())
    shifted = block + shift * np.eye(size)
    v = np.arange(size, dtype=np.float64)
    v -= v.mean()
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return 0.0, np.zeros(size)
    v /= norm
    for _ in range(max_iters):
        w = shifted @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        w /= norm
        if np.abs(w - v).max() < tol:
            v = w
            break
        v = w
    return float(v @ (block @ v)), v


def em_communities(graph, min_gain=1e-10):
    """Newman-style spectral community detection by recursive bisection.

    Splits each group by the sign of the leading eigenvector of its
    generalized modularity block and accepts the split only when it increases
    total modularity by more than `min_gain`. Fully deterministic.
    """
    if graph.m == 0:
        raise ValueError("spectral bisection needs at least one edge")
    n = graph.n
    a = graph.adjacency_matrix()
    degrees = graph.degrees.astype(np.float64)
    two_m = float(degrees.sum())
    b = a - np.outer(degrees, degrees) / two_m

    assignment = np.zeros(n, dtype=np.int64)
    next_id = 1
    stack = [np.arange(n)]
    while stack:
        members = stack.pop()
        if members.size < 2:
            continue
        block = b[np.ix_(members, members)]
        block = block - np.diag(block.sum(axis=1))
        value, vector = _leading_eigen(block)
        if value <= min_gain:
            continue
        side = vector >= 0.0
        if side.all() or (~side).all():
            continue
        s = np.where(side, 1.0, -1.0)
        gain = float(s @ block @ s) / (2.0 * two_m)
        if gain <= min_gain:
            continue
        group_b = members[~side]
        assignment[group_b] = next_id
        next_id += 1
        stack.append(members[side])
        stack.append(group_b)
    return _compact(assignment)
