"""Undirected unweighted graphs and edge-flip perturbations.

Nodes are dense integer ids ``0..n-1``. Edges are canonical ``(u, v)`` pairs
with ``u < v``; the same convention applies everywhere a node pair appears
(perturbations, sampled non-edges, chromosome genes).
"""

import math

import numpy as np

__all__ = [
    "Graph",
    "Perturbation",
    "ParseError",
    "load_edge_list",
    "read_edge_list",
    "load_labels",
    "read_labels",
    "apply_perturbation",
    "sample_non_edges",
    "search_space_size",
]


class ParseError(ValueError):
    """A malformed line in an edge-list or label file."""


def normalize_pair(u, v):
    u = int(u)
    v = int(v)
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) is not a valid node pair")
    if u < 0 or v < 0:
        raise ValueError(f"negative node id in pair ({u}, {v})")
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected graph: node count plus a canonical edge set.

    Construction normalizes and validates the edge set; after that the object
    is safe to share across threads. Derived views (sorted adjacency lists, a
    CSR layout for walk kernels, the dense adjacency matrix) are built lazily
    and cached.
    """

    __slots__ = ("n", "edges", "_adj", "_degrees", "_csr", "_dense", "_non_edges")

    def __init__(self, n, edges):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be nonnegative")
        canonical = set()
        for u, v in edges:
            pair = normalize_pair(u, v)
            if pair[1] >= n:
                raise ValueError(f"edge {pair} references a node >= n={n}")
            canonical.add(pair)
        self.n = n
        self.edges = frozenset(canonical)
        self._adj = None
        self._degrees = None
        self._csr = None
        self._dense = None
        self._non_edges = None

    # -- basic views ---------------------------------------------------------

    @property
    def m(self):
        return len(self.edges)

    @property
    def pair_count(self):
        return self.n * (self.n - 1) // 2

    @property
    def non_edge_count(self):
        return self.pair_count - self.m

    def _build_adj(self):
        if self._adj is None:
            buckets = [[] for _ in range(self.n)]
            for u, v in self.edges:
                buckets[u].append(v)
                buckets[v].append(u)
            self._adj = [np.array(sorted(b), dtype=np.int32) for b in buckets]
            deg = np.array([len(b) for b in buckets], dtype=np.int64)
            deg.flags.writeable = False
            self._degrees = deg
        return self._adj

    @property
    def adj(self):
        return self._build_adj()

    @property
    def degrees(self):
        self._build_adj()
        return self._degrees

    def neighbors(self, v):
        return self.adj[v]

    def has_edge(self, u, v):
        if u == v:
            return False
        return normalize_pair(u, v) in self.edges

    def csr(self):
        """(indptr, indices) adjacency layout for jitted walk kernels."""
        if self._csr is None:
            adj = self.adj
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for v in range(self.n):
                indptr[v + 1] = indptr[v] + len(adj[v])
            if self.n:
                indices = np.concatenate(adj) if indptr[-1] else np.empty(0, dtype=np.int32)
            else:
                indices = np.empty(0, dtype=np.int32)
            indices = indices.astype(np.int32, copy=False)
            indptr.flags.writeable = False
            indices.flags.writeable = False
            self._csr = (indptr, indices)
        return self._csr

    def adjacency_matrix(self):
        """Dense symmetric 0/1 adjacency matrix (float64)."""
        if self._dense is None:
            a = np.zeros((self.n, self.n))
            for u, v in self.edges:
                a[u, v] = 1.0
                a[v, u] = 1.0
            a.flags.writeable = False
            self._dense = a
        return self._dense

    def sorted_edges(self):
        return sorted(self.edges)

    def non_edges(self):
        """All non-edges in canonical order. Materialized once, cached."""
        if self._non_edges is None:
            out = []
            edge_set = self.edges
            for u in range(self.n):
                for v in range(u + 1, self.n):
                    if (u, v) not in edge_set:
                        out.append((u, v))
            self._non_edges = out
        return self._non_edges

    # -- dunder --------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class Perturbation:
    """A set of edge flips relative to some reference graph.

    ``additions`` must be non-edges of the reference and ``deletions`` existing
    edges; the two sets are disjoint by construction. Instances are plain
    immutable data.
    """

    __slots__ = ("additions", "deletions")

    def __init__(self, additions=(), deletions=()):
        adds = frozenset(normalize_pair(u, v) for u, v in additions)
        dels = frozenset(normalize_pair(u, v) for u, v in deletions)
        overlap = adds & dels
        if overlap:
            raise ValueError(f"pairs {sorted(overlap)} appear as both addition and deletion")
        self.additions = adds
        self.deletions = dels

    def validate_for(self, graph):
        """Raise ValueError unless this perturbation is valid for `graph`."""
        for u, v in self.additions | self.deletions:
            if v >= graph.n:
                raise ValueError(f"pair ({u}, {v}) out of range for n={graph.n}")
        bad = self.additions & graph.edges
        if bad:
            raise ValueError(f"additions {sorted(bad)} already present in the graph")
        missing = self.deletions - graph.edges
        if missing:
            raise ValueError(f"deletions {sorted(missing)} are not edges of the graph")

    def inverse(self):
        return Perturbation(additions=self.deletions, deletions=self.additions)

    @property
    def size(self):
        return len(self.additions) + len(self.deletions)

    def is_empty(self):
        return not self.additions and not self.deletions

    def to_dict(self):
        return {
            "add": [list(p) for p in sorted(self.additions)],
            "del": [list(p) for p in sorted(self.deletions)],
        }

    @classmethod
    def from_dict(cls, record):
        return cls(additions=record.get("add", ()), deletions=record.get("del", ()))

    def __eq__(self, other):
        if not isinstance(other, Perturbation):
            return NotImplemented
        return self.additions == other.additions and self.deletions == other.deletions

    def __hash__(self):
        return hash((self.additions, self.deletions))

    def __repr__(self):
        return f"Perturbation(add={sorted(self.additions)}, del={sorted(self.deletions)})"


# -- file formats -------------------------------------------------------------


def load_edge_list(text):
    """Parse edge-list text: two whitespace-separated ids per line.

    ``#`` comment lines and blank lines are ignored. Duplicate lines (in either
    orientation) collapse to one edge. Node count is ``max id + 1``.
    """
    edges = set()
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two node ids, got {len(parts)} tokens")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer node id in {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative node id in {line!r}")
        if u == v:
            raise ValueError(f"line {lineno}: self-loop {u} {v}")
        edges.add(normalize_pair(u, v))
        max_id = max(max_id, u, v)
    return Graph(max_id + 1, edges)


def read_edge_list(path):
    with open(path, "r", encoding="utf-8") as fh:
        return load_edge_list(fh.read())


def load_labels(text, n=None):
    """Parse a label file: ``node_id label`` per line.

    Label tokens are arbitrary strings mapped to dense class ids in order of
    first appearance. Returns an int64 array of length ``n`` (default: max node
    id + 1) with ``-1`` marking unlabeled nodes.
    """
    mapping = {}
    pairs = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'node_id label', got {line!r}")
        try:
            node = int(parts[0])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer node id in {line!r}") from None
        if node < 0:
            raise ParseError(f"line {lineno}: negative node id in {line!r}")
        token = parts[1]
        if token not in mapping:
            mapping[token] = len(mapping)
        pairs.append((node, mapping[token]))
        max_id = max(max_id, node)
    if n is None:
        n = max_id + 1
    labels = np.full(n, -1, dtype=np.int64)
    for node, cls in pairs:
        if node >= n:
            raise ParseError(f"node id {node} out of range for n={n}")
        labels[node] = cls
    return labels


def read_labels(path, n=None):
    with open(path, "r", encoding="utf-8") as fh:
        return load_labels(fh.read(), n=n)


# -- operations ----------------------------------------------------------------


def apply_perturbation(graph, perturbation):
    """Flip the perturbation's edges: result edges = (E | additions) - deletions."""
    perturbation.validate_for(graph)
    edges = (graph.edges | perturbation.additions) - perturbation.deletions
    return Graph(graph.n, edges)


# Above this many node pairs the complement is never materialized and sampling
# falls back to rejection.
_ENUMERATE_PAIR_LIMIT = 10**6


def sample_non_edges(graph, count, rng):
    """Draw `count` distinct non-edges uniformly without replacement."""
    count = int(count)
    if count < 0:
        raise ValueError("count must be nonnegative")
    capacity = graph.non_edge_count
    if count > capacity:
        raise ValueError(f"requested {count} non-edges but only {capacity} exist")
    if count == 0:
        return []
    if graph.pair_count <= _ENUMERATE_PAIR_LIMIT:
        pool = graph.non_edges()
        idx = rng.choice(len(pool), size=count, replace=False)
        return [pool[i] for i in np.sort(idx)]
    picked = set()
    out = []
    n = graph.n
    while len(out) < count:
        batch = max(64, 2 * (count - len(out)))
        us = rng.integers(0, n, size=batch)
        vs = rng.integers(0, n, size=batch)
        for u, v in zip(us, vs):
            if u == v:
                continue
            pair = (int(u), int(v)) if u < v else (int(v), int(u))
            if pair in picked or pair in graph.edges:
                continue
            picked.add(pair)
            out.append(pair)
            if len(out) == count:
                break
    return out


def search_space_size(graph, u):
    """Exact count of u-flip rewire instances: C(|E|, u) * C(|non-edges|, u)."""
    u = int(u)
    if u < 0:
        raise ValueError("u must be nonnegative")
    if u > graph.m or u > graph.non_edge_count:
        raise ValueError(
            f"u={u} exceeds the edge budget ({graph.m}) or non-edge budget "
            f"({graph.non_edge_count})"
        )
    return math.comb(graph.m, u) * math.comb(graph.non_edge_count, u)
