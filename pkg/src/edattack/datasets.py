"""Benchmark dataset loading.

Karate ships inside the package (tiny, public domain). The remaining networks
are fetched on demand by :func:`fetch_dataset` into a data directory; every
remote dataset is validated against its published node/edge counts and, where
a digest is pinned, against sha256. Loaders always report the actual counts of
the parsed file.
"""

import hashlib
import io
import os
import re
import tarfile
import urllib.request
import zipfile
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .graph import Graph, ParseError, load_labels, normalize_pair, read_edge_list, read_labels

__all__ = [
    "Dataset",
    "load_dataset",
    "fetch_dataset",
    "builtin_names",
    "remote_names",
    "karate_groups4",
    "planted_partition",
]


@dataclass
class Dataset:
    name: str
    graph: Graph
    labels: np.ndarray | None

    @property
    def num_classes(self):
        if self.labels is None:
            return 0
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def require_labels(self):
        if self.labels is None or (self.labels < 0).any():
            raise ValueError(f"dataset {self.name!r} has no complete label vector")
        return self.labels


_REMOTE = {
    # name: (url, expected_nodes, expected_edges, sha256 or None, parser)
    "dolphin": (
        "https://websites.umich.edu/~mejn/netdata/dolphins.zip",
        62,
        159,
        None,
        "gml_zip",
    ),
    "game": (
        "https://www.macalester.edu/~abeverid/data/stormofswords.csv",
        107,
        352,
        None,
        "csv_weighted",
    ),
    "citeseer": (
        "https://linqs-data.soe.ucsc.edu/public/lbc/citeseer.tgz",
        3312,
        4732,
        None,
        "citation_tgz",
    ),
    "cora": (
        "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
        2708,
        5429,
        None,
        "citation_tgz",
    ),
}


def builtin_names():
    return ["karate"]


def remote_names():
    return sorted(_REMOTE)


def _data_dir(data_dir=None):
    return data_dir or os.environ.get("EDATTACK_DATA_DIR") or os.path.join(os.getcwd(), "data")


def _load_builtin_karate():
    pkg = resources.files("edattack").joinpath("data")
    graph_text = pkg.joinpath("karate.edges").read_text()
    label_text = pkg.joinpath("karate.labels").read_text()
    from .graph import load_edge_list

    graph = load_edge_list(graph_text)
    labels = load_labels(label_text, n=graph.n)
    return Dataset("karate", graph, labels)


def karate_groups4():
    """Four-group modularity reference labeling of the karate club."""
    text = resources.files("edattack").joinpath("data", "karate_groups4.labels").read_text()
    return load_labels(text, n=34)


def load_dataset(spec, data_dir=None, fetch=False):
    """Load a dataset by name or from explicit files.

    `spec` is either a known name ("karate", "dolphin", "game", "citeseer",
    "cora") or a dict with keys ``edges`` (path), optional ``labels`` (path)
    and optional ``name``. Remote datasets are looked up under `data_dir` as
    ``<name>.edges`` / ``<name>.labels``; pass ``fetch=True`` to download them
    when missing.
    """
    if isinstance(spec, dict):
        name = spec.get("name") or os.path.splitext(os.path.basename(spec["edges"]))[0]
        graph = read_edge_list(spec["edges"])
        labels = read_labels(spec["labels"], n=graph.n) if spec.get("labels") else None
        return Dataset(name, graph, labels)
    name = str(spec)
    if name == "karate":
        return _load_builtin_karate()
    if name not in _REMOTE:
        raise ValueError(f"unknown dataset {name!r}; known: karate, {', '.join(remote_names())}")
    root = _data_dir(data_dir)
    edges_path = os.path.join(root, f"{name}.edges")
    labels_path = os.path.join(root, f"{name}.labels")
    if not os.path.exists(edges_path):
        if not fetch:
            raise FileNotFoundError(
                f"{edges_path} not found; run edattack.datasets.fetch_dataset({name!r}) "
                f"or place the files there by hand"
            )
        fetch_dataset(name, data_dir=root)
    graph = read_edge_list(edges_path)
    labels = read_labels(labels_path, n=graph.n) if os.path.exists(labels_path) else None
    return Dataset(name, graph, labels)


def fetch_dataset(name, data_dir=None, timeout=60):
    """Download a remote dataset and write ``<name>.edges`` (+labels if any).

    Verifies sha256 when a digest is pinned and always checks the parsed node
    and edge counts against the published values (a mismatch is reported, not
    fatal, since some sources disagree by one edge).
    """
    if name not in _REMOTE:
        raise ValueError(f"no download recipe for {name!r}")
    url, exp_n, exp_m, digest, kind = _REMOTE[name]
    root = _data_dir(data_dir)
    os.makedirs(root, exist_ok=True)
    raw = urllib.request.urlopen(url, timeout=timeout).read()
    if digest is not None:
        got = hashlib.sha256(raw).hexdigest()
        if got != digest:
            raise IOError(f"{name}: sha256 mismatch (expected {digest}, got {got})")
    if kind == "gml_zip":
        edges, labels = _parse_gml_zip(raw), None
    elif kind == "csv_weighted":
        edges, labels = _parse_weighted_csv(raw), None
    elif kind == "citation_tgz":
        edges, labels = _parse_citation_tgz(raw, name)
    else:  # pragma: no cover
        raise ValueError(kind)
    n = max(max(e) for e in edges) + 1
    if (n, len(edges)) != (exp_n, exp_m):
        print(
            f"note: {name} parsed as |V|={n}, |E|={len(edges)} "
            f"(published {exp_n}/{exp_m}); recording actual counts"
        )
    edges_path = os.path.join(root, f"{name}.edges")
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write(f"# {name}: fetched from {url}\n")
        for u, v in sorted(edges):
            fh.write(f"{u} {v}\n")
    if labels is not None:
        with open(os.path.join(root, f"{name}.labels"), "w", encoding="utf-8") as fh:
            for node, token in labels:
                fh.write(f"{node} {token}\n")
    return edges_path


def _parse_gml_zip(raw):
    """Edge set from the first .gml member of a zip archive."""
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        member = next(m for m in zf.namelist() if m.endswith(".gml"))
        text = zf.read(member).decode("utf-8", errors="replace")
    sources = [int(x) for x in re.findall(r"source\s+(\d+)", text)]
    targets = [int(x) for x in re.findall(r"target\s+(\d+)", text)]
    if len(sources) != len(targets) or not sources:
        raise ParseError("could not parse gml edge section")
    return sorted({normalize_pair(u, v) for u, v in zip(sources, targets)})


def _parse_weighted_csv(raw):
    """Edge set from a Source,Target,Weight csv with a header row."""
    text = raw.decode("utf-8", errors="replace")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    names = {}

    def nid(token):
        token = token.strip().strip('"')
        if token not in names:
            names[token] = len(names)
        return names[token]

    edges = set()
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) < 2:
            continue
        edges.add(normalize_pair(nid(parts[0]), nid(parts[1])))
    return sorted(edges)


def planted_partition(blocks=4, block_size=16, p_in=0.3, p_out=0.02, rng=None):
    """Synthetic graph with known communities (for demos and offline checks).

    Nodes split into `blocks` equal groups; intra-group pairs get an edge with
    probability `p_in`, inter-group pairs with `p_out`.
    """
    if rng is None:
        raise ValueError("planted_partition requires an explicit seeded generator")
    n = blocks * block_size
    labels = np.repeat(np.arange(blocks), block_size)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            p = p_in if labels[u] == labels[v] else p_out
            if rng.random() < p:
                edges.append((u, v))
    return Dataset(f"planted{blocks}x{block_size}", Graph(n, edges), labels)


def _parse_citation_tgz(raw, name):
    """Edges + labels from a .cites/.content citation archive."""
    with tarfile.open(fileobj=io.BytesIO(raw), mode="r:gz") as tar:
        cites = tar.extractfile(f"{name}/{name}.cites").read().decode()
        content = tar.extractfile(f"{name}/{name}.content").read().decode()
    ids = {}
    labels = []
    for line in content.splitlines():
        parts = line.strip().split("\t")
        if len(parts) < 2:
            continue
        paper, token = parts[0], parts[-1]
        if paper not in ids:
            ids[paper] = len(ids)
            labels.append((ids[paper], token))
    edges = set()
    for line in cites.splitlines():
        parts = line.strip().split()
        if len(parts) != 2:
            continue
        a, b = parts
        if a in ids and b in ids and a != b:
            edges.add(normalize_pair(ids[a], ids[b]))
    return sorted(edges), labels
