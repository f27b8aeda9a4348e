import io
import tarfile
import zipfile

import numpy as np
import pytest

from edattack import derive_rng, load_dataset
from edattack.datasets import (
    _parse_citation_tgz,
    _parse_gml_zip,
    _parse_weighted_csv,
    karate_groups4,
    planted_partition,
    remote_names,
)


def test_karate_bundled():
    ds = load_dataset("karate")
    assert ds.graph.n == 34 and ds.graph.m == 78
    assert ds.num_classes == 2
    labels = ds.require_labels()
    assert labels.shape == (34,)
    assert labels[0] != labels[33]  # the two faction leaders


def test_karate_four_group_labels():
    groups = karate_groups4()
    assert groups.shape == (34,)
    assert groups.max() + 1 == 4
    assert groups[4] != groups[19]
    assert groups[23] == groups[29]


def test_unknown_dataset():
    with pytest.raises(ValueError):
        load_dataset("no-such-graph")


def test_remote_dataset_missing_is_explicit(tmp_path):
    with pytest.raises(FileNotFoundError) as err:
        load_dataset("dolphin", data_dir=str(tmp_path))
    assert "dolphin.edges" in str(err.value)
    assert "fetch_dataset" in str(err.value)


def test_load_dataset_from_files(tmp_path):
    edges = tmp_path / "toy.edges"
    edges.write_text("0 1\n1 2\n")
    labels = tmp_path / "toy.labels"
    labels.write_text("0 x\n1 x\n2 y\n")
    ds = load_dataset({"edges": str(edges), "labels": str(labels)})
    assert ds.name == "toy"
    assert ds.graph.m == 2 and ds.num_classes == 2


def test_planted_partition_deterministic():
    a = planted_partition(rng=derive_rng("pp", 1))
    b = planted_partition(rng=derive_rng("pp", 1))
    assert a.graph == b.graph
    assert np.array_equal(a.labels, b.labels)
    assert a.graph.n == 64 and a.num_classes == 4


def test_gml_zip_parser():
    gml = """graph [\n  node [ id 0 ]\n  node [ id 1 ]\n  node [ id 2 ]\n
  edge [ source 0 target 1 ]\n  edge [ source 1 target 2 ]\n]\n"""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        zf.writestr("toy.gml", gml)
    assert _parse_gml_zip(buf.getvalue()) == [(0, 1), (1, 2)]


def test_weighted_csv_parser():
    raw = b"Source,Target,Weight\nAlice,Bob,4\nBob,Carol,2\nAlice,Bob,9\n"
    assert _parse_weighted_csv(raw) == [(0, 1), (1, 2)]


def test_citation_tgz_parser():
    content = "p1\t0\t1\tclassA\np2\t1\t0\tclassB\np3\t1\t1\tclassA\n"
    cites = "p1\tp2\np2\tp3\npX\tp1\n"
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w:gz") as tar:
        for name, text in (("toy/toy.cites", cites), ("toy/toy.content", content)):
            data = text.encode()
            info = tarfile.TarInfo(name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    edges, labels = _parse_citation_tgz(buf.getvalue(), "toy")
    assert edges == [(0, 1), (1, 2)]
    assert labels == [(0, "classA"), (1, "classB"), (2, "classA")]


def test_remote_catalog_names():
    assert set(remote_names()) == {"dolphin", "game", "citeseer", "cora"}
