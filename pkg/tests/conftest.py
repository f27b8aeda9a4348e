import numpy as np
import pytest

from edattack import DeepWalkConfig, Graph, derive_rng
from edattack.datasets import karate_groups4, load_dataset


@pytest.fixture(scope="session")
def karate():
    return load_dataset("karate")


@pytest.fixture(scope="session")
def karate_graph(karate):
    return karate.graph


@pytest.fixture(scope="session")
def karate_labels(karate):
    return karate.require_labels()


@pytest.fixture(scope="session")
def karate_4groups():
    return karate_groups4()


@pytest.fixture
def path3():
    return Graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_triangles():
    return Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture(scope="session")
def fast_dw():
    """Small skip-gram config used wherever the embedding content is incidental."""
    return DeepWalkConfig(walks_per_node=3, walk_length=10, window=3, dim=4)


def random_graph(n, p, rng):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


@pytest.fixture
def rng():
    return derive_rng(12345)
