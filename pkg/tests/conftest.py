import numpy as np
import pytest

from tsnetclust.network import Graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_graph(rng, n: int, p: float = 0.4) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def two_triangles(bridge: bool = False) -> Graph:
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    if bridge:
        edges.append((2, 3))
    return Graph.from_edges(6, edges)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
