"""Similarity graphs built from a distance matrix (k-NN and eps-NN)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix
from .errors import ParameterError
from .partition import Partition

__all__ = ["Graph", "GraphMethod", "knn_graph", "eps_graph", "components", "write_edge_list"]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over series indices.

    Vertex i corresponds to dataset series i. Adjacency lists are sorted,
    self-loop free and duplicate free.
    """

    n: int
    adjacency: tuple[np.ndarray, ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        neigh: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            neigh[u].add(v)
            neigh[v].add(u)
        adjacency = tuple(_freeze(np.array(sorted(s), dtype=np.int64)) for s in neigh)
        return cls(n, adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def edges(self):
        """Yield edges as (u, v) with u < v, in ascending order."""
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, int(v))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as two arrays (u < v), row-major order."""
        uu, vv = [], []
        for u, a in enumerate(self.adjacency):
            tail = a[np.searchsorted(a, u, side="right") :]
            uu.append(np.full(len(tail), u, dtype=np.int64))
            vv.append(tail)
        if not uu:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        return np.concatenate(uu), np.concatenate(vv)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adjacency[u]
        i = np.searchsorted(a, v)
        return i < len(a) and a[i] == v


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class GraphMethodKind(enum.Enum):
    KNN = "knn"
    EPSNN = "epsnn"


@dataclass(frozen=True)
class GraphMethod:
    """Network construction rule: k-NN with parameter k, or eps-NN with a radius."""

    kind: GraphMethodKind
    k: int | None = None
    eps: float | None = None

    @classmethod
    def knn(cls, k: int) -> "GraphMethod":
        return cls(GraphMethodKind.KNN, k=int(k))

    @classmethod
    def epsnn(cls, eps: float) -> "GraphMethod":
        if not np.isfinite(eps):
            raise ParameterError(f"eps must be finite, got {eps!r}")
        return cls(GraphMethodKind.EPSNN, eps=float(eps))

    def build(self, D: DistanceMatrix) -> Graph:
        if self.kind is GraphMethodKind.KNN:
            return knn_graph(D, self.k)
        return eps_graph(D, self.eps)


def knn_graph(D: DistanceMatrix, k: int) -> Graph:
    """Connect each vertex to its k nearest neighbors; union over all picks.

    Ties at the k-th neighbor are broken toward the smaller vertex index,
    which makes the construction fully deterministic.
    """
    n = D.n
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must lie in [1, {n - 1}], got {k}")
    idx = np.arange(n)
    chosen = np.zeros((n, n), dtype=bool)
    for i in range(n):
        row = D.values[i]
        others = idx[idx != i]
        # sort by (distance, vertex index); stable tie-break by index
        order = others[np.lexsort((others, row[others]))]
        chosen[i, order[:k]] = True
    mutual = chosen | chosen.T  # union of per-vertex picks
    adjacency = tuple(_freeze(np.nonzero(row)[0].astype(np.int64)) for row in mutual)
    return Graph(n, adjacency)


def eps_graph(D: DistanceMatrix, eps: float) -> Graph:
    """Connect every pair at distance <= eps."""
    n = D.n
    close = D.values <= eps
    np.fill_diagonal(close, False)
    adjacency = tuple(_freeze(np.nonzero(row)[0].astype(np.int64)) for row in close)
    return Graph(n, adjacency)


def component_labels(g: Graph) -> np.ndarray:
    """Connected-component labels, dense from 0, ordered by smallest member."""
    label = np.full(g.n, -1, dtype=np.int64)
    current = 0
    for start in range(g.n):
        if label[start] != -1:
            continue
        stack = [start]
        label[start] = current
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if label[v] == -1:
                    label[v] = current
                    stack.append(int(v))
        current += 1
    return label


def components(g: Graph) -> Partition:
    """Partition of the vertices into connected components."""
    return Partition(component_labels(g))


def write_edge_list(g: Graph, path):
    """Write the graph as `u v` lines, ascending, for external visualization."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")
