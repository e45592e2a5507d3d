"""Community detection: fast greedy, multilevel, walktrap, infomap, label propagation.

All five algorithms consume an unweighted :class:`~tsnetclust.network.Graph`
and return a canonical :class:`~tsnetclust.partition.Partition`. Randomized
algorithms (multilevel, label propagation, infomap) are fully determined by
their integer seed. Edgeless graphs yield singleton partitions everywhere,
because parameter sweeps legitimately produce them at the low end.
"""

from __future__ import annotations

import enum
import heapq
import math
import random
import warnings

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .network import Graph
from .partition import Partition

__all__ = [
    "Algorithm",
    "modularity",
    "map_equation",
    "fast_greedy",
    "multilevel",
    "walktrap",
    "label_propagation",
    "infomap",
    "detect",
]


class Algorithm(enum.Enum):
    FAST_GREEDY = "fg"
    MULTILEVEL = "ml"
    WALKTRAP = "wt"
    INFOMAP = "im"
    LABEL_PROPAGATION = "lp"

    @classmethod
    def from_name(cls, name: str) -> "Algorithm":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(a.value for a in cls)
            raise ParameterError(f"unknown algorithm {name!r}; expected one of: {valid}") from None


class ConvergenceWarning(UserWarning):
    """Raised as a warning when label propagation hits its sweep cap."""


# ---------------------------------------------------------------------------
# scoring


def modularity(g: Graph, p: Partition) -> float:
    """Newman-Girvan modularity of a partition; undefined on edgeless graphs."""
    m = g.edge_count
    if m == 0:
        raise DegenerateInputError("modularity is undefined for an edgeless graph (m = 0)")
    if p.n != g.n:
        raise DegenerateInputError(f"partition covers {p.n} vertices, graph has {g.n}")
    labels = p.labels
    uu, vv = g.edge_arrays()
    same = labels[uu] == labels[vv]
    intra = np.bincount(labels[uu[same]], minlength=p.n_communities).astype(np.float64)
    deg_per_comm = np.bincount(labels, weights=g.degrees(), minlength=p.n_communities)
    return float((intra / m - (deg_per_comm / (2.0 * m)) ** 2).sum())


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def map_equation(g: Graph, p: Partition) -> float:
    """Two-level map equation L(M) for an unrecorded random walk on g.

    Stationary visit rates are degree-proportional. Uses the expanded
    closed form; module exit rates count each boundary edge once per
    direction.
    """
    m = g.edge_count
    if m == 0:
        raise DegenerateInputError("map equation is undefined for an edgeless graph (m = 0)")
    labels = p.labels
    deg = g.degrees().astype(np.float64)
    two_m = 2.0 * m
    p_vertex = deg / two_m

    uu, vv = g.edge_arrays()
    diff = labels[uu] != labels[vv]
    cut = (
        np.bincount(labels[uu[diff]], minlength=p.n_communities)
        + np.bincount(labels[vv[diff]], minlength=p.n_communities)
    ).astype(np.float64)
    q_comm = cut / two_m
    p_comm = np.bincount(labels, weights=deg, minlength=p.n_communities) / two_m

    q = float(q_comm.sum())
    L = _plogp(q)
    L -= 2.0 * sum(_plogp(qc) for qc in q_comm)
    L += sum(_plogp(qc + pc) for qc, pc in zip(q_comm, p_comm))
    L -= sum(_plogp(pv) for pv in p_vertex)
    return L


# ---------------------------------------------------------------------------
# fast greedy (agglomerative modularity maximization)


def fast_greedy(g: Graph) -> Partition:
    """Greedy agglomeration: repeatedly merge the community pair with the
    largest modularity increase, then return the best partition seen.

    Only edge-connected pairs are merge candidates, so communities never
    span connected components. Ties on the gain fall back to the
    lexicographically smallest community-id pair.
    """
    n = g.n
    m = g.edge_count
    if m == 0:
        return Partition.singletons(n)

    deg = g.degrees().astype(np.float64)
    d = deg.copy()  # community degree sums
    e: list[dict[int, float]] = [dict() for _ in range(n)]  # inter-community edge counts
    for u, v in g.edges():
        e[u][v] = e[u].get(v, 0.0) + 1.0
        e[v][u] = e[v].get(u, 0.0) + 1.0

    labels = np.arange(n, dtype=np.int64)
    q = float(-np.sum((deg / (2.0 * m)) ** 2))
    best_q, best_labels = q, labels.copy()

    inv_m = 1.0 / m
    inv_2m2 = 1.0 / (2.0 * m * m)

    def gain(a: int, b: int) -> float:
        return e[a][b] * inv_m - d[a] * d[b] * inv_2m2

    stamp = [0] * n
    heap: list[tuple[float, int, int, int, int]] = []
    for a in range(n):
        for b in e[a]:
            if a < b:
                heapq.heappush(heap, (-gain(a, b), a, b, stamp[a], stamp[b]))

    alive = [True] * n
    while heap:
        neg_dq, a, b, sa, sb = heapq.heappop(heap)
        if not (alive[a] and alive[b]) or stamp[a] != sa or stamp[b] != sb or b not in e[a]:
            continue
        # merge b into a (a < b by construction)
        q += -neg_dq
        alive[b] = False
        stamp[a] += 1
        stamp[b] += 1
        d[a] += d[b]
        del e[a][b]
        for x, w in e[b].items():
            if x == a:
                continue
            e[a][x] = e[a].get(x, 0.0) + w
            exd = e[x]
            del exd[b]
            exd[a] = e[a][x]
        e[b] = {}
        labels[labels == b] = a
        for x in e[a]:
            lo, hi = (a, x) if a < x else (x, a)
            heapq.heappush(heap, (-gain(lo, hi), lo, hi, stamp[lo], stamp[hi]))
        if q > best_q:
            best_q = q
            best_labels = labels.copy()
    return Partition(best_labels)


# ---------------------------------------------------------------------------
# multilevel (Louvain)


class _WeightedGraph:
    """Weighted multigraph with self-loops, used for Louvain-style contraction."""

    __slots__ = ("n", "neighbors", "self_w", "strength", "total_w")

    def __init__(self, n, neighbors, self_w):
        self.n = n
        self.neighbors = neighbors  # list[dict[vertex, weight]], no self entries
        self.self_w = self_w
        s = np.array([sum(nb.values()) for nb in neighbors]) + 2.0 * self_w
        self.strength = s
        self.total_w = float(s.sum()) / 2.0

    @classmethod
    def from_graph(cls, g: Graph) -> "_WeightedGraph":
        neighbors = [{int(v): 1.0 for v in g.adjacency[u]} for u in range(g.n)]
        return cls(g.n, neighbors, np.zeros(g.n))

    def contract(self, labels: np.ndarray) -> "_WeightedGraph":
        c = int(labels.max()) + 1
        neighbors: list[dict[int, float]] = [dict() for _ in range(c)]
        self_w = np.zeros(c)
        for u in range(self.n):
            cu = int(labels[u])
            self_w[cu] += self.self_w[u]
            for v, w in self.neighbors[u].items():
                if u < v:
                    cv = int(labels[v])
                    if cu == cv:
                        self_w[cu] += w
                    else:
                        neighbors[cu][cv] = neighbors[cu].get(cv, 0.0) + w
                        neighbors[cv][cu] = neighbors[cv].get(cu, 0.0) + w
        return _WeightedGraph(c, neighbors, self_w)


def _louvain_phase(wg: _WeightedGraph, order: list[int]) -> tuple[np.ndarray, bool]:
    """Local-move phase: greedy vertex moves to the neighbor community with
    the largest strictly positive modularity gain (ties: lowest community id).
    Returns (labels, whether any move happened)."""
    n = wg.n
    labels = np.arange(n, dtype=np.int64)
    comm_strength = wg.strength.copy()
    two_w = 2.0 * wg.total_w
    moved_any = False

    while True:
        moved = False
        for v in order:
            cv = int(labels[v])
            s_v = wg.strength[v]
            comm_strength[cv] -= s_v
            # weight from v to each adjacent community
            k_vc: dict[int, float] = {}
            for u, w in wg.neighbors[v].items():
                k_vc[int(labels[u])] = k_vc.get(int(labels[u]), 0.0) + w
            stay = k_vc.get(cv, 0.0) - comm_strength[cv] * s_v / two_w
            best_c, best_score = cv, stay
            # ascending candidate order + strict > makes ties pick the lowest id
            for c in sorted(k_vc):
                if c == cv:
                    continue
                score = k_vc[c] - comm_strength[c] * s_v / two_w
                if score > best_score:
                    best_c, best_score = c, score
            if best_c != cv:
                labels[v] = best_c
                comm_strength[best_c] += s_v
                moved = True
                moved_any = True
            else:
                comm_strength[cv] += s_v
        if not moved:
            break
    return labels, moved_any


def multilevel(g: Graph, seed: int) -> Partition:
    """Louvain method: local modularity moves, contraction, repeat.

    The seed fixes the vertex visiting order of each local-move phase; the
    whole run is deterministic given (graph, seed). Returns the final
    (highest-level) partition expanded to the original vertices.
    """
    if g.edge_count == 0:
        return Partition.singletons(g.n)
    rng = random.Random(seed)
    wg = _WeightedGraph.from_graph(g)
    mapping = np.arange(g.n, dtype=np.int64)
    while True:
        order = list(range(wg.n))
        rng.shuffle(order)
        labels, moved = _louvain_phase(wg, order)
        if not moved:
            break
        labels = _dense(labels)
        mapping = labels[mapping]
        wg = wg.contract(labels)
    return Partition(mapping)


def _dense(labels: np.ndarray) -> np.ndarray:
    """Relabel to dense 0..c-1 keeping order of first appearance."""
    out = np.empty(len(labels), dtype=np.int64)
    seen: dict[int, int] = {}
    for i, c in enumerate(labels.tolist()):
        if c not in seen:
            seen[c] = len(seen)
        out[i] = seen[c]
    return out


# ---------------------------------------------------------------------------
# walktrap


def walk_embedding(g: Graph, walk_len: int) -> np.ndarray:
    """Rows are walk_len-step transition probability vectors scaled by
    1/sqrt(column degree); squared row distances are the walktrap vertex
    distances."""
    n = g.n
    deg = g.degrees().astype(np.float64)
    P = np.zeros((n, n))
    for u in range(n):
        if deg[u] == 0:
            P[u, u] = 1.0
        else:
            P[u, g.adjacency[u]] = 1.0 / deg[u]
    Pt = np.linalg.matrix_power(P, walk_len)
    col_scale = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    return Pt * col_scale


def walktrap(g: Graph, walk_len: int = 4) -> Partition:
    """Random-walk agglomeration after Pons and Latapy.

    Vertices are embedded by their `walk_len`-step transition probability
    vectors scaled by 1/sqrt(degree); Ward-style merges (restricted to
    edge-adjacent communities) then build a dendrogram, and the level with
    maximal modularity is returned. Isolated vertices stay singletons.
    """
    n = g.n
    m = g.edge_count
    if m == 0:
        return Partition.singletons(n)
    if walk_len < 1:
        raise ParameterError(f"walk length must be >= 1, got {walk_len}")

    deg = g.degrees().astype(np.float64)
    X = walk_embedding(g, walk_len)  # rows are the embedded vertices

    size = np.ones(n)
    centroid = X.copy()
    # adjacency and modularity bookkeeping, as in fast_greedy
    e: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v in g.edges():
        e[u][v] = e[u].get(v, 0.0) + 1.0
        e[v][u] = e[v].get(u, 0.0) + 1.0
    d = deg.copy()
    labels = np.arange(n, dtype=np.int64)
    q = float(-np.sum((deg / (2.0 * m)) ** 2))
    best_q, best_labels = q, labels.copy()

    def dsigma(a: int, b: int) -> float:
        diff = centroid[a] - centroid[b]
        return (size[a] * size[b] / (size[a] + size[b])) * float(diff @ diff) / n

    stamp = [0] * n
    heap: list[tuple[float, int, int, int, int]] = []
    for a in range(n):
        for b in e[a]:
            if a < b:
                heapq.heappush(heap, (dsigma(a, b), a, b, stamp[a], stamp[b]))

    alive = [True] * n
    inv_m = 1.0 / m
    inv_2m2 = 1.0 / (2.0 * m * m)
    while heap:
        _, a, b, sa, sb = heapq.heappop(heap)
        if not (alive[a] and alive[b]) or stamp[a] != sa or stamp[b] != sb or b not in e[a]:
            continue
        q += e[a][b] * inv_m - d[a] * d[b] * inv_2m2
        centroid[a] = (size[a] * centroid[a] + size[b] * centroid[b]) / (size[a] + size[b])
        size[a] += size[b]
        alive[b] = False
        stamp[a] += 1
        stamp[b] += 1
        d[a] += d[b]
        del e[a][b]
        for x, w in e[b].items():
            if x == a:
                continue
            e[a][x] = e[a].get(x, 0.0) + w
            exd = e[x]
            del exd[b]
            exd[a] = e[a][x]
        e[b] = {}
        labels[labels == b] = a
        for x in e[a]:
            lo, hi = (a, x) if a < x else (x, a)
            heapq.heappush(heap, (dsigma(lo, hi), lo, hi, stamp[lo], stamp[hi]))
        if q > best_q:
            best_q = q
            best_labels = labels.copy()
    return Partition(best_labels)


# ---------------------------------------------------------------------------
# label propagation


def label_propagation(g: Graph, seed: int, max_sweeps: int = 1000) -> Partition:
    """Majority-label diffusion with seeded random sweep order and tie choice.

    Converged when every vertex's label is among its neighborhood majority
    labels. The sweep cap guards against oscillation; hitting it raises a
    ConvergenceWarning rather than hanging.
    """
    n = g.n
    rng = random.Random(seed)
    labels = list(range(n))
    active = [v for v in range(n) if len(g.adjacency[v]) > 0]
    if not active:
        return Partition(np.array(labels, dtype=np.int64))

    def majority_labels(v: int) -> list[int]:
        counts: dict[int, int] = {}
        for u in g.adjacency[v]:
            lu = labels[u]
            counts[lu] = counts.get(lu, 0) + 1
        top = max(counts.values())
        return sorted(c for c, k in counts.items() if k == top)

    converged = False
    for _ in range(max_sweeps):
        order = active.copy()
        rng.shuffle(order)
        for v in order:
            tied = majority_labels(v)
            labels[v] = tied[0] if len(tied) == 1 else rng.choice(tied)
        if all(labels[v] in majority_labels(v) for v in active):
            converged = True
            break
    if not converged:
        warnings.warn(
            f"label propagation did not converge within {max_sweeps} sweeps",
            ConvergenceWarning,
            stacklevel=2,
        )
    return Partition(np.array(labels, dtype=np.int64))


# ---------------------------------------------------------------------------
# infomap


def infomap(g: Graph, seed: int, trials: int = 10) -> Partition:
    """Two-level map-equation minimization with Louvain-style moves.

    Runs `trials` independently seeded restarts and keeps the partition of
    minimal description length (ties: fewer communities, then lexicographic
    label order).
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if g.edge_count == 0:
        return Partition.singletons(g.n)
    rng = random.Random(seed)
    trial_seeds = [rng.randrange(2**63) for _ in range(trials)]

    best: tuple[float, int, tuple] | None = None
    best_p: Partition | None = None
    for ts in trial_seeds:
        p = _infomap_once(g, ts)
        key = (map_equation(g, p), p.n_communities, tuple(p.labels.tolist()))
        if best is None or key < best:
            best, best_p = key, p
    return best_p


def _infomap_once(g: Graph, seed: int) -> Partition:
    rng = random.Random(seed)
    wg = _WeightedGraph.from_graph(g)
    two_w = 2.0 * wg.total_w
    mapping = np.arange(g.n, dtype=np.int64)
    while True:
        order = list(range(wg.n))
        rng.shuffle(order)
        labels, moved = _infomap_phase(wg, order, two_w)
        if not moved:
            break
        labels = _dense(labels)
        mapping = labels[mapping]
        wg = wg.contract(labels)
    return Partition(mapping)


def _infomap_phase(wg: _WeightedGraph, order: list[int], two_w: float) -> tuple[np.ndarray, bool]:
    """Local-move phase minimizing the partition-dependent part of L."""
    n = wg.n
    labels = np.arange(n, dtype=np.int64)
    S = wg.strength.copy()  # community strength
    internal = wg.self_w.copy()  # community internal weight
    q_c = (S - 2.0 * internal) / two_w
    sum_q = float(q_c.sum())

    def comm_terms(qc: float, pc: float) -> float:
        return -2.0 * _plogp(qc) + _plogp(qc + pc)

    moved_any = False
    while True:
        moved = False
        for v in order:
            cv = int(labels[v])
            s_v = wg.strength[v]
            self_v = wg.self_w[v]
            k_vc: dict[int, float] = {}
            for u, w in wg.neighbors[v].items():
                k_vc[int(labels[u])] = k_vc.get(int(labels[u]), 0.0) + w
            k_va = k_vc.get(cv, 0.0)

            # state of the source community with v removed
            S_a1 = S[cv] - s_v
            int_a1 = internal[cv] - k_va - self_v
            q_a1 = (S_a1 - 2.0 * int_a1) / two_w
            base_terms = comm_terms(q_c[cv], S[cv] / two_w)
            removed_terms = comm_terms(q_a1, S_a1 / two_w)

            # accept only clear decreases; ascending order + strict < breaks
            # ties toward the lowest community id
            best_c, best_delta = cv, -1e-12
            for c in sorted(k_vc):
                if c == cv:
                    continue
                S_b1 = S[c] + s_v
                int_b1 = internal[c] + k_vc[c] + self_v
                q_b1 = (S_b1 - 2.0 * int_b1) / two_w
                new_sum_q = sum_q - q_c[cv] - q_c[c] + q_a1 + q_b1
                delta = (
                    _plogp(new_sum_q)
                    - _plogp(sum_q)
                    + removed_terms
                    - base_terms
                    + comm_terms(q_b1, S_b1 / two_w)
                    - comm_terms(q_c[c], S[c] / two_w)
                )
                if delta < best_delta:
                    best_c, best_delta = c, delta
            if best_c != cv:
                c = best_c
                sum_q += -q_c[cv] - q_c[c]
                S[cv] = S_a1
                internal[cv] = int_a1
                q_c[cv] = q_a1
                S[c] += s_v
                internal[c] += k_vc[c] + self_v
                q_c[c] = (S[c] - 2.0 * internal[c]) / two_w
                sum_q += q_c[cv] + q_c[c]
                labels[v] = c
                moved = True
                moved_any = True
        if not moved:
            break
    return labels, moved_any


# ---------------------------------------------------------------------------
# dispatch


def detect(g: Graph, algo: Algorithm, seed: int = 0) -> Partition:
    """Run one of the five community detection algorithms on g."""
    if algo is Algorithm.FAST_GREEDY:
        return fast_greedy(g)
    if algo is Algorithm.MULTILEVEL:
        return multilevel(g, seed)
    if algo is Algorithm.WALKTRAP:
        return walktrap(g)
    if algo is Algorithm.INFOMAP:
        return infomap(g, seed)
    if algo is Algorithm.LABEL_PROPAGATION:
        return label_propagation(g, seed)
    raise ParameterError(f"unknown algorithm {algo!r}")
