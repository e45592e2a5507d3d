"""Rival clustering algorithms operating on a distance matrix.

PAM k-medoids, the five Lance-Williams agglomerative linkages, and DIANA.
Hierarchical methods produce a :class:`Dendrogram` that is cut into k
clusters; all tie-breaks are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix
from .errors import InvalidInputError, ParameterError
from .partition import Partition

__all__ = ["Dendrogram", "Linkage", "pam", "agglomerative", "diana", "cut"]

LINKAGES = ("single", "complete", "average", "median", "centroid")


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree over n leaves: merge i joins ids a, b into new id n + i.

    Exactly n - 1 merges; leaf ids are 0..n-1. Heights are nondecreasing
    for single, complete and average linkage; median and centroid linkage
    may produce inversions.
    """

    n: int
    merges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if len(self.merges) != self.n - 1:
            raise InvalidInputError(f"{self.n} leaves need {self.n - 1} merges, got {len(self.merges)}")

    def heights(self) -> np.ndarray:
        return np.array([h for _, _, h in self.merges])


def cut(dendro: Dendrogram, k: int) -> Partition:
    """Partition into exactly k clusters by undoing the last k - 1 merges."""
    n = dendro.n
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (a, b, _) in enumerate(dendro.merges[: n - k]):
        node = n + i
        parent[find(a)] = node
        parent[find(b)] = node
    labels = np.array([find(v) for v in range(n)], dtype=np.int64)
    return Partition(labels)


# ---------------------------------------------------------------------------
# PAM (partitioning around medoids)


def _pam_build(D: np.ndarray, k: int) -> list[int]:
    """Deterministic greedy BUILD: each pick minimizes the total cost."""
    n = D.shape[0]
    first = int(np.argmin(D.sum(axis=0)))
    medoids = [first]
    nearest = D[:, first].copy()
    while len(medoids) < k:
        chosen = set(medoids)
        best_c, best_cost = -1, np.inf
        for c in range(n):
            if c in chosen:
                continue
            cost = float(np.minimum(nearest, D[:, c]).sum())
            if cost < best_cost:
                best_c, best_cost = c, cost
        medoids.append(best_c)
        nearest = np.minimum(nearest, D[:, best_c])
    return medoids


def _pam_swap(D: np.ndarray, medoids: list[int]) -> list[int]:
    """Steepest-descent SWAP; ties broken by (medoid index, candidate index)."""
    n = D.shape[0]
    medoids = sorted(medoids)
    while True:
        cols = D[:, medoids]
        order = np.argsort(cols, axis=1, kind="stable")
        d1 = cols[np.arange(n), order[:, 0]]
        nearest_m = np.asarray(medoids)[order[:, 0]]
        d2 = cols[np.arange(n), order[:, 1]] if len(medoids) > 1 else np.full(n, np.inf)

        non_medoids = np.array([h for h in range(n) if h not in set(medoids)], dtype=np.int64)
        if len(non_medoids) == 0:
            return medoids
        best = (np.inf, -1, -1)
        for m in medoids:
            losing = nearest_m == m
            dh = D[:, non_medoids]  # (n, n_h)
            reassigned = np.where(losing[:, None], np.minimum(d2[:, None], dh), np.minimum(d1[:, None], dh))
            delta = reassigned.sum(axis=0) - d1.sum()
            j = int(np.argmin(delta))
            if delta[j] < best[0]:
                best = (float(delta[j]), m, int(non_medoids[j]))
        if best[0] < -1e-12:
            medoids = sorted(set(medoids) - {best[1]} | {best[2]})
        else:
            return medoids


def pam_medoids(D: DistanceMatrix, k: int) -> tuple[list[int], float]:
    """Final medoids and total within-cluster distance-to-medoid cost."""
    n = D.n
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")
    medoids = _pam_swap(D.values, _pam_build(D.values, k))
    cost = float(D.values[:, medoids].min(axis=1).sum())
    return medoids, cost


def pam(D: DistanceMatrix, k: int) -> Partition:
    """Classic PAM: deterministic BUILD then SWAP until no improving swap.

    Each point joins its nearest medoid, ties toward the lower medoid index.
    """
    medoids, _ = pam_medoids(D, k)
    cols = D.values[:, medoids]
    assign = np.asarray(medoids)[np.argmin(cols, axis=1)]  # medoids sorted: argmin tie = lowest id
    return Partition(assign.astype(np.int64))


# ---------------------------------------------------------------------------
# agglomerative (Lance-Williams)


def _lw_coefficients(linkage: str, na: float, nb: float):
    if linkage == "single":
        return 0.5, 0.5, 0.0, -0.5
    if linkage == "complete":
        return 0.5, 0.5, 0.0, 0.5
    if linkage == "average":
        return na / (na + nb), nb / (na + nb), 0.0, 0.0
    if linkage == "median":
        return 0.5, 0.5, -0.25, 0.0
    if linkage == "centroid":
        s = na + nb
        return na / s, nb / s, -(na * nb) / (s * s), 0.0
    raise ParameterError(f"unknown linkage {linkage!r}; expected one of: {', '.join(LINKAGES)}")


def agglomerative(D: DistanceMatrix, linkage: str) -> Dendrogram:
    """Hierarchical agglomeration with the named Lance-Williams update.

    Median and centroid linkage apply the recurrence to squared distances;
    their reported heights are square roots of the squared working values.
    The merged pair is the minimum-distance pair, ties resolved toward the
    lexicographically smallest (slot a, slot b) where a slot is identified
    by the smallest leaf it contains.
    """
    _lw_coefficients(linkage, 1, 1)  # validate name early
    n = D.n
    squared = linkage in ("median", "centroid")
    W = D.values.astype(np.float64) ** 2 if squared else D.values.astype(np.float64).copy()
    np.fill_diagonal(W, np.inf)
    active = np.ones(n, dtype=bool)
    sizes = np.ones(n)
    slot_id = list(range(n))
    merges = []
    for step in range(n - 1):
        flat = int(np.argmin(W))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        dij = W[i, j]
        height = float(np.sqrt(dij)) if squared else float(dij)
        merges.append((slot_id[i], slot_id[j], height))

        aa, ab, beta, gamma = _lw_coefficients(linkage, sizes[i], sizes[j])
        others = active.copy()
        others[[i, j]] = False
        di, dj = W[i, others], W[j, others]
        W[i, others] = aa * di + ab * dj + beta * dij + gamma * np.abs(di - dj)
        W[others, i] = W[i, others]
        active[j] = False
        W[j, :] = np.inf
        W[:, j] = np.inf
        W[i, i] = np.inf
        sizes[i] += sizes[j]
        slot_id[i] = n + step
    return Dendrogram(n, tuple(merges))


# ---------------------------------------------------------------------------
# DIANA (divisive analysis)


def _diameter(D: np.ndarray, members: list[int]) -> float:
    sub = D[np.ix_(members, members)]
    return float(sub.max())


def _split(D: np.ndarray, members: list[int]) -> tuple[list[int], list[int]]:
    """One DIANA split: seed a splinter with the most dissimilar object,
    then move objects closer (on average) to the splinter than to the rest."""
    sub = D[np.ix_(members, members)]
    avg = sub.sum(axis=1) / (len(members) - 1)
    seed_pos = int(np.argmax(avg))  # argmax ties -> first, i.e. lowest index
    splinter = [members[seed_pos]]
    remainder = [x for x in members if x != members[seed_pos]]
    while len(remainder) > 1:
        best_pos, best_diff = -1, 0.0
        for pos, x in enumerate(remainder):
            a = D[x, remainder].sum() / (len(remainder) - 1)  # excludes x: D[x,x] = 0
            b = D[x, splinter].mean()
            diff = a - b
            if diff > best_diff:
                best_pos, best_diff = pos, diff
        if best_pos < 0:
            break
        splinter.append(remainder.pop(best_pos))
    return sorted(splinter), sorted(remainder)


def diana(D: DistanceMatrix) -> Dendrogram:
    """Divisive hierarchy: repeatedly split the largest-diameter cluster.

    Splits reversed give the merge sequence; the height of each merge is
    the diameter of the cluster being split, so cutting into k clusters
    reproduces the state after k - 1 splits.
    """
    n = D.n
    dv = D.values
    clusters: list[list[int]] = [list(range(n))]
    splits: list[tuple[list[int], list[int], list[int], float]] = []
    while len(clusters) < n:
        splittable = [c for c in clusters if len(c) > 1]
        diam = [_diameter(dv, c) for c in splittable]
        best = max(range(len(splittable)), key=lambda t: (diam[t], -splittable[t][0]))
        target = splittable[best]
        a, b = _split(dv, target)
        splits.append((target, a, b, diam[best]))
        clusters.remove(target)
        clusters.extend([a, b])
    # reverse the splits into dendrogram merges
    ids: dict[tuple[int, ...], int] = {(v,): v for v in range(n)}
    for s, (target, _, _, _) in enumerate(splits):
        ids[tuple(target)] = n + (n - 2 - s)
    merges = []
    for s in range(n - 2, -1, -1):
        target, a, b, height = splits[s]
        ia, ib = ids[tuple(a)], ids[tuple(b)]
        if ia > ib:
            ia, ib = ib, ia
        merges.append((ia, ib, height))
    return Dendrogram(n, tuple(merges))
