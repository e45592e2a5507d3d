"""Rand index, the k / eps parameter-sweep protocol, and summary statistics."""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .communities import Algorithm, detect
from .distances import DistanceMatrix
from .errors import InvalidInputError, ParameterError
from .network import eps_graph, knn_graph
from .partition import Partition
from .series import Dataset

__all__ = [
    "rand_index",
    "truth_partition",
    "derive_seed",
    "SweepRecord",
    "SweepResult",
    "sweep_k",
    "sweep_eps",
    "baseline_best_ri",
    "SummaryRow",
    "summarize",
]

BASELINE_ALGOS = ("pam",) + baselines.LINKAGES + ("diana",)
PAM_MAX_K = 50


def rand_index(p: Partition, truth: Partition) -> float:
    """Fraction of unordered pairs on which the two partitions agree."""
    if p.n != truth.n:
        raise InvalidInputError(f"partition sizes differ: {p.n} vs {truth.n}")
    n = p.n
    if n < 2:
        raise InvalidInputError("rand index needs at least 2 items")
    pairs = n * (n - 1) // 2

    def same_pairs(counts: np.ndarray) -> float:
        return float((counts * (counts - 1) // 2).sum())

    cont_key = p.labels.astype(np.int64) * truth.n_communities + truth.labels
    tp = same_pairs(np.bincount(cont_key))
    same_p = same_pairs(np.bincount(p.labels))
    same_t = same_pairs(np.bincount(truth.labels))
    return (pairs - same_p - same_t + 2.0 * tp) / pairs


def truth_partition(ds: Dataset) -> Partition:
    """Ground-truth partition from dataset labels."""
    if ds.labels is None:
        raise InvalidInputError("dataset carries no class labels")
    return Partition(np.asarray(ds.labels, dtype=np.int64))


def derive_seed(base: int, *parts) -> int:
    """Stable 64-bit seed from a base seed and arbitrary string-able parts.

    Used to give every sweep point its own reproducible yet decorrelated
    random stream.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(base)).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class SweepRecord:
    param: float
    partition: Partition
    n_communities: int
    rand_index: float


@dataclass(frozen=True)
class SweepResult:
    """Per-parameter-value outcomes plus the index of the best record.

    `best` attains the maximal Rand index; ties go to the smallest
    parameter value (records are sorted by parameter).
    """

    method: str  # "knn" or "epsnn"
    records: tuple[SweepRecord, ...] = field(repr=False)
    best: int

    @property
    def best_record(self) -> SweepRecord:
        return self.records[self.best]


def _best_index(ris) -> int:
    best = 0
    for i, ri in enumerate(ris):
        if ri > ris[best]:
            best = i
    return best


def sweep_k(
    D: DistanceMatrix, algo: Algorithm, seed: int, truth: Partition, context: str = ""
) -> SweepResult:
    """Evaluate the k-NN pipeline for every k in 1..n-1.

    `context` (typically the dataset name) feeds the per-point seed hash so
    runs over different datasets are decorrelated.
    """
    records = []
    for k in range(1, D.n):
        g = knn_graph(D, k)
        p = detect(g, algo, derive_seed(seed, context, D.measure.tag, algo.value, "k", k))
        records.append(SweepRecord(float(k), p, p.n_communities, rand_index(p, truth)))
    return SweepResult("knn", tuple(records), _best_index([r.rand_index for r in records]))


def eps_grid(D: DistanceMatrix) -> np.ndarray:
    """101 evenly spaced values from the minimal off-diagonal distance to the
    maximum (both endpoints included); a single value when the range is zero."""
    off = D.off_diagonal()
    lo, hi = float(off.min()), float(off.max())
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, 101)


def sweep_eps(
    D: DistanceMatrix, algo: Algorithm, seed: int, truth: Partition, context: str = ""
) -> SweepResult:
    """Evaluate the eps-NN pipeline over the 101-point grid."""
    records = []
    for j, eps in enumerate(eps_grid(D)):
        g = eps_graph(D, float(eps))
        p = detect(g, algo, derive_seed(seed, context, D.measure.tag, algo.value, "eps", j))
        records.append(SweepRecord(float(eps), p, p.n_communities, rand_index(p, truth)))
    return SweepResult("epsnn", tuple(records), _best_index([r.rand_index for r in records]))


def baseline_best_ri(D: DistanceMatrix, algo: str, truth: Partition) -> SweepResult:
    """Best-RI protocol for the rival methods: sweep the cluster count.

    Hierarchical methods cut the dendrogram at every k in 1..n; PAM runs
    k in 1..min(n, 50).
    """
    if algo not in BASELINE_ALGOS:
        raise ParameterError(f"unknown baseline {algo!r}; expected one of: {', '.join(BASELINE_ALGOS)}")
    records = []
    if algo == "pam":
        for k in range(1, min(D.n, PAM_MAX_K) + 1):
            p = baselines.pam(D, k)
            records.append(SweepRecord(float(k), p, p.n_communities, rand_index(p, truth)))
    else:
        dendro = baselines.diana(D) if algo == "diana" else baselines.agglomerative(D, algo)
        for k in range(1, D.n + 1):
            p = baselines.cut(dendro, k)
            records.append(SweepRecord(float(k), p, p.n_communities, rand_index(p, truth)))
    return SweepResult("cut-k", tuple(records), _best_index([r.rand_index for r in records]))


@dataclass(frozen=True)
class SummaryRow:
    """Median / mean / sample std of best RIs for one grouping key."""

    key: tuple
    count: int
    median: float
    mean: float
    std: float
    degenerate: bool  # single-element group: std reported as 0

    @classmethod
    def from_values(cls, key, values) -> "SummaryRow":
        arr = np.asarray(list(values), dtype=np.float64)
        degenerate = len(arr) < 2
        std = 0.0 if degenerate else float(arr.std(ddof=1))
        return cls(tuple(key), len(arr), float(np.median(arr)), float(arr.mean()), std, degenerate)


def summarize(groups) -> list[SummaryRow]:
    """Per-group median, mean and sample standard deviation.

    `groups` maps a grouping key (e.g. (measure, method, algorithm)) to the
    best-RI values collected across datasets. Empty groups are dropped with
    a warning.
    """
    rows = []
    for key, values in groups.items():
        values = list(values)
        if not values:
            warnings.warn(f"group {key!r} is empty and was excluded", stacklevel=2)
            continue
        rows.append(SummaryRow.from_values(key if isinstance(key, tuple) else (key,), values))
    return rows
