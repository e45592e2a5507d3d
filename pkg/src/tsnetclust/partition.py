"""Canonical vertex-to-community assignments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = ["Partition", "canonical_labels"]


def canonical_labels(labels) -> np.ndarray:
    """Relabel community ids densely 0..c-1, ordered by smallest member vertex."""
    arr = np.asarray(labels)
    out = np.empty(len(arr), dtype=np.int64)
    mapping: dict = {}
    for i, c in enumerate(arr.tolist()):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


@dataclass(frozen=True)
class Partition:
    """Surjective map from vertex index to community id, stored canonically.

    Ids are dense integers 0..c-1 ordered by each community's smallest
    member vertex; two partitions are equal iff their label arrays match.
    """

    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 1 or len(arr) == 0:
            raise InvalidInputError("partition needs a non-empty 1-d label array")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InvalidInputError(f"community ids must be integers, got dtype {arr.dtype}")
        arr = canonical_labels(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1

    def communities(self) -> list[list[int]]:
        """Members per community id, each list ascending."""
        out: list[list[int]] = [[] for _ in range(self.n_communities)]
        for v, c in enumerate(self.labels.tolist()):
            out[c].append(v)
        return out

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_communities)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def single_community(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64))


def write_partition(p: Partition, path):
    """Write one `vertex community` pair per line, vertices ascending."""
    with open(path, "w", encoding="utf-8") as fh:
        for v, c in enumerate(p.labels.tolist()):
            fh.write(f"{v} {c}\n")
