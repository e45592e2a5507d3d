"""On-disk cache for distance matrices.

Binary layout (little-endian): 8-byte magic ``TSNCDM01``, uint32 n,
uint16 measure-tag length, the UTF-8 measure tag, then n(n-1)/2 float64
upper-triangle entries in row-major order.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .distances import DistanceMatrix, DistanceMeasure, distance_matrix
from .errors import FormatError
from .series import Dataset

MAGIC = b"TSNCDM01"

__all__ = ["save_matrix", "load_matrix", "dataset_fingerprint", "cached_distance_matrix"]


def save_matrix(D: DistanceMatrix, path):
    upper = D.off_diagonal().astype("<f8")
    tag = D.measure.tag.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IH", D.n, len(tag)))
        fh.write(tag)
        fh.write(upper.tobytes())


def load_matrix(path) -> DistanceMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != MAGIC:
        raise FormatError(f"{path}: bad magic, not a distance matrix cache file")
    n, tag_len = struct.unpack_from("<IH", blob, 8)
    tag = blob[14 : 14 + tag_len].decode("utf-8")
    upper = np.frombuffer(blob, dtype="<f8", offset=14 + tag_len)
    if len(upper) != n * (n - 1) // 2:
        raise FormatError(f"{path}: truncated cache file")
    out = np.zeros((n, n))
    out[np.triu_indices(n, 1)] = upper
    level = None
    if tag.startswith("dwt-l"):
        level = int(tag[5:])
        tag = "dwt"
    return DistanceMatrix(out + out.T, DistanceMeasure.from_name(tag, dwt_level=level))


def dataset_fingerprint(ds: Dataset) -> str:
    """Content hash of series values and labels, for cache keys."""
    h = hashlib.sha256()
    for s in ds.series:
        h.update(s.values.astype("<f8").tobytes())
        h.update(b"\x00")
    if ds.labels is not None:
        h.update(",".join(map(str, ds.labels)).encode())
    return h.hexdigest()[:20]


def cached_distance_matrix(
    ds: Dataset, measure: DistanceMeasure, cache_dir, jobs: int = 1
) -> DistanceMatrix:
    """Compute a distance matrix, reusing an on-disk copy when present."""
    if cache_dir is None:
        return distance_matrix(ds, measure, jobs=jobs)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{dataset_fingerprint(ds)}__{measure.tag}.dmat"
    if path.exists():
        return load_matrix(path)
    D = distance_matrix(ds, measure, jobs=jobs)
    tmp = path.with_suffix(".tmp")
    save_matrix(D, tmp)
    tmp.replace(path)
    return D
