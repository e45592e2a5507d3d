"""The ten time series distance functions and pairwise distance matrices.

Lock-step measures (everything except DTW) require equal-length series.
All functions accept :class:`~tsnetclust.series.TimeSeries` or plain
1-d arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .errors import DegenerateInputError, InvalidInputError, LengthMismatchError, ParameterError
from .series import Dataset, TimeSeries

# the portable threading layer; avoids the noisy TBB-version probe and keeps
# parallel runs reproducible everywhere
numba.config.THREADING_LAYER = "workqueue"

__all__ = [
    "MeasureKind",
    "DistanceMeasure",
    "DistanceMatrix",
    "lp_distance",
    "dtw_distance",
    "sts_distance",
    "dissim_distance",
    "cid_distance",
    "dwt_distance",
    "cor_distance",
    "intper_distance",
    "pair_distance",
    "distance_matrix",
]

_CE_FLOOR = 1e-12  # divergence guard for CID's complexity ratio
_SQRT2 = math.sqrt(2.0)


class MeasureKind(enum.Enum):
    L1 = "l1"
    ED = "ed"
    LINF = "linf"
    DTW = "dtw"
    STS = "sts"
    DISSIM = "dissim"
    CID = "cid"
    DWT = "dwt"
    COR = "cor"
    INTPER = "intper"


@dataclass(frozen=True)
class DistanceMeasure:
    """A distance function selection plus its measure-specific settings.

    ``dwt_level`` is the number of Haar averaging levels retained by the
    DWT measure; ``None`` picks ``floor(log2(t) / 2)`` per series length.
    It is ignored by every other kind. DTW runs unconstrained (no window).
    """

    kind: MeasureKind
    dwt_level: int | None = None

    @classmethod
    def from_name(cls, name: str, dwt_level: int | None = None) -> "DistanceMeasure":
        try:
            kind = MeasureKind(name.lower())
        except ValueError:
            valid = ", ".join(k.value for k in MeasureKind)
            raise ParameterError(f"unknown measure {name!r}; expected one of: {valid}") from None
        return cls(kind, dwt_level if kind is MeasureKind.DWT else None)

    @property
    def tag(self) -> str:
        """Short stable identifier used in file names and CSV columns."""
        if self.kind is MeasureKind.DWT and self.dwt_level is not None:
            return f"dwt-l{self.dwt_level}"
        return self.kind.value


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative pairwise distance matrix with zero diagonal."""

    values: np.ndarray
    measure: DistanceMeasure

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvalidInputError(f"distance matrix must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("distance matrix contains non-finite entries")
        if np.any(v < 0):
            raise InvalidInputError("distance matrix contains negative entries")
        if np.any(np.diagonal(v) != 0.0):
            raise InvalidInputError("distance matrix diagonal must be exactly zero")
        if not np.array_equal(v, v.T):
            raise InvalidInputError("distance matrix must be exactly symmetric")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """Upper-triangle entries in row-major order."""
        return self.values[np.triu_indices(self.n, 1)]


def _values(x) -> np.ndarray:
    if isinstance(x, TimeSeries):
        return x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"expected a 1-d series, got shape {arr.shape}")
    return arr


def _check_lockstep(x: np.ndarray, y: np.ndarray):
    if len(x) != len(y):
        raise LengthMismatchError(f"lock-step measure needs equal lengths, got {len(x)} and {len(y)}")


def lp_distance(x, y, p) -> float:
    """Minkowski distance (sum |x_i - y_i|^p)^(1/p); p = inf gives the max norm."""
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    d = np.abs(xv - yv)
    if p == math.inf:
        return float(d.max())
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise ParameterError(f"p must be a positive integer or infinity, got {p!r}")
    if p == 1:
        return float(d.sum())
    if p == 2:
        return float(np.sqrt((d * d).sum()))
    return float((d**p).sum() ** (1.0 / p))


@njit(cache=True)
def _dtw_kernel(x, y):  # pragma: no cover - exercised through dtw_distance
    n, m = x.shape[0], y.shape[0]
    prev = np.empty(m, dtype=np.float64)
    curr = np.empty(m, dtype=np.float64)
    acc = 0.0
    for j in range(m):
        acc = acc + abs(x[0] - y[j])
        prev[j] = acc
    for i in range(1, n):
        curr[0] = prev[0] + abs(x[i] - y[0])
        for j in range(1, m):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if curr[j - 1] < best:
                best = curr[j - 1]
            curr[j] = abs(x[i] - y[j]) + best
        prev, curr = curr, prev
    return prev[m - 1]


@njit(cache=True, parallel=True)
def _dtw_pairs_kernel(X, ii, jj, out):  # pragma: no cover
    for p in prange(ii.shape[0]):
        out[p] = _dtw_kernel(X[ii[p]], X[jj[p]])


def dtw_distance(x, y) -> float:
    """Dynamic time warping cost with absolute-difference local cost.

    Optimal monotone warping path from (1,1) to (|x|,|y|), steps
    {(1,0),(0,1),(1,1)}, no window constraint. Lengths may differ.
    """
    xv, yv = _values(x), _values(y)
    if len(xv) == 0 or len(yv) == 0:
        raise InvalidInputError("dtw needs non-empty series")
    return float(_dtw_kernel(xv, yv))


def sts_distance(x, y) -> float:
    """Euclidean distance between the first-difference (slope) sequences."""
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    d = np.diff(xv) - np.diff(yv)
    return float(np.sqrt((d * d).sum()))


def dissim_distance(x, y) -> float:
    """Trapezoidal integral of the pointwise distance over unit sampling."""
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    a = np.abs(xv - yv)
    return float(a.sum() - 0.5 * (a[0] + a[-1]))


def _complexity(v: np.ndarray) -> float:
    d = np.diff(v)
    return float(np.sqrt((d * d).sum()))


def cid_distance(x, y) -> float:
    """Euclidean distance scaled by the ratio of the series' complexity estimates."""
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    ed = lp_distance(xv, yv, 2)
    ce_x, ce_y = _complexity(xv), _complexity(yv)
    hi, lo = max(ce_x, ce_y), min(ce_x, ce_y)
    if hi == 0.0:
        cf = 1.0
    else:
        cf = hi / max(lo, _CE_FLOOR)
    return ed * cf


def _next_pow2(t: int) -> int:
    return 1 << (t - 1).bit_length()


def default_dwt_level(t: int) -> int:
    """Default retained-approximation level for the DWT measure."""
    return int(math.log2(t)) // 2


def _haar_approx(rows: np.ndarray, level: int) -> np.ndarray:
    """Approximation coefficients of the orthonormal Haar DWT after `level` steps.

    Input rows are zero-padded to the next power of two first.
    """
    t = rows.shape[-1]
    p2 = _next_pow2(t)
    max_level = int(math.log2(p2))
    if level < 0 or level > max_level:
        raise ParameterError(f"dwt level must lie in [0, {max_level}] for length {t}, got {level}")
    if p2 != t:
        pad = np.zeros(rows.shape[:-1] + (p2 - t,), dtype=rows.dtype)
        rows = np.concatenate([rows, pad], axis=-1)
    a = rows
    for _ in range(level):
        a = (a[..., 0::2] + a[..., 1::2]) / _SQRT2
    return a


def dwt_distance(x, y, level: int | None = None) -> float:
    """Euclidean distance between Haar approximation coefficients at `level`.

    Level 0 keeps the full (zero-padded) series, so it coincides with the
    Euclidean distance; each further level halves the feature count.
    """
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    if level is None:
        level = default_dwt_level(len(xv))
    rows = _haar_approx(np.vstack([xv, yv]), level)
    d = rows[0] - rows[1]
    return float(np.sqrt((d * d).sum()))


def cor_distance(x, y) -> float:
    """sqrt(2 (1 - rho)) for the Pearson correlation rho; range [0, 2].

    Evaluated as the root mean square difference of the z-scored series,
    which is algebraically identical and keeps d(X, X) exactly zero.
    """
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    sx, sy = xv.std(), yv.std()
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("correlation is undefined for constant series")
    zx = (xv - xv.mean()) / sx
    zy = (yv - yv.mean()) / sy
    return float(np.sqrt(((zx - zy) ** 2).mean()))


def _cum_periodogram(rows: np.ndarray) -> np.ndarray:
    """Normalized cumulative periodogram at Fourier frequencies k = 1..t//2.

    Raises on zero total spectral power (constant series).
    """
    t = rows.shape[-1]
    if t < 4:
        raise InvalidInputError(f"integrated periodogram needs length >= 4, got {t}")
    spec = np.abs(np.fft.rfft(rows, axis=-1)) ** 2 / t
    p = spec[..., 1 : t // 2 + 1]
    total = p.sum(axis=-1, keepdims=True)
    if np.any(total == 0.0):
        bad = int(np.nonzero(total.ravel() == 0.0)[0][0])
        exc = DegenerateInputError(f"series {bad} has zero spectral power (constant series)")
        exc.bad_index = bad
        raise exc
    return np.cumsum(p, axis=-1) / total


def intper_distance(x, y) -> float:
    """Sum of absolute differences between normalized cumulative periodograms."""
    xv, yv = _values(x), _values(y)
    _check_lockstep(xv, yv)
    f = _cum_periodogram(np.vstack([xv, yv]))
    return float(np.abs(f[0] - f[1]).sum())


def pair_distance(x, y, measure: DistanceMeasure) -> float:
    """Evaluate one measure on one pair of series."""
    k = measure.kind
    if k is MeasureKind.L1:
        return lp_distance(x, y, 1)
    if k is MeasureKind.ED:
        return lp_distance(x, y, 2)
    if k is MeasureKind.LINF:
        return lp_distance(x, y, math.inf)
    if k is MeasureKind.DTW:
        return dtw_distance(x, y)
    if k is MeasureKind.STS:
        return sts_distance(x, y)
    if k is MeasureKind.DISSIM:
        return dissim_distance(x, y)
    if k is MeasureKind.CID:
        return cid_distance(x, y)
    if k is MeasureKind.DWT:
        return dwt_distance(x, y, measure.dwt_level)
    if k is MeasureKind.COR:
        return cor_distance(x, y)
    if k is MeasureKind.INTPER:
        return intper_distance(x, y)
    raise ParameterError(f"unknown measure kind {k!r}")


def _rowwise_upper(X: np.ndarray, reduce) -> np.ndarray:
    """Apply `reduce` to |X[i] - X[j]| for all i < j, row-major order."""
    chunks = [reduce(np.abs(X[i + 1 :] - X[i])) for i in range(X.shape[0] - 1)]
    return np.concatenate(chunks) if chunks else np.empty(0)


def _first_bad_pair(n: int, bad: int) -> tuple[int, int]:
    """First row-major upper-triangle pair that touches series `bad`."""
    return (0, 1) if bad == 0 else (0, bad)


def _upper_values(ds: Dataset, measure: DistanceMeasure, jobs: int) -> np.ndarray:
    n = ds.n
    kind = measure.kind
    lengths = ds.lengths()

    if kind is MeasureKind.DTW:
        if len(set(lengths)) == 1:
            X = ds.as_matrix()
            ii, jj = np.triu_indices(n, 1)
            out = np.empty(len(ii))
            _run_dtw_pairs(X, ii.astype(np.int64), jj.astype(np.int64), out, jobs)
            return out
        vals = [
            _dtw_kernel(ds.series[i].values, ds.series[j].values)
            for i in range(n)
            for j in range(i + 1, n)
        ]
        return np.asarray(vals, dtype=np.float64)

    mismatch = next((j for j, t in enumerate(lengths) if t != lengths[0]), None)
    if mismatch is not None:
        raise LengthMismatchError(
            f"pair (0, {mismatch}): lock-step measure {measure.tag} needs equal "
            f"lengths, got {lengths[0]} and {lengths[mismatch]}"
        )
    X = ds.as_matrix()
    t = X.shape[1]

    if kind is MeasureKind.L1:
        return _rowwise_upper(X, lambda d: d.sum(axis=-1))
    if kind is MeasureKind.ED:
        return _rowwise_upper(X, lambda d: np.sqrt((d * d).sum(axis=-1)))
    if kind is MeasureKind.LINF:
        return _rowwise_upper(X, lambda d: d.max(axis=-1))
    if kind is MeasureKind.STS:
        S = np.diff(X, axis=-1)
        return _rowwise_upper(S, lambda d: np.sqrt((d * d).sum(axis=-1)))
    if kind is MeasureKind.DISSIM:
        return _rowwise_upper(X, lambda d: d.sum(axis=-1) - 0.5 * (d[:, 0] + d[:, -1]))
    if kind is MeasureKind.CID:
        ed = _rowwise_upper(X, lambda d: np.sqrt((d * d).sum(axis=-1)))
        ce = np.array([_complexity(row) for row in X])
        ii, jj = np.triu_indices(n, 1)
        hi = np.maximum(ce[ii], ce[jj])
        lo = np.minimum(ce[ii], ce[jj])
        cf = np.where(hi == 0.0, 1.0, hi / np.maximum(lo, _CE_FLOOR))
        return ed * cf
    if kind is MeasureKind.DWT:
        level = measure.dwt_level if measure.dwt_level is not None else default_dwt_level(t)
        A = _haar_approx(X, level)
        return _rowwise_upper(A, lambda d: np.sqrt((d * d).sum(axis=-1)))
    if kind is MeasureKind.COR:
        std = X.std(axis=-1)
        if np.any(std == 0.0):
            i, j = _first_bad_pair(n, int(np.nonzero(std == 0.0)[0][0]))
            raise DegenerateInputError(f"pair ({i}, {j}): correlation is undefined for constant series")
        Z = (X - X.mean(axis=-1, keepdims=True)) / std[:, None]
        return _rowwise_upper(Z, lambda d: np.sqrt((d * d).mean(axis=-1)))
    if kind is MeasureKind.INTPER:
        try:
            F = _cum_periodogram(X)
        except DegenerateInputError as exc:
            i, j = _first_bad_pair(n, exc.bad_index)
            raise DegenerateInputError(f"pair ({i}, {j}): {exc}") from None
        return _rowwise_upper(F, lambda d: d.sum(axis=-1))
    raise ParameterError(f"unknown measure kind {kind!r}")


def _run_dtw_pairs(X, ii, jj, out, jobs: int):
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(jobs, limit)))
    try:
        _dtw_pairs_kernel(X, ii, jj, out)
    finally:
        numba.set_num_threads(limit)


def distance_matrix(ds: Dataset, measure: DistanceMeasure, jobs: int = 1) -> DistanceMatrix:
    """All pairwise distances for a dataset under one measure.

    Only the upper triangle is computed and it is mirrored, so symmetry and
    the zero diagonal hold exactly. `jobs` parallelizes the DTW pair loop
    (the only O(t^2) hot path); other measures are vectorized and ignore it.
    Pairs are independent, so the result does not depend on `jobs`.
    """
    vals = _upper_values(ds, measure, jobs)
    if np.any(~np.isfinite(vals)) or np.any(vals < 0):
        bad = int(np.nonzero(~np.isfinite(vals) | (vals < 0))[0][0])
        ii, jj = np.triu_indices(ds.n, 1)
        raise InvalidInputError(
            f"pair ({ii[bad]}, {jj[bad]}): measure {measure.tag} produced {vals[bad]!r}"
        )
    out = np.zeros((ds.n, ds.n))
    out[np.triu_indices(ds.n, 1)] = vals
    return DistanceMatrix(out + out.T, measure)
