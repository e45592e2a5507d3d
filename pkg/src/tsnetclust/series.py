"""Time series and dataset value types plus z-score normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = ["TimeSeries", "Dataset", "z_normalize", "normalize_dataset"]


def _as_readonly(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"time series must be one-dimensional, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of real values.

    Immutable; the underlying array is read-only. Requires at least two
    finite values (every distance in the package uses at least one
    consecutive pair).
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_readonly(self.values))
        if len(self.values) < 2:
            raise InvalidInputError(f"time series needs length >= 2, got {len(self.values)}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("time series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class Dataset:
    """A collection of time series with optional integer class labels."""

    series: tuple[TimeSeries, ...]
    labels: tuple[int, ...] | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if len(self.series) < 2:
            raise InvalidInputError(f"dataset needs at least 2 series, got {len(self.series)}")
        if self.labels is not None:
            labels = tuple(int(c) for c in self.labels)
            if len(labels) != len(self.series):
                raise InvalidInputError(
                    f"{len(labels)} labels for {len(self.series)} series"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.series)

    def __len__(self) -> int:
        return len(self.series)

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.series)

    def uniform_length(self) -> int | None:
        """Common series length, or None when lengths differ."""
        lengths = set(self.lengths())
        return lengths.pop() if len(lengths) == 1 else None

    def as_matrix(self) -> np.ndarray:
        """Stack the series into an (n, t) array; requires uniform length."""
        if self.uniform_length() is None:
            raise InvalidInputError("dataset has series of differing lengths")
        return np.vstack([s.values for s in self.series])


def z_normalize(series: TimeSeries) -> TimeSeries:
    """Rescale a series to mean 0 and population standard deviation 1.

    A zero-variance series maps to the all-zero series of the same length,
    so degenerate rows never abort a batch run.
    """
    v = series.values
    # exact constantness check: a rounded mean can make std of a constant
    # series spuriously nonzero
    if np.all(v == v[0]):
        return TimeSeries(np.zeros_like(v))
    mean = v.mean()
    std = v.std()  # population (1/t) convention
    return TimeSeries((v - mean) / std)


def normalize_dataset(ds: Dataset) -> Dataset:
    """z-normalize every series independently; labels pass through."""
    normalized = []
    for i, s in enumerate(ds.series):
        try:
            normalized.append(z_normalize(s))
        except InvalidInputError as exc:
            raise InvalidInputError(f"series {i}: {exc}") from exc
    return Dataset(tuple(normalized), ds.labels, name=ds.name)
