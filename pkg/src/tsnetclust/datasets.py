"""UCR-format ingestion and synthetic generators (CBF, Two-Patterns).

The UCR text format is one record per line: an integer class label followed
by the series values, separated by commas, spaces or tabs. Labels are
remapped to dense 0-based ids in order of first appearance.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError, ParameterError
from .series import Dataset, TimeSeries

__all__ = [
    "load_ucr",
    "save_ucr",
    "generate_cbf",
    "generate_two_patterns",
    "GENERATORS",
]


def _parse_line(line: str, lineno: int) -> tuple[int, np.ndarray]:
    text = line.replace(",", " ")
    fields = text.split()
    if len(fields) < 3:
        raise FormatError(f"line {lineno}: expected a label and at least 2 values")
    try:
        raw = [float(f) for f in fields]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: non-numeric cell ({exc})") from None
    label = raw[0]
    if label != int(label):
        raise FormatError(f"line {lineno}: class label {label!r} is not an integer")
    values = np.asarray(raw[1:], dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise FormatError(f"line {lineno}: non-finite value")
    return int(label), values


def load_ucr(path, name: str = "") -> Dataset:
    """Read a UCR-format file into a Dataset with dense 0-based labels."""
    rows: list[tuple[int, int, np.ndarray]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            label, values = _parse_line(line, lineno)
            rows.append((lineno, label, values))
    if not rows:
        raise FormatError(f"{path}: empty file")
    t = len(rows[0][2])
    for lineno, _, values in rows:
        if len(values) != t:
            raise FormatError(f"line {lineno}: ragged row ({len(values)} values, expected {t})")
    remap: dict[int, int] = {}
    labels = []
    for _, raw_label, _ in rows:
        if raw_label not in remap:
            remap[raw_label] = len(remap)
        labels.append(remap[raw_label])
    series = tuple(TimeSeries(values) for _, _, values in rows)
    return Dataset(series, tuple(labels), name=name or str(path))


def save_ucr(ds: Dataset, path):
    """Write a dataset in UCR format; float64 values survive a round trip."""
    labels = ds.labels if ds.labels is not None else [0] * ds.n
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label, s in zip(labels, ds.series):
            cells = ",".join(repr(float(v)) for v in s.values)
            fh.write(f"{label},{cells}\n")


# ---------------------------------------------------------------------------
# synthetic generators


def generate_cbf(per_class: int, t: int = 128, seed: int = 0, noise_std: float = 1.0) -> Dataset:
    """Cylinder-Bell-Funnel: three shape classes over a noisy baseline.

    Each series places a pattern of amplitude 6 + eta (eta ~ N(0, noise_std))
    on a random window [a, b]: the cylinder holds a plateau, the bell ramps
    up linearly, the funnel ramps down. Gaussian noise of scale `noise_std`
    is added everywhere. Window ranges scale with t and reduce to the
    canonical onset [16, 32] / duration [32, 96] at the default t = 128.

    `noise_std = 0` is a test hook producing exact geometric shapes.
    """
    if per_class < 1:
        raise ParameterError(f"per_class must be >= 1, got {per_class}")
    if t < 64:
        raise ParameterError(f"cbf needs t >= 64, got {t}")
    onset_lo, onset_hi = t // 8, t // 4
    dur_lo, dur_hi = t // 4, (3 * t) // 4
    if onset_hi + dur_hi > t:
        raise ParameterError(f"t = {t} cannot fit onset up to {onset_hi} plus duration up to {dur_hi}")
    rng = np.random.default_rng(seed)
    grid = np.arange(t, dtype=np.float64)
    series = []
    labels = []
    for label, shape in enumerate(("cylinder", "bell", "funnel")):
        for _ in range(per_class):
            a = int(rng.integers(onset_lo, onset_hi + 1))
            b = a + int(rng.integers(dur_lo, dur_hi + 1))
            amplitude = 6.0 + noise_std * rng.normal()
            window = (grid >= a) & (grid <= b)
            if shape == "cylinder":
                profile = np.where(window, amplitude, 0.0)
            elif shape == "bell":
                profile = np.where(window, amplitude * (grid - a) / (b - a), 0.0)
            else:
                profile = np.where(window, amplitude * (b - grid) / (b - a), 0.0)
            values = profile + noise_std * rng.normal(size=t)
            series.append(TimeSeries(values))
            labels.append(label)
    return Dataset(tuple(series), tuple(labels), name=f"cbf-s{seed}")


def _step_pattern(direction: str, duration: int) -> np.ndarray:
    half = duration // 2
    low, high = -5.0, 5.0
    if direction == "u":
        return np.concatenate([np.full(half, low), np.full(duration - half, high)])
    return np.concatenate([np.full(half, high), np.full(duration - half, low)])


def generate_two_patterns(
    per_class: int, t: int = 128, seed: int = 0, noise_std: float = 1.0
) -> Dataset:
    """Two-Patterns: four classes UU, UD, DU, DD (labels 0..3).

    Each series holds two step patterns (upward: -5 then 5; downward: 5
    then -5) at random non-overlapping windows with durations uniform in
    [t//8, t//4]; everything outside the windows is N(0, noise_std) noise.

    `noise_std = 0` is a test hook leaving the background at zero.
    """
    if per_class < 1:
        raise ParameterError(f"per_class must be >= 1, got {per_class}")
    dur_lo, dur_hi = t // 8, t // 4
    if dur_lo < 2 or 2 * dur_hi > t:
        raise ParameterError(f"t = {t} cannot fit two patterns of duration up to {dur_hi}")
    rng = np.random.default_rng(seed)
    series = []
    labels = []
    for label, (first, second) in enumerate((("u", "u"), ("u", "d"), ("d", "u"), ("d", "d"))):
        for _ in range(per_class):
            d1 = int(rng.integers(dur_lo, dur_hi + 1))
            d2 = int(rng.integers(dur_lo, dur_hi + 1))
            s1 = int(rng.integers(0, t - d1 - d2 + 1))
            s2 = int(rng.integers(s1 + d1, t - d2 + 1))
            values = noise_std * rng.normal(size=t)
            values[s1 : s1 + d1] = _step_pattern(first, d1)
            values[s2 : s2 + d2] = _step_pattern(second, d2)
            series.append(TimeSeries(values))
            labels.append(label)
    return Dataset(tuple(series), tuple(labels), name=f"two_patterns-s{seed}")


GENERATORS = {"cbf": generate_cbf, "two_patterns": generate_two_patterns}
