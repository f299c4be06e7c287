"""
Reading arrival-time and histogram files.

Arrival-time files hold one decimal number per line (ns), with an
optional non-numeric header such as ``time_ns``. Histogram files are CSV
with columns ``time_ns,count`` and an optional header row; bins must be
uniformly spaced.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, DomainError, EmptyInputError, FormatError, ParseError
from .sample import ArrivalSample

DEFAULT_TAIL_FRACTION = 0.1
# tolerated relative deviation of a bin spacing from the median spacing
SPACING_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class HistogramData:
    """Uniformly binned arrival-time counts.

    ``baseline`` records the per-bin count removed by
    :func:`subtract_baseline` (0 for raw data).
    """

    bin_centers: np.ndarray
    counts: np.ndarray
    bin_width: float
    baseline: float = field(default=0.0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class WeightedSample:
    times: np.ndarray
    weights: np.ndarray


def _parse_float(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def read_times(path: str | Path) -> ArrivalSample:
    """Load an arrival-time file into an :class:`ArrivalSample`."""
    values = []
    with open(path, encoding="utf-8", newline=None) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            value = _parse_float(text)
            if value is None:
                if lineno == 1:
                    continue  # header
                raise ParseError(f"not a number: {text!r}", lineno)
            if not math.isfinite(value):
                raise ParseError(f"non-finite time {text!r}", lineno)
            if value < 0.0:
                raise ParseError(f"negative time {text!r}", lineno)
            values.append(value)
    if not values:
        raise EmptyInputError(f"{path}: no arrival times")
    return ArrivalSample(np.array(values))


def write_times(path: str | Path, sample: ArrivalSample) -> None:
    """Write one time per line with 17 significant digits (exact round-trip)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("time_ns\n")
        for x in sample.times.tolist():
            fh.write(f"{x:.17g}\n")


def read_histogram(path: str | Path) -> HistogramData:
    """Load a two-column ``time_ns,count`` CSV and validate the binning."""
    centers, counts = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", lineno)
            t, c = _parse_float(row[0]), _parse_float(row[1])
            if t is None or c is None:
                if lineno == 1:
                    continue
                raise ParseError(f"not numeric: {row!r}", lineno)
            if not (math.isfinite(t) and math.isfinite(c)):
                raise ParseError("non-finite value", lineno)
            if c < 0 or c != int(c):
                raise FormatError(f"line {lineno}: counts must be non-negative integers, got {row[1]!r}")
            centers.append(t)
            counts.append(int(c))
    if not centers:
        raise EmptyInputError(f"{path}: no histogram rows")
    if len(centers) < 2:
        raise FormatError("a single bin leaves the bin width undefined")
    x = np.array(centers)
    diffs = np.diff(x)
    if np.any(diffs <= 0.0):
        raise FormatError("bin centers must be strictly increasing")
    width = float(np.median(diffs))
    if np.any(np.abs(diffs - width) > SPACING_RTOL * width):
        raise FormatError("bin centers are not uniformly spaced")
    return HistogramData(x, np.array(counts, dtype=np.int64), width)


def subtract_baseline(h: HistogramData, tail_fraction: float = DEFAULT_TAIL_FRACTION) -> HistogramData:
    """Remove a flat dark-count floor estimated from the histogram tail.

    The floor is the mean count of the last ``ceil(tail_fraction * bins)``
    bins. It is subtracted from every bin; results are clamped at zero and
    rounded to the nearest integer.
    """
    tail_fraction = float(tail_fraction)
    if not 0.0 < tail_fraction <= 0.5:
        raise DomainError(f"tail_fraction must lie in (0, 0.5], got {tail_fraction}")
    m = h.counts.size
    k = max(1, math.ceil(tail_fraction * m))
    b = float(np.mean(h.counts[-k:]))
    # half-up rounding; inputs are non-negative after clamping
    new = np.floor(np.maximum(h.counts - b, 0.0) + 0.5).astype(np.int64)
    if new.sum() == 0:
        raise DegenerateDataError("no counts remain after baseline subtraction")
    return HistogramData(h.bin_centers, new, h.bin_width, baseline=h.baseline + b)


def histogram_to_weighted(h: HistogramData) -> WeightedSample:
    """Bin centers as representative times, counts as weights."""
    return WeightedSample(h.bin_centers.astype(float), h.counts.astype(float))


def expand_weighted(ws: WeightedSample) -> ArrivalSample:
    """Repeat each time by its (integer) weight."""
    reps = np.rint(ws.weights).astype(np.int64)
    if np.any(reps < 0) or reps.sum() == 0:
        raise DegenerateDataError("weights expand to an empty sample")
    return ArrivalSample(np.repeat(ws.times, reps))
