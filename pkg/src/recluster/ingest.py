"""Loading of 1-D measurement series and histogram construction.

Input files are plain UTF-8 text, one value per row ('.' decimal
separator), with an optional single header row that is auto-detected.
Cleaning removes user-listed sentinel values and, by default, non-finite
entries; everything downstream assumes sorted, finite data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "Sample",
    "Histogram",
    "BinSpec",
    "load_series",
    "sample_from_values",
    "build_histogram",
    "subhists",
    "subdatas",
]


@dataclass(frozen=True, eq=False)
class Sample:
    """Cleaned, ascending measurement series plus provenance counters.

    ``values`` are finite and sorted; ``n_dropped`` records how many raw
    rows were removed (sentinels and non-finite entries).
    """

    values: np.ndarray
    source_id: str
    n: int
    n_dropped: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if self.n != self.values.size:
            raise ValueError("sample size counter disagrees with values")
        if self.values.size and not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")
        if self.values.size > 1 and np.any(np.diff(self.values) < 0):
            raise ValueError("sample values must be sorted ascending")


@dataclass(frozen=True, eq=False)
class Histogram:
    """Bin edges and occupancy counts over a closed interval.

    ``edges`` has one more entry than ``counts`` and is strictly
    increasing.  The rightmost bin is closed on both sides so the data
    maximum is counted.
    """

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=float))
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        if self.edges.size != self.counts.size + 1:
            raise ValueError("need exactly len(counts)+1 edges")
        if self.counts.size < 1:
            raise ValueError("histogram needs at least one bucket")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def n_buckets(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class BinSpec:
    """Binning rule: fixed bucket count, fixed bucket width, or the
    Freedman-Diaconis width 2*IQR*n^(-1/3)."""

    mode: str
    k: int | None = None
    w: float | None = None

    _MODES = ("fixed_count", "fixed_width", "freedman_diaconis")

    def __post_init__(self) -> None:
        if self.mode not in self._MODES:
            raise ConfigError(f"unknown bin mode {self.mode!r}")
        if self.mode == "fixed_count":
            if self.k is None or self.w is not None:
                raise ConfigError("fixed_count takes k only")
            if self.k < 2:
                raise ConfigError("fixed_count needs k >= 2")
        elif self.mode == "fixed_width":
            if self.w is None or self.k is not None:
                raise ConfigError("fixed_width takes w only")
            if not self.w > 0:
                raise ConfigError("fixed_width needs w > 0")
        elif self.k is not None or self.w is not None:
            raise ConfigError("freedman_diaconis takes no parameters")

    @classmethod
    def fixed_count(cls, k: int) -> "BinSpec":
        return cls("fixed_count", k=int(k))

    @classmethod
    def fixed_width(cls, w: float) -> "BinSpec":
        return cls("fixed_width", w=float(w))

    @classmethod
    def freedman_diaconis(cls) -> "BinSpec":
        return cls("freedman_diaconis")

    def describe(self) -> str:
        if self.mode == "fixed_count":
            return f"fixed_count(k={self.k})"
        if self.mode == "fixed_width":
            return f"fixed_width(w={self.w:g})"
        return "freedman_diaconis"


def sample_from_values(values: Iterable[float], source_id: str = "memory") -> Sample:
    """Build a Sample from an in-memory sequence (sorted copy, no drops)."""
    arr = np.sort(np.asarray(list(values), dtype=float))
    if arr.size == 0:
        raise DataError("zero retained values")
    if not np.all(np.isfinite(arr)):
        raise DataError("non-finite values in input sequence")
    return Sample(values=arr, source_id=source_id, n=arr.size, n_dropped=0)


def load_series(
    path: str | Path,
    na_sentinels: Sequence[float] = (),
    drop_nonfinite: bool = True,
) -> Sample:
    """Read a one-value-per-row text file into a cleaned Sample.

    A single non-numeric first row is treated as a header.  Rows whose
    value equals one of ``na_sentinels`` are dropped, as are non-finite
    rows when ``drop_nonfinite`` is set; both are tallied in
    ``n_dropped``.  Blank lines are ignored.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    sentinels = {float(s) for s in na_sentinels}
    kept: list[float] = []
    n_dropped = 0
    row = 0
    for line in text.splitlines():
        token = line.strip()
        if not token:
            continue
        row += 1
        try:
            value = float(token)
        except ValueError:
            if row == 1:
                continue  # header row
            raise DataError(f"non-numeric row {row} in {path}: {token!r}") from None
        if value in sentinels:
            n_dropped += 1
            continue
        if not math.isfinite(value):
            if drop_nonfinite:
                n_dropped += 1
                continue
            raise DataError(f"non-finite value at row {row} in {path}")
        kept.append(value)

    if not kept:
        raise DataError(f"zero retained values in {path}")
    values = np.sort(np.asarray(kept, dtype=float))
    return Sample(values=values, source_id=str(path), n=values.size, n_dropped=n_dropped)


def build_histogram(sample: Sample, spec: BinSpec) -> Histogram:
    """Bin a sample according to ``spec``.

    Freedman-Diaconis uses width h = 2*IQR*n^(-1/3) and
    ceil(range/h) buckets over [min, max]; it needs n >= 4 and a
    positive IQR.  A zero-width value range cannot be binned at all.
    """
    values = sample.values
    if sample.n < 1:
        raise DataError("cannot bin an empty sample")
    lo = float(values[0])
    hi = float(values[-1])
    if hi <= lo:
        raise DataError("degenerate range: all values identical")

    if spec.mode == "fixed_count":
        edges = np.linspace(lo, hi, spec.k + 1)
    elif spec.mode == "fixed_width":
        m = max(1, math.ceil((hi - lo) / spec.w))
        if lo + m * spec.w < hi:  # guard against float shortfall
            m += 1
        edges = lo + spec.w * np.arange(m + 1)
    else:
        if sample.n < 4:
            raise DataError("freedman_diaconis needs at least 4 points")
        q25, q75 = np.percentile(values, [25.0, 75.0])
        iqr = float(q75 - q25)
        if iqr <= 0:
            raise DataError("degenerate range: zero interquartile range")
        width = 2.0 * iqr * sample.n ** (-1.0 / 3.0)
        m = max(1, math.ceil((hi - lo) / width))
        edges = np.linspace(lo, hi, m + 1)

    counts, _ = np.histogram(values, bins=edges)
    return Histogram(edges=edges, counts=counts)


def _snap_indices(hist: Histogram, borders: Sequence[float]) -> list[int]:
    """Map each border to the index of its nearest bin edge."""
    edges = hist.edges
    lo, hi = edges[0], edges[-1]
    indices: list[int] = []
    for border in borders:
        if not lo < border < hi:
            raise DataError(f"border {border:g} outside histogram range ({lo:g}, {hi:g})")
        indices.append(int(np.argmin(np.abs(edges - border))))
    return indices


def subhists(hist: Histogram, borders: Sequence[float]) -> list[Histogram]:
    """Split a histogram at borders snapped to the nearest bin edges.

    The sub-histogram counts concatenate back to the parent counts and
    the sub-edge sequences tile the parent interval.  A border snapping
    onto an endpoint, or two borders snapping onto the same edge, would
    leave an empty sub-range and is an error.
    """
    borders = sorted(float(b) for b in borders)
    if not borders:
        return [hist]
    idx = _snap_indices(hist, borders)
    last = hist.edges.size - 1
    if any(i in (0, last) for i in idx) or len(set(idx)) != len(idx):
        raise DataError("empty sub-range: borders collapse onto the same bin edge")
    cuts = [0, *idx, last]
    return [
        Histogram(edges=hist.edges[a : b + 1], counts=hist.counts[a:b])
        for a, b in zip(cuts[:-1], cuts[1:])
    ]


def subdatas(sample: Sample, borders: Sequence[float]) -> list[Sample]:
    """Split a sample at exact border values.

    Segments are left-closed/right-open (a point equal to a border goes
    to the right segment); the last segment is closed.  Segments may be
    empty; their union is the parent sample.
    """
    borders = [float(b) for b in borders]
    if any(b2 < b1 for b1, b2 in zip(borders, borders[1:])):
        raise DataError("borders must be sorted ascending")
    values = sample.values
    if borders and (borders[0] < values[0] or borders[-1] > values[-1]):
        raise DataError("border outside data range")
    cuts = np.searchsorted(values, borders, side="left")
    pieces = np.split(values, cuts)
    return [
        Sample(values=piece, source_id=sample.source_id, n=piece.size, n_dropped=0)
        for piece in pieces
    ]
