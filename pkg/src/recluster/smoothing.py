"""Savitzky-Golay smoothing of histogram counts and the hill-count rule
that decides how many clusters a value range holds.

The filter is the classic least-squares convolution smoother: each
interior point is replaced by the central value of a degree-``poly``
polynomial fit over a sliding window of ``w_length`` points.  Boundary
points are fitted over their available truncated windows, in place, so
no data is invented by padding or extrapolation.  Repeated application
washes out structure scale by scale; watching when the number of hills
passes through 3, 2 and 1 yields the cluster-count decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConfigError, DataError
from .ingest import Histogram

__all__ = [
    "SGParams",
    "SmoothingTrace",
    "SmoothedHistogram",
    "sg_coefficients",
    "sg_filter",
    "count_hills",
    "decide_cluster_count",
    "smoothing_series",
]

DECISION_POLICIES = ("persistence", "literal")


@dataclass(frozen=True)
class SGParams:
    """Filter window length (odd), fit degree, and the cap on repeated
    smoothing passes."""

    w_length: int = 7
    poly: int = 3
    max_iter: int = 100

    def __post_init__(self) -> None:
        if self.w_length < 3 or self.w_length % 2 == 0:
            raise ConfigError("w_length must be odd and >= 3")
        if self.poly < 0:
            raise ConfigError("poly must be non-negative")
        if self.poly >= self.w_length:
            raise ConfigError("underdetermined fit: poly must be < w_length")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")


@dataclass(frozen=True)
class SmoothingTrace:
    """First pass indices (0-based) at which the smoothed histogram had
    exactly 1, 2 and 3 hills; ``None`` marks a count never seen."""

    first_1: int | None
    first_2: int | None
    first_3: int | None
    iterations_run: int
    final_hills: int

    def as_dict(self) -> dict:
        return {
            "first_1_hill": self.first_1,
            "first_2_hills": self.first_2,
            "first_3_hills": self.first_3,
            "iterations_run": self.iterations_run,
            "final_hills": self.final_hills,
        }


@dataclass(frozen=True, eq=False)
class SmoothedHistogram:
    """One smoothing pass over a histogram: same edges, real-valued
    heights, negatives clamped to zero (clamp count kept for reporting)."""

    edges: np.ndarray
    values: np.ndarray
    clamped_negatives: int


def sg_coefficients(w_length: int, poly: int) -> np.ndarray:
    """Central-point convolution weights of the smoothing filter.

    The weights reproduce the middle value of any polynomial of degree
    <= ``poly`` sampled on the window, sum to 1, and are symmetric.

    Parameters
    ----------
    w_length : odd int
        Window length (number of weights).
    poly : int
        Degree of the fitted polynomial, < ``w_length``.

    Returns
    -------
    np.ndarray
        ``w_length`` weights, ordered to be dotted with a data window.
    """
    if w_length < 1 or w_length % 2 == 0:
        raise ConfigError("w_length must be odd")
    if poly < 0:
        raise ConfigError("poly must be non-negative")
    if poly >= w_length:
        raise ConfigError("underdetermined fit: poly must be < w_length")
    half = w_length // 2
    x = np.arange(-half, half + 1, dtype=float)
    # expand the least-squares projector in discrete orthogonal (Gram)
    # polynomials on the window; stable for any degree, exactly
    # symmetric by parity, and the unit sum comes from the k=0 term alone
    weights = np.full(w_length, 1.0 / w_length)
    prev = np.ones(w_length)
    prev_norm = float(w_length)
    cur = x.copy()
    cur_norm = float(cur @ cur)
    for k in range(1, poly + 1):
        center = cur[half]
        if center != 0.0:  # odd-degree terms vanish at the center
            weights = weights + (center / cur_norm) * cur
        nxt = x * cur - (cur_norm / prev_norm) * prev
        prev, prev_norm = cur, cur_norm
        cur = nxt
        cur_norm = float(cur @ cur)
    return weights


def _fit_eval(y: np.ndarray, degree: int, at: float) -> float:
    """Least-squares polynomial through y on the grid 0..len(y)-1,
    evaluated at position ``at``; exact interpolation when the window
    has no more points than the degree allows."""
    degree = min(degree, y.size - 1)
    x = np.arange(y.size, dtype=float)
    coef = npoly.polyfit(x, y, degree)
    return float(npoly.polyval(at, coef))


def sg_filter(values: Sequence[float], params: SGParams) -> np.ndarray:
    """Smooth a sequence, preserving its length.

    Interior points use the central-weight convolution.  A point within
    half a window of a boundary is fitted over the available, truncated
    window around it (same degree, capped at the window size minus one)
    and the fit is evaluated in place, so nothing is extrapolated from
    outside the data.  A sequence shorter than the window gets a single
    global fit with the degree capped at ``len(values) - 1``.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DataError("sg_filter needs a non-empty 1-D sequence")
    n = v.size
    w = params.w_length
    half = w // 2
    if n < w:
        degree = min(params.poly, n - 1)
        coef = npoly.polyfit(np.arange(n, dtype=float), v, degree)
        return np.asarray(npoly.polyval(np.arange(n, dtype=float), coef), dtype=float)

    out = np.empty(n)
    weights = sg_coefficients(w, params.poly)
    out[half : n - half] = np.correlate(v, weights, mode="valid")
    for i in range(half):
        out[i] = _fit_eval(v[: i + half + 1], params.poly, float(i))
        j = n - 1 - i
        out[j] = _fit_eval(v[j - half :], params.poly, float(half))
    return out


def count_hills(values: Sequence[float]) -> int:
    """Number of maximal plateaus that are strict local maxima.

    A run of equal values counts as a hill when every existing neighbor
    run is strictly lower; runs touching a boundary qualify with their
    single neighbor, so a constant sequence has exactly one hill.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DataError("count_hills needs a non-empty sequence")
    starts = np.r_[0, np.flatnonzero(np.diff(v) != 0) + 1]
    runs = v[starts]
    m = runs.size
    hills = 0
    for i in range(m):
        left_ok = i == 0 or runs[i - 1] < runs[i]
        right_ok = i == m - 1 or runs[i + 1] < runs[i]
        if left_ok and right_ok:
            hills += 1
    return hills


def _passes(counts: np.ndarray, params: SGParams) -> Iterator[tuple[np.ndarray, int]]:
    """Yield up to ``max_iter`` successive clamped smoothing passes."""
    v = np.asarray(counts, dtype=float)
    for _ in range(params.max_iter):
        smoothed = sg_filter(v, params)
        clamped = int(np.count_nonzero(smoothed < 0))
        v = np.maximum(smoothed, 0.0)
        yield v, clamped


def smoothing_series(hist: Histogram, params: SGParams) -> list[SmoothedHistogram]:
    """All smoothing passes of the cluster-count loop, for inspection
    and plot export; stops once a pass is unimodal."""
    series: list[SmoothedHistogram] = []
    for values, clamped in _passes(hist.counts, params):
        series.append(SmoothedHistogram(edges=hist.edges, values=values, clamped_negatives=clamped))
        if count_hills(values) <= 1:
            break
    return series


def _decide(trace: SmoothingTrace, policy: str, n_buckets: int) -> int:
    if trace.first_2 is None and trace.first_3 is None:
        return 1
    if policy == "persistence":
        if trace.first_3 is None:
            return 2
        end_3 = trace.first_2 if trace.first_2 is not None else trace.iterations_run
        span_3 = end_3 - trace.first_3
        if trace.first_2 is None:
            span_2 = 0
        else:
            end_2 = trace.first_1 if trace.first_1 is not None else trace.iterations_run
            span_2 = end_2 - trace.first_2
        return 3 if span_3 >= span_2 else 2
    if policy == "literal":
        big = 2**62  # sentinel for a pass index never reached
        p2 = trace.first_2 if trace.first_2 is not None else big
        p3 = trace.first_3 if trace.first_3 is not None else big
        ratio = float("inf") if p3 == 0 else p2 / p3
        return 2 if ratio < n_buckets else 3
    raise ConfigError(f"unknown decision policy {policy!r}")


def decide_cluster_count(
    hist: Histogram,
    params: SGParams,
    policy: str = "persistence",
) -> tuple[int, SmoothingTrace]:
    """Smooth a histogram repeatedly and decide on 1, 2 or 3 clusters.

    Each pass re-smooths the previous (clamped) result and records the
    first pass index showing exactly 1, 2 or 3 hills.  The loop stops
    when a pass is unimodal or ``max_iter`` is exhausted.  The default
    "persistence" policy answers 1 when no multi-hill regime was ever
    seen, and otherwise picks 3 over 2 when the 3-hill regime survived
    at least as many passes as the 2-hill regime.  The "literal" policy
    compares first_2/first_3 against the bucket count instead.
    """
    if policy not in DECISION_POLICIES:
        raise ConfigError(f"unknown decision policy {policy!r}")
    first: dict[int, int | None] = {1: None, 2: None, 3: None}
    iteration = 0
    hills = count_hills(hist.counts)
    for values, _ in _passes(hist.counts, params):
        hills = count_hills(values)
        if hills in first and first[hills] is None:
            first[hills] = iteration
        iteration += 1
        if hills <= 1:
            break
    trace = SmoothingTrace(
        first_1=first[1],
        first_2=first[2],
        first_3=first[3],
        iterations_run=iteration,
        final_hills=hills,
    )
    return _decide(trace, policy, hist.n_buckets), trace
