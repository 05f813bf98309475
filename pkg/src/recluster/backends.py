"""1-D centroid backends: k-means with k-means++ restarts and a
conscience-biased self-organizing map, plus centroid-to-border
conversion.

All randomness flows through numpy SeedSequence spawn keys, so every
restart owns an independent, reproducible stream regardless of execution
order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError
from .ingest import Sample

__all__ = [
    "KMeansParams",
    "SOMParams",
    "FitResult",
    "rng_stream",
    "kmeanspp_init",
    "kmeans_1d",
    "som_1d",
    "sum_of_squares",
    "best_fit",
    "best_clustering",
    "centroids_to_borders",
]

BACKENDS = ("kmeans", "som")


@dataclass(frozen=True)
class KMeansParams:
    k: int = 1
    max_iter: int = 300
    rel_tol: float = 1e-4
    n_runs: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")


@dataclass(frozen=True)
class SOMParams:
    k: int = 1
    lr0: float = 0.5
    lr_decay: float = 0.93
    potential_decay: float = 0.99
    epochs: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 0 < self.lr0 <= 1:
            raise ConfigError("lr0 must be in (0, 1]")
        if not 0 < self.lr_decay < 1:
            raise ConfigError("lr_decay must be in (0, 1)")
        if not 0 < self.potential_decay <= 1:
            raise ConfigError("potential_decay must be in (0, 1]")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")


@dataclass(frozen=True, eq=False)
class FitResult:
    """Sorted centroids with the inertia they achieve on the fitted data."""

    centroids: np.ndarray
    inertia: float
    run_index: int = 0
    converged: bool = True


def rng_stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a derivation key, stable across runs
    and across however many sibling streams exist."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def _inertia(values: np.ndarray, centroids: np.ndarray) -> float:
    d2 = (values[:, None] - np.asarray(centroids)[None, :]) ** 2
    return float(d2.min(axis=1).sum())


def sum_of_squares(centroids: Sequence[float], sample: Sample) -> float:
    """Total squared distance from each point to its nearest centroid."""
    c = np.asarray(centroids, dtype=float)
    if c.size < 1:
        raise DataError("need at least one centroid")
    return _inertia(sample.values, c)


def _kmeanspp(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = values.size
    if k > n:
        raise DataError("k exceeds sample size")
    distinct = np.unique(values)
    if distinct.size < k:
        warnings.warn(
            f"only {distinct.size} distinct values for k={k}; padding initial centers",
            RuntimeWarning,
        )
        return np.sort(np.resize(distinct, k))
    centers = np.empty(k)
    centers[0] = values[rng.integers(n)]
    d2 = (values - centers[0]) ** 2
    for j in range(1, k):
        centers[j] = values[rng.choice(n, p=d2 / d2.sum())]
        d2 = np.minimum(d2, (values - centers[j]) ** 2)
    return centers


def kmeanspp_init(sample: Sample, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first center uniform over the points, each
    next one drawn with probability proportional to the squared distance
    to the nearest already-chosen center."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    return _kmeanspp(sample.values, k, rng)


def _nearest_labels(values: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ties go to the larger centroid, matching the right-closed border rule
    borders = (centroids[:-1] + centroids[1:]) / 2.0
    return np.searchsorted(borders, values, side="right")


def _lloyd(
    values: np.ndarray,
    centers: np.ndarray,
    max_iter: int,
    rel_tol: float,
) -> tuple[np.ndarray, list[float], bool]:
    """Lloyd iterations; returns sorted centroids, the inertia history
    (starting from the initial centers), and a convergence flag."""
    k = centers.size
    c = np.sort(centers.astype(float))
    history = [_inertia(values, c)]
    converged = False
    for _ in range(max_iter):
        labels = _nearest_labels(values, c)
        counts = np.bincount(labels, minlength=k)
        sums = np.bincount(labels, weights=values, minlength=k)
        new_c = c.copy()
        occupied = counts > 0
        new_c[occupied] = sums[occupied] / counts[occupied]
        for j in np.flatnonzero(~occupied):
            # re-seed an emptied centroid at the point farthest from its own
            valid = np.ones(k, dtype=bool)
            valid[np.flatnonzero(~occupied)] = False
            valid[j] = False
            pool = new_c[valid] if valid.any() else new_c
            d2 = ((values[:, None] - pool[None, :]) ** 2).min(axis=1)
            new_c[j] = values[int(np.argmax(d2))]
            occupied[j] = True
        c = np.sort(new_c)
        history.append(_inertia(values, c))
        previous, current = history[-2], history[-1]
        if previous <= 0 or (previous - current) / previous < rel_tol:
            converged = True
            break
    return c, history, converged


def kmeans_1d(
    sample: Sample,
    params: KMeansParams,
    rng: np.random.Generator | None = None,
) -> FitResult:
    """One k-means run: k-means++ init, then Lloyd iterations until the
    relative inertia improvement falls below ``rel_tol`` or ``max_iter``
    is reached.  Emptied clusters are repaired by farthest-point
    re-seeding, so k is preserved."""
    if rng is None:
        rng = rng_stream(params.seed, 0)
    centers = _kmeanspp(sample.values, params.k, rng)
    centroids, history, converged = _lloyd(sample.values, centers, params.max_iter, params.rel_tol)
    return FitResult(centroids=centroids, inertia=history[-1], run_index=0, converged=converged)


def _som_fit(
    values: np.ndarray,
    params: SOMParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[int]]:
    """Sequential SOM training; returns sorted unit positions and the
    per-unit win counts of the first epoch (conscience diagnostics)."""
    n = values.size
    k = params.k
    units = np.sort(_kmeanspp(values, k, rng)).tolist()
    data = values.tolist()
    # conscience state: exponential moving win fraction per unit
    share = 1.0 / k
    potential = [share] * k
    decay = params.potential_decay
    gain = 1.0 - decay
    bias_scale = float(values[-1] - values[0]) ** 2
    lr = params.lr0
    first_epoch_wins = [0] * k
    for epoch in range(params.epochs):
        for i in rng.permutation(n).tolist():
            x = data[i]
            winner = 0
            best = (x - units[0]) ** 2 + bias_scale * (potential[0] - share)
            for j in range(1, k):
                score = (x - units[j]) ** 2 + bias_scale * (potential[j] - share)
                if score < best:
                    best = score
                    winner = j
            units[winner] += lr * (x - units[winner])
            for j in range(k):
                potential[j] *= decay
            potential[winner] += gain
            if epoch == 0:
                first_epoch_wins[winner] += 1
        lr *= params.lr_decay
    return np.sort(np.asarray(units)), first_epoch_wins


def som_1d(
    sample: Sample,
    params: SOMParams,
    rng: np.random.Generator | None = None,
) -> FitResult:
    """One SOM run: units start at k-means++ positions; per presented
    point the winner is the unit minimizing squared distance plus a
    conscience bias (range^2 times its excess win fraction), and moves
    toward the point by the current learning rate.  The learning rate
    decays per epoch; inertia is computed post-hoc on the final units."""
    if rng is None:
        rng = rng_stream(params.seed, 0)
    units, _ = _som_fit(sample.values, params, rng)
    return FitResult(
        centroids=units,
        inertia=_inertia(sample.values, units),
        run_index=0,
        converged=True,
    )


def centroids_to_borders(centroids: Sequence[float]) -> np.ndarray:
    """Midpoints of adjacent centroids; k centroids give k-1 borders."""
    c = np.asarray(centroids, dtype=float)
    if c.size < 1:
        raise DataError("need at least one centroid")
    if np.any(np.diff(c) <= 0):
        raise DataError("degenerate centroids: values must be distinct and sorted")
    return (c[:-1] + c[1:]) / 2.0


def best_fit(
    sample: Sample,
    n_clust: int,
    n_iter: int = 10,
    backend: str = "kmeans",
    master_seed: int = 0,
    *,
    kmeans_params: KMeansParams | None = None,
    som_params: SOMParams | None = None,
    spawn_prefix: tuple[int, ...] = (),
) -> tuple[FitResult, list[float]]:
    """Run a backend ``n_iter`` times on independent streams and keep
    the lowest-inertia fit (ties: lowest run index).  Returns the winner
    and every run's inertia."""
    if backend not in BACKENDS:
        raise ConfigError(f"unknown backend {backend!r}")
    if n_iter < 1:
        raise ConfigError("n_iter must be >= 1")
    winner: FitResult | None = None
    inertias: list[float] = []
    for run in range(n_iter):
        rng = rng_stream(master_seed, *spawn_prefix, run)
        if backend == "kmeans":
            params = replace(kmeans_params or KMeansParams(), k=n_clust)
            fit = kmeans_1d(sample, params, rng)
        else:
            params = replace(som_params or SOMParams(), k=n_clust)
            fit = som_1d(sample, params, rng)
        fit = replace(fit, run_index=run)
        inertias.append(fit.inertia)
        if winner is None or fit.inertia < winner.inertia:
            winner = fit
    assert winner is not None
    return winner, inertias


def best_clustering(
    sample: Sample,
    n_clust: int,
    n_iter: int = 10,
    backend: str = "kmeans",
    master_seed: int = 0,
    *,
    kmeans_params: KMeansParams | None = None,
    som_params: SOMParams | None = None,
    spawn_prefix: tuple[int, ...] = (),
) -> np.ndarray:
    """Borders of the best-of-``n_iter`` backend fit."""
    winner, _ = best_fit(
        sample,
        n_clust,
        n_iter,
        backend,
        master_seed,
        kmeans_params=kmeans_params,
        som_params=som_params,
        spawn_prefix=spawn_prefix,
    )
    return centroids_to_borders(winner.centroids)
