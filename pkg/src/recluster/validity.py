"""Partition similarity measures and cluster-count diagnostics.

The six pairwise measures are the classical pair-counting family: with
n11/n10/n01/n00 the counts of point pairs grouped together in both, one,
or neither partition,

    R  = (n11 + n00) / total            (Rand)
    R' = adjusted Rand                  (expected-index correction)
    FM = n11 / sqrt((n11+n10)(n11+n01)) (Fowlkes-Mallows)
    J  = n11 / (n11+n10+n01)            (Jaccard)
    AB = 1 - R                          (Arabie-Boorman distance)
    H  = 2R - 1                         (Hubert)

The elbow curve and silhouette scores support choosing a flat cluster
count by eye.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .backends import KMeansParams, SOMParams, best_fit
from .errors import DataError
from .ingest import Sample
from .recursion import Partition

__all__ = [
    "PairCounts",
    "SimilarityReport",
    "pair_counts",
    "similarity_report",
    "elbow_curve",
    "silhouette",
]


@dataclass(frozen=True)
class PairCounts:
    """Agreement counts over all point pairs of two partitions."""

    n11: int
    n10: int
    n01: int
    n00: int

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00


@dataclass(frozen=True)
class SimilarityReport:
    """The six pairwise measures, reported in the column order
    R, R', FM, J, AB, H."""

    rand: float
    adjusted_rand: float
    fowlkes_mallows: float
    jaccard: float
    arabie_boorman: float
    hubert: float

    COLUMNS = ("R", "R'", "FM", "J", "AB", "H")

    def as_row(self) -> tuple[float, float, float, float, float, float]:
        return (
            self.rand,
            self.adjusted_rand,
            self.fowlkes_mallows,
            self.jaccard,
            self.arabie_boorman,
            self.hubert,
        )

    def as_dict(self) -> dict:
        return dict(zip(self.COLUMNS, self.as_row()))


def _comb2(m: np.ndarray) -> np.ndarray:
    m = m.astype(np.int64)
    return m * (m - 1) // 2


def pair_counts(p1: Partition, p2: Partition) -> PairCounts:
    """Pair-agreement counts via the label contingency table.

    Runs in O(n + K1*K2) and matches brute-force enumeration over all
    n*(n-1)/2 pairs.
    """
    a = np.asarray(p1.labels)
    b = np.asarray(p2.labels)
    if a.size != b.size:
        raise DataError("partitions label different numbers of points")
    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((int(ai.max()) + 1 if n else 1, int(bi.max()) + 1 if n else 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    pairs_total = n * (n - 1) // 2
    same_both = int(_comb2(table).sum())
    same_1 = int(_comb2(table.sum(axis=1)).sum())
    same_2 = int(_comb2(table.sum(axis=0)).sum())
    return PairCounts(
        n11=same_both,
        n10=same_1 - same_both,
        n01=same_2 - same_both,
        n00=pairs_total - same_1 - same_2 + same_both,
    )


def similarity_report(p1: Partition, p2: Partition) -> SimilarityReport:
    """All six measures for a pair of partitions over the same points.

    A degenerate Fowlkes-Mallows or Jaccard denominator (a partition of
    all singletons) yields 0 with a warning.  The adjusted Rand index is
    1 when its correction denominator vanishes, which happens only for
    identical trivial partitions.
    """
    pc = pair_counts(p1, p2)
    n = p1.labels.size
    if n < 2:
        raise DataError("similarity needs at least two points")
    total = pc.total
    rand = (pc.n11 + pc.n00) / total

    fm_den = (pc.n11 + pc.n10) * (pc.n11 + pc.n01)
    if fm_den > 0:
        fm = pc.n11 / np.sqrt(float(fm_den))
    else:
        warnings.warn("Fowlkes-Mallows undefined for all-singleton partitions; reporting 0", RuntimeWarning)
        fm = 0.0

    j_den = pc.n11 + pc.n10 + pc.n01
    if j_den > 0:
        jac = pc.n11 / j_den
    else:
        warnings.warn("Jaccard undefined for all-singleton partitions; reporting 0", RuntimeWarning)
        jac = 0.0

    same_1 = pc.n11 + pc.n10
    same_2 = pc.n11 + pc.n01
    expected = same_1 * same_2 / total
    ari_den = 0.5 * (same_1 + same_2) - expected
    ari = 1.0 if ari_den == 0 else (pc.n11 - expected) / ari_den

    return SimilarityReport(
        rand=float(rand),
        adjusted_rand=float(ari),
        fowlkes_mallows=float(fm),
        jaccard=float(jac),
        arabie_boorman=1.0 - float(rand),
        hubert=2.0 * float(rand) - 1.0,
    )


def elbow_curve(
    sample: Sample,
    k_min: int,
    k_max: int,
    *,
    n_iter: int = 10,
    backend: str = "kmeans",
    master_seed: int = 0,
    kmeans_params: KMeansParams | None = None,
    som_params: SOMParams | None = None,
) -> list[tuple[int, float]]:
    """Best-of-``n_iter`` inertia for each k in [k_min, k_max]."""
    if not 1 <= k_min <= k_max:
        raise DataError("need 1 <= k_min <= k_max")
    if k_max > sample.n:
        raise DataError("k exceeds sample size")
    curve: list[tuple[int, float]] = []
    for k in range(k_min, k_max + 1):
        winner, _ = best_fit(
            sample,
            k,
            n_iter,
            backend,
            master_seed,
            kmeans_params=kmeans_params,
            som_params=som_params,
            spawn_prefix=(k,),
        )
        curve.append((k, winner.inertia))
    return curve


def _cluster_distance_sums(values: np.ndarray, member_values: np.ndarray) -> np.ndarray:
    """Sum of |x - y| over y in the (sorted) member set, for every x."""
    prefix = np.concatenate([[0.0], np.cumsum(member_values)])
    m = np.searchsorted(member_values, values, side="right")
    below = values * m - prefix[m]
    above = (prefix[-1] - prefix[m]) - values * (member_values.size - m)
    return below + above


def silhouette(sample: Sample, partition: Partition) -> tuple[float, np.ndarray]:
    """Mean and per-point silhouette scores s = (b - a) / max(a, b).

    ``a`` is the mean distance to the point's own cluster, ``b`` the
    smallest mean distance to another cluster.  Points in singleton
    clusters score 0 by convention, as do points with a = b = 0.
    """
    values = sample.values
    labels = np.asarray(partition.labels)
    if labels.size != values.size:
        raise DataError("partition labels points that are not in the sample")
    present = np.unique(labels)
    if present.size < 2:
        raise DataError("silhouette undefined for one cluster")

    sums = np.empty((present.size, values.size))
    sizes = np.empty(present.size, dtype=np.int64)
    for row, label in enumerate(present):
        members = np.sort(values[labels == label])
        sizes[row] = members.size
        sums[row] = _cluster_distance_sums(values, members)

    row_of = {int(label): row for row, label in enumerate(present)}
    own = np.array([row_of[int(label)] for label in labels])
    scores = np.zeros(values.size)
    mean_to = sums / sizes[:, None]
    for i in range(values.size):
        r = own[i]
        if sizes[r] < 2:
            continue  # singleton cluster: score stays 0
        a = sums[r, i] / (sizes[r] - 1)
        b = min(mean_to[s, i] for s in range(present.size) if s != r)
        denom = max(a, b)
        if denom > 0:
            scores[i] = (b - a) / denom
    return float(scores.mean()), scores
