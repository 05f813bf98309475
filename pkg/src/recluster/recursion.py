"""Top-down range splitting.

Smoothing decides how many parts a value range holds (1, 2 or 3), a
centroid backend places the borders, and the procedure recurses into
each part until ranges look unimodal, run out of data, or hit the depth
cap.  The result is a tree whose leaves are the final clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .backends import BACKENDS, KMeansParams, SOMParams, best_fit, centroids_to_borders
from .errors import ConfigError, DataError
from .ingest import Histogram, Sample, subdatas, subhists
from .smoothing import DECISION_POLICIES, SGParams, SmoothingTrace, decide_cluster_count

__all__ = [
    "RecursionParams",
    "ClusterTree",
    "Partition",
    "recursive_clustering",
    "tree_to_borders",
    "assign_labels",
    "render_brackets",
]


@dataclass(frozen=True)
class RecursionParams:
    """Knobs of the recursive division.

    ``min_n_elem`` blocks further splitting of data-poor ranges; by
    default it is compared against the sub-histogram's total point
    count, or against its bucket count with ``min_elem_mode="bins"``.
    """

    sg: SGParams = field(default_factory=SGParams)
    backend: str = "kmeans"
    n_iter: int = 10
    min_n_elem: int = 20
    max_depth: int = 6
    decision_policy: str = "persistence"
    min_elem_mode: str = "points"
    kmeans: KMeansParams | None = None
    som: SOMParams | None = None

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.n_iter < 1:
            raise ConfigError("n_iter must be >= 1")
        if self.min_n_elem < 1:
            raise ConfigError("min_n_elem must be >= 1")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if self.decision_policy not in DECISION_POLICIES:
            raise ConfigError(f"unknown decision policy {self.decision_policy!r}")
        if self.min_elem_mode not in ("points", "bins"):
            raise ConfigError("min_elem_mode must be 'points' or 'bins'")


@dataclass(frozen=True, eq=False)
class ClusterTree:
    """Node of the recursive division.

    A leaf has no children; a split carries its sorted border values and
    2 or 3 children, left to right.  Every node keeps the smoothing
    trace behind its own cluster-count decision; split nodes also keep
    the inertia of every backend restart.
    """

    depth: int
    n_points: int
    decision_trace: SmoothingTrace
    border_values: tuple[float, ...] = ()
    children: tuple["ClusterTree", ...] = ()
    run_inertias: tuple[float, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.children:
            if len(self.children) not in (2, 3):
                raise ValueError("a split must have 2 or 3 children")
            if len(self.border_values) != len(self.children) - 1:
                raise ValueError("need one border less than children")
        elif self.border_values:
            raise ValueError("a leaf carries no borders")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return sum(child.leaf_count for child in self.children)

    def walk(self) -> Iterator["ClusterTree"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True, eq=False)
class Partition:
    """Per-point integer labels induced by a sorted border set."""

    labels: np.ndarray
    n_clusters: int
    borders: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        if self.n_clusters < 1:
            raise ValueError("need at least one cluster")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_clusters):
            raise ValueError("labels out of range")


def recursive_clustering(
    sample: Sample,
    hist: Histogram,
    params: RecursionParams,
    master_seed: int = 0,
) -> ClusterTree:
    """Divide a sample's range top-down into a cluster tree.

    Each node decides its part count from the smoothed histogram; a
    count of 1, too little data, or the depth cap makes it a leaf.
    Otherwise the backend's best-of-N borders split the histogram (bins
    snapped to the nearest edge) and the data (exact border values), and
    the recursion descends into each part.  A split whose snapped
    sub-ranges would be empty is abandoned: the node becomes a leaf with
    a note instead of an error.
    """
    if sample.n < 1:
        raise DataError("cannot cluster an empty sample")
    return _grow(sample, hist, params, master_seed, depth=0, path=())


def _grow(
    sample: Sample,
    hist: Histogram,
    params: RecursionParams,
    master_seed: int,
    depth: int,
    path: tuple[int, ...],
) -> ClusterTree:
    n_clust, trace = decide_cluster_count(hist, params.sg, policy=params.decision_policy)
    size = hist.total if params.min_elem_mode == "points" else hist.n_buckets
    if n_clust == 1 or size < params.min_n_elem or depth >= params.max_depth:
        return ClusterTree(depth=depth, n_points=sample.n, decision_trace=trace)

    winner, inertias = best_fit(
        sample,
        n_clust,
        params.n_iter,
        params.backend,
        master_seed,
        kmeans_params=params.kmeans,
        som_params=params.som,
        spawn_prefix=path,
    )
    borders = centroids_to_borders(winner.centroids)
    try:
        hists = subhists(hist, borders)
    except DataError as exc:
        return ClusterTree(
            depth=depth,
            n_points=sample.n,
            decision_trace=trace,
            notes=(f"split into {n_clust} abandoned: {exc}",),
        )
    datas = subdatas(sample, borders)
    shift = max(
        abs(part.edges[-1] - border) for part, border in zip(hists[:-1], borders)
    )
    notes = (f"sub-histogram borders snapped to bin edges (max shift {shift:.4g})",)
    children = tuple(
        _grow(datas[i], hists[i], params, master_seed, depth + 1, path + (i,))
        for i in range(len(hists))
    )
    return ClusterTree(
        depth=depth,
        n_points=sample.n,
        decision_trace=trace,
        border_values=tuple(float(b) for b in borders),
        children=children,
        run_inertias=tuple(inertias),
        notes=notes,
    )


def tree_to_borders(tree: ClusterTree) -> np.ndarray:
    """All split borders of the tree, globally sorted."""
    collected: list[float] = []
    for node in tree.walk():
        collected.extend(node.border_values)
    return np.sort(np.asarray(collected, dtype=float))


def assign_labels(sample: Sample, borders: Sequence[float]) -> Partition:
    """Label each point with its segment index (left-closed/right-open
    segments; a point equal to a border gets the right segment)."""
    b = np.sort(np.asarray(list(borders), dtype=float))
    labels = np.searchsorted(b, sample.values, side="right")
    return Partition(labels=labels, n_clusters=b.size + 1, borders=tuple(b))


def _inner(node: ClusterTree) -> str:
    if node.is_leaf:
        return "1"
    if all(child.is_leaf for child in node.children):
        return str(len(node.children))
    return "[" + ";".join(_inner(child) for child in node.children) + "]"


def render_brackets(tree: ClusterTree) -> str:
    """Bracket text of the division: a flat k-way split renders as
    "[k]", a two-way split refined into 3 and 2 parts as "[3;2]"."""
    text = _inner(tree)
    return text if text.startswith("[") else f"[{text}]"
