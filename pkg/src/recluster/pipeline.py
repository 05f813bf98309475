"""End-to-end run: ingest -> cluster (flat or recursive) -> diagnostics
-> machine-readable report plus plot-ready CSV files.

report.json is written with keys in a fixed order and every real number
rendered with 17 significant digits, so re-running an echoed config
reproduces the file byte for byte apart from the timestamp.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .backends import BACKENDS, KMeansParams, SOMParams, best_fit, centroids_to_borders
from .errors import ConfigError, DataError, NumericError, ReclusterError
from .ingest import BinSpec, Histogram, Sample, build_histogram, load_series
from .recursion import (
    ClusterTree,
    Partition,
    RecursionParams,
    assign_labels,
    recursive_clustering,
    render_brackets,
    tree_to_borders,
)
from .smoothing import DECISION_POLICIES, SGParams, SmoothedHistogram, smoothing_series
from .validity import SimilarityReport, elbow_curve, silhouette, similarity_report

__all__ = ["RunConfig", "RunReport", "run_pipeline", "emit_report", "compare_runs"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; echoed verbatim into the report so a run
    can be reproduced from its own output."""

    input_path: str
    mode: str = "recursive"  # "recursive" | "flat"
    k: int | None = None  # flat-mode cluster count
    backend: str = "kmeans"
    bins: BinSpec = field(default_factory=BinSpec.freedman_diaconis)
    sg: SGParams = field(default_factory=SGParams)
    kmeans: KMeansParams = field(default_factory=KMeansParams)
    som: SOMParams = field(default_factory=SOMParams)
    na_sentinels: tuple[float, ...] = ()
    drop_nonfinite: bool = True
    n_runs: int = 10
    min_n_elem: int = 20
    max_depth: int = 6
    seed: int = 0
    out_dir: str | None = None
    emit_plot_data: bool = False
    compare_with: str | None = None
    elbow: tuple[int, int] | None = None
    silhouette: bool = False
    decision_policy: str = "persistence"

    def __post_init__(self) -> None:
        if self.mode not in ("recursive", "flat"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "flat" and (self.k is None or self.k < 1):
            raise ConfigError("flat mode needs --k >= 1")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if self.min_n_elem < 1:
            raise ConfigError("min_n_elem must be >= 1")
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if self.decision_policy not in DECISION_POLICIES:
            raise ConfigError(f"unknown decision policy {self.decision_policy!r}")
        if self.elbow is not None:
            lo, hi = self.elbow
            if not 1 <= lo <= hi:
                raise ConfigError("elbow range needs 1 <= KMIN <= KMAX")

    def as_dict(self) -> dict:
        return {
            "input_path": self.input_path,
            "mode": self.mode,
            "k": self.k,
            "backend": self.backend,
            "bins": self.bins.describe(),
            "sg": {
                "w_length": self.sg.w_length,
                "poly": self.sg.poly,
                "max_iter": self.sg.max_iter,
            },
            "kmeans": {
                "max_iter": self.kmeans.max_iter,
                "rel_tol": self.kmeans.rel_tol,
            },
            "som": {
                "lr0": self.som.lr0,
                "lr_decay": self.som.lr_decay,
                "potential_decay": self.som.potential_decay,
                "epochs": self.som.epochs,
            },
            "na_sentinels": list(self.na_sentinels),
            "drop_nonfinite": self.drop_nonfinite,
            "n_runs": self.n_runs,
            "min_n_elem": self.min_n_elem,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "emit_plot_data": self.emit_plot_data,
            "compare_with": self.compare_with,
            "elbow": list(self.elbow) if self.elbow else None,
            "silhouette": self.silhouette,
            "decision_policy": self.decision_policy,
        }


@dataclass(eq=False)
class RunReport:
    """Self-contained run result; see ``emit_report`` for the files."""

    config: RunConfig
    timestamp: str
    sample: Sample
    histogram: Histogram
    tree: ClusterTree | None
    bracket: str
    borders: tuple[float, ...]
    partition: Partition
    run_inertias: tuple[float, ...]  # flat mode: the k restarts at the root
    smoothing: list[SmoothedHistogram]
    elbow: list[tuple[int, float]] | None
    silhouette_mean: float | None
    similarity: SimilarityReport | None
    warnings: list[str]

    @property
    def method_label(self) -> str:
        suffix = "_r" if self.config.mode == "recursive" else ""
        return f"{self.config.backend}{suffix}{self.bracket}"

    def as_dict(self) -> dict:
        hist = self.histogram
        return {
            "schema_version": SCHEMA_VERSION,
            "timestamp": self.timestamp,
            "config": self.config.as_dict(),
            "sample": {
                "source_id": self.sample.source_id,
                "n": self.sample.n,
                "n_dropped": self.sample.n_dropped,
            },
            "histogram": {
                "rule": self.config.bins.describe(),
                "n_buckets": hist.n_buckets,
                "edges": [float(e) for e in hist.edges],
                "counts": [int(c) for c in hist.counts],
            },
            "method": self.method_label,
            "bracket": self.bracket,
            "tree": _tree_dict(self.tree) if self.tree is not None else None,
            "borders": [float(b) for b in self.borders],
            "n_clusters": self.partition.n_clusters,
            "labels_file": "labels.csv",
            "run_inertias": [float(v) for v in self.run_inertias],
            "diagnostics": {
                "elbow": [[int(k), float(v)] for k, v in self.elbow] if self.elbow else None,
                "silhouette_mean": self.silhouette_mean,
            },
            "similarity": self.similarity.as_dict() if self.similarity else None,
            "warnings": list(self.warnings),
        }


def _tree_dict(node: ClusterTree) -> dict:
    out: dict[str, Any] = {
        "kind": "leaf" if node.is_leaf else "split",
        "depth": node.depth,
        "n_points": node.n_points,
        "decision_trace": node.decision_trace.as_dict(),
    }
    if not node.is_leaf:
        out["borders"] = [float(b) for b in node.border_values]
        out["run_inertias"] = [float(v) for v in node.run_inertias]
        out["children"] = [_tree_dict(child) for child in node.children]
    if node.notes:
        out["notes"] = list(node.notes)
    return out


@contextlib.contextmanager
def _stage(name: str) -> Iterator[None]:
    """Prefix errors with the pipeline stage that raised them."""
    try:
        yield
    except ReclusterError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def _collect_tree_warnings(tree: ClusterTree) -> list[str]:
    collected = []
    for node in tree.walk():
        for note in node.notes:
            collected.append(f"node depth={node.depth} n={node.n_points}: {note}")
    return collected


def run_pipeline(config: RunConfig) -> RunReport:
    """Execute a full run and return its report (no files written)."""
    notices: list[str] = []

    with _stage("ingest"):
        sample = load_series(config.input_path, config.na_sentinels, config.drop_nonfinite)
        histogram = build_histogram(sample, config.bins)

    with _stage("clustering"), warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tree: ClusterTree | None = None
        if config.mode == "recursive":
            params = RecursionParams(
                sg=config.sg,
                backend=config.backend,
                n_iter=config.n_runs,
                min_n_elem=config.min_n_elem,
                max_depth=config.max_depth,
                decision_policy=config.decision_policy,
                kmeans=config.kmeans,
                som=config.som,
            )
            tree = recursive_clustering(sample, histogram, params, master_seed=config.seed)
            borders = tree_to_borders(tree)
            bracket = render_brackets(tree)
            run_inertias = tuple(tree.run_inertias)
            notices.extend(_collect_tree_warnings(tree))
        else:
            winner, inertias = best_fit(
                sample,
                config.k,
                config.n_runs,
                config.backend,
                config.seed,
                kmeans_params=config.kmeans,
                som_params=config.som,
            )
            borders = centroids_to_borders(winner.centroids)
            bracket = f"[{config.k}]"
            run_inertias = tuple(inertias)
        partition = assign_labels(sample, borders)
        notices.extend(f"clustering: {w.message}" for w in caught)

    with _stage("smoothing"):
        series = smoothing_series(histogram, config.sg)
        clamped_total = sum(s.clamped_negatives for s in series)
        if clamped_total:
            notices.append(
                f"{clamped_total} negative smoothed values clamped to 0 over "
                f"{len(series)} passes at the top level"
            )

    elbow = None
    sil_mean: float | None = None
    with _stage("diagnostics"):
        if config.elbow is not None:
            elbow = elbow_curve(
                sample,
                config.elbow[0],
                config.elbow[1],
                n_iter=config.n_runs,
                backend=config.backend,
                master_seed=config.seed,
                kmeans_params=config.kmeans,
                som_params=config.som,
            )
        if config.silhouette:
            sil_mean, _ = silhouette(sample, partition)

    similarity = None
    with _stage("compare"):
        if config.compare_with is not None:
            other_values, other_labels = _read_labels_csv(config.compare_with)
            _check_aligned(sample.values, other_values, config.compare_with)
            other = Partition(labels=other_labels, n_clusters=int(other_labels.max()) + 1)
            similarity = similarity_report(partition, other)

    return RunReport(
        config=config,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        sample=sample,
        histogram=histogram,
        tree=tree,
        bracket=bracket,
        borders=tuple(float(b) for b in borders),
        partition=partition,
        run_inertias=run_inertias,
        smoothing=series,
        elbow=elbow,
        silhouette_mean=sil_mean,
        similarity=similarity,
        warnings=notices,
    )


# --- serialization ---------------------------------------------------------


def _fmt_real(x: float) -> str:
    if not math.isfinite(x):
        raise NumericError("cannot serialize a non-finite real")
    return format(float(x), ".17g")


def _to_json(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_real(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f'{pad}  {json.dumps(str(key), ensure_ascii=False)}: {_to_json(value, indent + 1)}'
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{pad}  {_to_json(value, indent + 1)}" for value in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise NumericError(f"cannot serialize {type(obj).__name__}")


def emit_report(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write report.json and labels.csv; with ``emit_plot_data`` also
    hist.csv (counts plus every smoothing pass) and borders.csv."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = [out / "report.json"]
        (out / "report.json").write_text(_to_json(report.as_dict()) + "\n", encoding="utf-8")

        with (out / "labels.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["value", "label"])
            for value, label in zip(report.sample.values, report.partition.labels):
                writer.writerow([_fmt_real(value), int(label)])
        written.append(out / "labels.csv")

        if report.config.emit_plot_data:
            hist = report.histogram
            with (out / "hist.csv").open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                header = ["bin_left", "bin_right", "count"]
                header += [f"smoothed_iter{i}" for i in range(len(report.smoothing))]
                writer.writerow(header)
                for b in range(hist.n_buckets):
                    row = [_fmt_real(hist.edges[b]), _fmt_real(hist.edges[b + 1]), int(hist.counts[b])]
                    row += [_fmt_real(s.values[b]) for s in report.smoothing]
                    writer.writerow(row)
            written.append(out / "hist.csv")

            with (out / "borders.csv").open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["method", "border"])
                for border in report.borders:
                    writer.writerow([report.method_label, _fmt_real(border)])
            written.append(out / "borders.csv")
    except OSError as exc:
        raise DataError(f"cannot write to {out}: {exc}") from exc
    return written


# --- comparisons ------------------------------------------------------------


def _read_labels_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    try:
        rows = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    values: list[float] = []
    labels: list[int] = []
    for i, line in enumerate(rows):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) < 2:
            raise DataError(f"{path}: row {i + 1} needs value,label")
        try:
            value = float(cells[0])
            label = int(cells[1])
        except ValueError:
            if i == 0:
                continue  # header
            raise DataError(f"{path}: non-numeric row {i + 1}") from None
        if label < 0:
            raise DataError(f"{path}: negative label at row {i + 1}")
        values.append(value)
        labels.append(label)
    if not values:
        raise DataError(f"{path}: no label rows")
    return np.asarray(values), np.asarray(labels, dtype=np.int64)


def _check_aligned(values_a: np.ndarray, values_b: np.ndarray, source: str | Path) -> None:
    if values_a.size != values_b.size:
        raise DataError(f"row count mismatch against {source}")
    if not np.array_equal(values_a, values_b):
        raise DataError(f"value columns differ against {source}")


def compare_runs(labels_a: str | Path, labels_b: str | Path) -> SimilarityReport:
    """Similarity of two labels.csv files over the same value column."""
    values_a, la = _read_labels_csv(labels_a)
    values_b, lb = _read_labels_csv(labels_b)
    _check_aligned(values_a, values_b, labels_b)
    pa = Partition(labels=la, n_clusters=int(la.max()) + 1)
    pb = Partition(labels=lb, n_clusters=int(lb.max()) + 1)
    return similarity_report(pa, pb)
