"""Recursive 1-D clustering of noisy measurement series.

Histograms are smoothed repeatedly with a Savitzky-Golay filter to
decide how many clusters a value range holds; best-of-N k-means or a
conscience-biased SOM places the borders; the scheme recurses into each
sub-range.  Partitions can be scored and compared with the standard
pair-counting similarity measures, elbow curves and silhouettes.
"""

from .errors import ConfigError, DataError, NumericError, ReclusterError
from .ingest import (
    BinSpec,
    Histogram,
    Sample,
    build_histogram,
    load_series,
    sample_from_values,
    subdatas,
    subhists,
)
from .smoothing import (
    SGParams,
    SmoothedHistogram,
    SmoothingTrace,
    count_hills,
    decide_cluster_count,
    sg_coefficients,
    sg_filter,
    smoothing_series,
)
from .backends import (
    FitResult,
    KMeansParams,
    SOMParams,
    best_clustering,
    best_fit,
    centroids_to_borders,
    kmeans_1d,
    kmeanspp_init,
    rng_stream,
    som_1d,
    sum_of_squares,
)
from .recursion import (
    ClusterTree,
    Partition,
    RecursionParams,
    assign_labels,
    recursive_clustering,
    render_brackets,
    tree_to_borders,
)
from .validity import (
    PairCounts,
    SimilarityReport,
    elbow_curve,
    pair_counts,
    silhouette,
    similarity_report,
)
from .pipeline import RunConfig, RunReport, compare_runs, emit_report, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "BinSpec",
    "ClusterTree",
    "ConfigError",
    "DataError",
    "FitResult",
    "Histogram",
    "KMeansParams",
    "NumericError",
    "PairCounts",
    "Partition",
    "ReclusterError",
    "RecursionParams",
    "RunConfig",
    "RunReport",
    "SGParams",
    "SOMParams",
    "Sample",
    "SimilarityReport",
    "SmoothedHistogram",
    "SmoothingTrace",
    "assign_labels",
    "best_clustering",
    "best_fit",
    "build_histogram",
    "centroids_to_borders",
    "compare_runs",
    "count_hills",
    "decide_cluster_count",
    "elbow_curve",
    "emit_report",
    "kmeans_1d",
    "kmeanspp_init",
    "load_series",
    "pair_counts",
    "recursive_clustering",
    "render_brackets",
    "rng_stream",
    "run_pipeline",
    "sample_from_values",
    "sg_coefficients",
    "sg_filter",
    "silhouette",
    "similarity_report",
    "smoothing_series",
    "som_1d",
    "subdatas",
    "subhists",
    "sum_of_squares",
    "tree_to_borders",
]
