"""Command-line interface.

``recluster run`` drives the full pipeline on one input file and writes
report.json plus labels.csv (and plot data on request) to --out.
``recluster compare`` prints the six similarity measures between two
labels files.  Exit codes: 0 success, 2 config error, 3 data error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import ConfigError, DataError, NumericError
from .ingest import BinSpec
from .pipeline import RunConfig, compare_runs, emit_report, run_pipeline
from .smoothing import SGParams
from .backends import KMeansParams, SOMParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _parse_bins(text: str) -> BinSpec:
    if text == "fd":
        return BinSpec.freedman_diaconis()
    if text.startswith("count:"):
        return BinSpec.fixed_count(int(text.split(":", 1)[1]))
    if text.startswith("width:"):
        return BinSpec.fixed_width(float(text.split(":", 1)[1]))
    raise ConfigError(f"--bins must be fd, count:N or width:W (got {text!r})")


def _parse_na(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"--na must be a comma-separated list of numbers (got {text!r})") from None


def _parse_elbow(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"--elbow must be KMIN:KMAX (got {text!r})") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recluster",
        description="Recursive 1-D clustering driven by smoothed-histogram mode counting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="cluster one value-per-line file and write a report")
    run.add_argument("--input", required=True, help="text file, one value per line")
    run.add_argument("--mode", choices=["recursive", "flat"], default="recursive")
    run.add_argument("--k", type=int, default=None, help="cluster count (flat mode)")
    run.add_argument("--backend", choices=["kmeans", "som"], default="kmeans")
    run.add_argument("--bins", default="fd", help="fd | count:N | width:W")
    run.add_argument("--window", type=int, default=7, help="smoothing window length (odd)")
    run.add_argument("--poly", type=int, default=3, help="smoothing fit degree")
    run.add_argument("--sg-max-iter", type=int, default=100, help="cap on smoothing passes")
    run.add_argument("--min-elem", type=int, default=20, help="minimum points to keep splitting")
    run.add_argument("--max-depth", type=int, default=6, help="recursion depth cap")
    run.add_argument("--runs", type=int, default=10, help="backend restarts per split")
    run.add_argument("--epochs", type=int, default=50, help="SOM training epochs")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--plot-data", action="store_true", help="also write hist.csv and borders.csv")
    run.add_argument("--na", default="", help="comma-separated sentinel values to drop")
    run.add_argument("--elbow", default=None, help="KMIN:KMAX inertia sweep to include")
    run.add_argument("--silhouette", action="store_true", help="include the mean silhouette score")
    run.add_argument("--compare", default=None, help="labels.csv to compare this run against")
    run.add_argument("--decision", choices=["persistence", "literal"], default="persistence")

    cmp_cmd = sub.add_parser("compare", help="six similarity measures between two labels files")
    cmp_cmd.add_argument("labels_a")
    cmp_cmd.add_argument("labels_b")
    return parser


def _run_command(args: argparse.Namespace) -> int:
    config = RunConfig(
        input_path=args.input,
        mode=args.mode,
        k=args.k,
        backend=args.backend,
        bins=_parse_bins(args.bins),
        sg=SGParams(w_length=args.window, poly=args.poly, max_iter=args.sg_max_iter),
        kmeans=KMeansParams(),
        som=SOMParams(epochs=args.epochs),
        na_sentinels=_parse_na(args.na),
        n_runs=args.runs,
        min_n_elem=args.min_elem,
        max_depth=args.max_depth,
        seed=args.seed,
        out_dir=args.out,
        emit_plot_data=args.plot_data,
        compare_with=args.compare,
        elbow=_parse_elbow(args.elbow) if args.elbow else None,
        silhouette=args.silhouette,
        decision_policy=args.decision,
    )
    report = run_pipeline(config)
    written = emit_report(report, args.out)
    print(f"method:   {report.method_label}")
    print(f"clusters: {report.partition.n_clusters}")
    if report.borders:
        print("borders:  " + " ".join(format(b, ".6g") for b in report.borders))
    if report.silhouette_mean is not None:
        print(f"silhouette mean: {report.silhouette_mean:.4f}")
    if report.similarity is not None:
        _print_similarity(report.similarity)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _print_similarity(sim) -> None:
    header = "  ".join(f"{c:>6s}" for c in sim.COLUMNS)
    row = "  ".join(f"{v:6.3f}" for v in sim.as_row())
    print(header)
    print(row)


def _compare_command(args: argparse.Namespace) -> int:
    _print_similarity(compare_runs(args.labels_a, args.labels_b))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run_command(args)
        return _compare_command(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
