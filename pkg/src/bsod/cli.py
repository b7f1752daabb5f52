"""Command line entry point: ``bsod {generate,detect,bench,plot-data}``.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .baselines import IForestConfig, LofConfig, flag_top_fraction, iforest_scores, lof_scores
from .datasets import GENERATORS, generate, load_csv, save_csv
from .detector import BsodConfig, bsod_detect
from .errors import BsodError, RowCountMismatch


def _contamination(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsod", description="Boosted spectral outlier detection")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic labeled dataset")
    gen.add_argument("--dataset", required=True, choices=sorted(GENERATORS))
    gen.add_argument("--n-inliers", type=_positive_int, default=10_000)
    gen.add_argument("--contamination", type=_contamination, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)

    det = sub.add_parser("detect", help="flag outliers in a CSV dataset")
    det.add_argument("--in", dest="input", type=Path, required=True)
    det.add_argument("--method", choices=["bsod", "lof", "iforest"], default="bsod")
    det.add_argument("--contamination", type=_contamination, required=True)
    det.add_argument("--eps", type=_positive_float, default=0.5)
    det.add_argument("--seed", type=int, default=0)
    det.add_argument("--out", type=Path, required=True)
    det.add_argument("--trace", type=Path, help="write per-round JSON trace (bsod only)")

    bn = sub.add_parser("bench", help="run the precision/recall grid")
    bn.add_argument("--config", type=Path, help="flat key = value grid file")
    bn.add_argument("--out-dir", type=Path, required=True)
    bn.add_argument("--seeds", type=_positive_int, default=None,
                    help="seeds per cell (default 5, or the config's value)")
    bn.add_argument("--workers", type=_positive_int, default=1)

    pd = sub.add_parser("plot-data", help="join a dataset with detection results")
    pd.add_argument("--in", dest="input", type=Path, required=True)
    pd.add_argument("--results", type=Path, required=True)
    pd.add_argument("--out", type=Path, required=True)
    return parser


def cmd_generate(args) -> int:
    dataset = generate(args.dataset, args.n_inliers, args.contamination, args.seed)
    save_csv(dataset, args.out)
    print(f"rows={dataset.n}")
    print(f"contamination={dataset.contamination:.6f}")
    return 0


def cmd_detect(args) -> int:
    dataset = load_csv(args.input)
    c = args.contamination
    if args.method == "bsod":
        result = bsod_detect(dataset.points, BsodConfig(c, eps=args.eps, seed=args.seed))
        scores = result.scores
        flagged = result.outlier_indices
        if args.trace:
            trace = [r.to_dict() for r in result.rounds]
            args.trace.write_text(json.dumps(trace, indent=1) + "\n")
    else:
        if args.method == "lof":
            scores = lof_scores(dataset.points, LofConfig())
        else:
            scores = iforest_scores(dataset.points, IForestConfig(seed=args.seed))
        flagged = flag_top_fraction(scores, c)

    is_flagged = np.zeros(dataset.n, dtype=bool)
    is_flagged[flagged] = True
    with open(args.out, "w", newline="") as fh:
        fh.write("index,score,flagged\n")
        for i in range(dataset.n):
            fh.write(f"{i},{scores[i]:.17g},{int(is_flagged[i])}\n")

    print(f"flagged={len(flagged)}")
    if dataset.labels is not None and dataset.labels.any():
        precision, recall = bench.precision_recall(flagged, dataset.labels)
        print(f"precision={precision:.4f}")
        print(f"recall={recall:.4f}")
    return 0


def cmd_bench(args) -> int:
    text = args.config.read_text() if args.config else ""
    grid = bench.GridConfig.from_text(text, seeds=args.seeds)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    probe = args.out_dir / ".write-test"
    probe.write_text("")
    probe.unlink()

    report = bench.run_grid(grid, workers=args.workers)
    for failure in report.failures:
        print(f"cell failed: {failure.dataset}/{failure.method}/c={failure.contamination:g}/"
              f"seed={failure.seed}: {failure.error}", file=sys.stderr)
    if not report.aggregate:
        print("every cell failed", file=sys.stderr)
        return 1
    (args.out_dir / "report.csv").write_text(bench.render_report(report, "csv"))
    (args.out_dir / "report.json").write_text(bench.render_report(report, "json"))
    markdown = bench.render_report(report, "markdown")
    (args.out_dir / "report.md").write_text(markdown)
    print(markdown, end="")
    return 0


def cmd_plot_data(args) -> int:
    dataset = load_csv(args.input)
    with open(args.results, newline="") as fh:
        results = list(csv.DictReader(fh))
    if len(results) != dataset.n:
        raise RowCountMismatch(
            f"dataset has {dataset.n} rows but results have {len(results)} rows"
        )
    flagged = {int(r["index"]): r["flagged"] for r in results}
    with open(args.out, "w", newline="") as fh:
        fh.write("x0,x1,true_label,flagged\n")
        for i in range(dataset.n):
            x0 = f"{dataset.points[i, 0]:.17g}"
            x1 = f"{dataset.points[i, 1]:.17g}" if dataset.points.shape[1] > 1 else ""
            label = "" if dataset.labels is None else str(int(dataset.labels[i]))
            fh.write(f"{x0},{x1},{label},{flagged[i]}\n")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "detect": cmd_detect,
    "bench": cmd_bench,
    "plot-data": cmd_plot_data,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (BsodError, OSError, KeyError, ValueError) as exc:
        print(f"bsod {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
