"""Precision/recall benchmark over datasets, contamination levels and methods."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .baselines import IForestConfig, LofConfig, flag_top_fraction, iforest_scores, lof_scores
from .datasets import LabeledDataset, generate
from .detector import BsodConfig, bsod_detect
from .errors import EmptyReport, NoTrueOutliers, ParseError

logger = logging.getLogger(__name__)

METHODS = ("BSOD", "IF", "LOF")
DATASETS = ("circle", "moons")
CONTAMINATIONS = (0.01, 0.05, 0.10, 0.15)


def precision_recall(flagged, labels) -> tuple[float, float]:
    """Precision and recall of ``flagged`` indices against 0/1 ``labels``."""
    labels = np.asarray(labels)
    truth = labels == 1
    n_true = int(truth.sum())
    if n_true == 0:
        raise NoTrueOutliers("labels contain no outlier; recall is undefined")
    flagged = np.unique(np.asarray(flagged, dtype=np.int64))
    if flagged.size and (flagged.min() < 0 or flagged.max() >= labels.size):
        raise IndexError("flagged index out of range")
    hits = int(truth[flagged].sum())
    precision = hits / flagged.size if flagged.size else 0.0
    return precision, hits / n_true


@dataclass(frozen=True)
class GridConfig:
    datasets: tuple[str, ...] = DATASETS
    contaminations: tuple[float, ...] = CONTAMINATIONS
    methods: tuple[str, ...] = METHODS
    n_inliers: int = 10_000
    seeds: int = 5
    eps: float = 0.5
    k_neighbors: int = 20
    n_trees: int = 100

    @classmethod
    def from_text(cls, text: str, **overrides) -> GridConfig:
        """Parse flat ``key = value`` lines; lists are comma separated, ``#`` starts a comment."""
        known = {f.name: f for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected 'key = value', got {raw!r}", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in known:
                raise ParseError(f"unknown key {key!r}", line=lineno)
            try:
                values[key] = _parse_value(key, value)
            except ValueError as exc:
                raise ParseError(f"bad value for {key}: {exc}", line=lineno) from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def __post_init__(self):
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; choose from {list(METHODS)}")
        bad = set(self.datasets) - set(DATASETS)
        if bad:
            raise ValueError(f"unknown datasets {sorted(bad)}; choose from {list(DATASETS)}")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")


def _parse_value(key: str, value: str):
    if key in ("datasets", "methods"):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    if key == "contaminations":
        return tuple(float(v) for v in value.split(",") if v.strip())
    if key in ("n_inliers", "seeds", "k_neighbors", "n_trees"):
        return int(value)
    return float(value)


@dataclass(frozen=True)
class MetricsRow:
    dataset: str
    method: str
    contamination: float
    seed: int
    precision: float | None
    recall: float | None
    flagged_count: int | None
    runtime_ms: float
    error: str | None = None


@dataclass(frozen=True)
class Aggregate:
    dataset: str
    method: str
    contamination: float
    n_seeds: int
    precision_mean: float
    precision_sd: float | None
    recall_mean: float
    recall_sd: float | None
    flagged_mean: float


@dataclass
class BenchReport:
    rows: list[MetricsRow] = field(default_factory=list)
    aggregate: list[Aggregate] = field(default_factory=list)

    def cell(self, dataset: str, method: str, contamination: float) -> Aggregate:
        for agg in self.aggregate:
            if (agg.dataset, agg.method) == (dataset, method) and np.isclose(
                agg.contamination, contamination
            ):
                return agg
        raise KeyError((dataset, method, contamination))

    @property
    def failures(self) -> list[MetricsRow]:
        return [r for r in self.rows if r.error is not None]


def flag(method: str, dataset: LabeledDataset, contamination: float, seed: int, grid: GridConfig):
    """Indices ``method`` flags as outliers when told the true contamination."""
    if method == "BSOD":
        result = bsod_detect(dataset.points, BsodConfig(contamination, eps=grid.eps, seed=seed))
        return result.outlier_indices
    if method == "IF":
        scores = iforest_scores(dataset.points, IForestConfig(n_trees=grid.n_trees, seed=seed))
    elif method == "LOF":
        scores = lof_scores(dataset.points, LofConfig(k_neighbors=grid.k_neighbors))
    else:
        raise ValueError(f"unknown method {method!r}")
    return flag_top_fraction(scores, contamination)


def _run_cell(args) -> list[MetricsRow]:
    name, c, seed, grid = args
    dataset = generate(name, grid.n_inliers, c, seed)
    rows = []
    for method in grid.methods:
        start = time.perf_counter()
        try:
            flagged = flag(method, dataset, c, seed, grid)
            precision, recall = precision_recall(flagged, dataset.labels)
            row = MetricsRow(name, method, c, seed, precision, recall, len(flagged),
                             (time.perf_counter() - start) * 1e3)
        except Exception as exc:  # recorded per cell; the grid carries on
            logger.exception("cell %s/%s/c=%g/seed=%d failed", name, method, c, seed)
            row = MetricsRow(name, method, c, seed, None, None, None,
                             (time.perf_counter() - start) * 1e3, error=f"{type(exc).__name__}: {exc}")
        logger.info("%s %s c=%.2f seed=%d P=%s R=%s (%.0f ms)", name, method, c, seed,
                    row.precision, row.recall, row.runtime_ms)
        rows.append(row)
    return rows


def run_grid(grid: GridConfig = GridConfig(), workers: int = 1) -> BenchReport:
    """Evaluate every (dataset, contamination, seed, method) cell.

    A dataset is generated once per (dataset, contamination, seed) and shared
    by all methods. Results do not depend on ``workers``.
    """
    jobs = [(name, c, seed, grid)
            for name in grid.datasets for c in grid.contaminations for seed in range(grid.seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_cell, jobs))
    else:
        chunks = [_run_cell(job) for job in jobs]
    rows = [row for chunk in chunks for row in chunk]
    return BenchReport(rows=rows, aggregate=aggregate(rows, grid))


def aggregate(rows: list[MetricsRow], grid: GridConfig) -> list[Aggregate]:
    out = []
    for name in grid.datasets:
        for method in grid.methods:
            for c in grid.contaminations:
                ok = [r for r in rows if (r.dataset, r.method, r.contamination) == (name, method, c)
                      and r.error is None]
                if not ok:
                    continue
                p = np.array([r.precision for r in ok])
                rc = np.array([r.recall for r in ok])
                many = len(ok) > 1
                out.append(Aggregate(
                    dataset=name, method=method, contamination=c, n_seeds=len(ok),
                    precision_mean=float(p.mean()),
                    precision_sd=float(p.std(ddof=1)) if many else None,
                    recall_mean=float(rc.mean()),
                    recall_sd=float(rc.std(ddof=1)) if many else None,
                    flagged_mean=float(np.mean([r.flagged_count for r in ok])),
                ))
    return out


AGGREGATE_COLUMNS = [f.name for f in fields(Aggregate)]


def _fmt(value, spec=".2f") -> str:
    return "" if value is None else format(value, spec)


def render_report(report: BenchReport, fmt: str = "markdown") -> str:
    """Render the aggregate table as ``csv``, ``markdown`` or ``json``.

    Runtimes appear only in the json form so that csv and markdown are
    reproducible byte for byte.
    """
    if not report.aggregate:
        raise EmptyReport("report has no aggregate rows")
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "markdown":
        return _render_markdown(report)
    if fmt == "json":
        payload = {
            "rows": [asdict(r) for r in report.rows],
            "aggregate": [asdict(a) for a in report.aggregate],
        }
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _render_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_COLUMNS)
    for a in report.aggregate:
        writer.writerow([
            a.dataset, a.method, f"{a.contamination:g}", a.n_seeds,
            _fmt(a.precision_mean), _fmt(a.precision_sd),
            _fmt(a.recall_mean), _fmt(a.recall_sd), _fmt(a.flagged_mean, ".1f"),
        ])
    return buf.getvalue()


def load_report_csv(text: str) -> list[Aggregate]:
    """Parse the csv produced by :func:`render_report` (metrics at 2 decimals)."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != AGGREGATE_COLUMNS:
        raise ParseError(f"unexpected header {reader.fieldnames}", line=1)

    def opt(v):
        return float(v) if v != "" else None

    return [
        Aggregate(
            dataset=row["dataset"], method=row["method"],
            contamination=float(row["contamination"]), n_seeds=int(row["n_seeds"]),
            precision_mean=float(row["precision_mean"]), precision_sd=opt(row["precision_sd"]),
            recall_mean=float(row["recall_mean"]), recall_sd=opt(row["recall_sd"]),
            flagged_mean=float(row["flagged_mean"]),
        )
        for row in reader
    ]


def _render_markdown(report: BenchReport) -> str:
    def cell(mean, sd):
        return _fmt(mean) if sd is None else f"{mean:.2f} ± {sd:.2f}"

    blocks = []
    for name in dict.fromkeys(a.dataset for a in report.aggregate):
        aggs = [a for a in report.aggregate if a.dataset == name]
        cs = sorted({a.contamination for a in aggs})
        methods = [m for m in METHODS if any(a.method == m for a in aggs)]
        lines = [f"### {name}", ""]
        lines.append("| | " + " | ".join(f"c = {c:.0%} P | c = {c:.0%} R" for c in cs) + " |")
        lines.append("|---" * (1 + 2 * len(cs)) + "|")
        for m in methods:
            by_c = {a.contamination: a for a in aggs if a.method == m}
            cells = []
            for c in cs:
                a = by_c.get(c)
                if a is None:
                    cells += ["n/a", "n/a"]
                else:
                    cells += [cell(a.precision_mean, a.precision_sd), cell(a.recall_mean, a.recall_sd)]
            lines.append(f"| {m} | " + " | ".join(cells) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
