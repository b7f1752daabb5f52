import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bsod import bench
from bsod.bench import (
    BenchReport,
    GridConfig,
    load_report_csv,
    precision_recall,
    render_report,
    run_grid,
)
from bsod.errors import EmptyReport, NoTrueOutliers, ParseError


def test_precision_recall_examples():
    labels = np.array([0] * 10 + [1] * 10)
    outliers = np.arange(10, 20)
    assert precision_recall(outliers, labels) == (1.0, 1.0)
    assert precision_recall(np.arange(10), labels) == (0.0, 0.0)
    assert precision_recall(np.r_[10:18, 0, 1], labels) == (0.8, 0.8)
    assert precision_recall([], labels) == (0.0, 0.0)


def test_precision_recall_requires_an_outlier():
    with pytest.raises(NoTrueOutliers):
        precision_recall([0], [0, 0, 0])


@given(
    st.lists(st.booleans(), min_size=1, max_size=50).filter(any),
    st.lists(st.integers(0, 49), max_size=50),
)
def test_precision_recall_matches_set_oracle(labels, flagged):
    n = len(labels)
    flagged = {f for f in flagged if f < n}
    truth = {i for i, lab in enumerate(labels) if lab}
    precision, recall = precision_recall(sorted(flagged), np.array(labels, dtype=int))
    hits = len(flagged & truth)
    assert precision == (hits / len(flagged) if flagged else 0.0)
    assert recall == hits / len(truth)


SMALL = GridConfig(
    datasets=("circle", "moons"), contaminations=(0.05, 0.15),
    n_inliers=300, seeds=2,
)


@pytest.fixture(scope="module")
def small_report():
    return run_grid(SMALL)


def test_grid_shape(small_report):
    assert len(small_report.rows) == 2 * 2 * 2 * 3
    assert len(small_report.aggregate) == 2 * 2 * 3
    for row in small_report.rows:
        assert row.error is None
        assert 0 <= row.precision <= 1 and 0 <= row.recall <= 1
        assert row.runtime_ms >= 0
    agg = small_report.cell("circle", "LOF", 0.15)
    assert agg.n_seeds == 2
    assert agg.precision_sd is not None


def test_grid_is_deterministic(small_report):
    again = run_grid(SMALL)
    assert render_report(again, "csv") == render_report(small_report, "csv")
    assert render_report(again, "markdown") == render_report(small_report, "markdown")


def test_grid_workers_do_not_change_results(small_report):
    grid = GridConfig(datasets=("circle",), contaminations=(0.05,), n_inliers=200, seeds=2)
    serial, parallel = run_grid(grid), run_grid(grid, workers=2)
    assert render_report(serial, "csv") == render_report(parallel, "csv")


def test_failed_cells_are_recorded(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(bench, "lof_scores", boom)
    report = run_grid(GridConfig(datasets=("circle",), contaminations=(0.1,), n_inliers=100, seeds=1))
    failed = [r for r in report.rows if r.error]
    assert [r.method for r in failed] == ["LOF"]
    assert "synthetic failure" in failed[0].error
    assert {a.method for a in report.aggregate} == {"BSOD", "IF"}


def test_markdown_mirrors_table_layout(small_report):
    md = render_report(small_report, "markdown")
    lines = [line for line in md.splitlines() if line.startswith("| BSOD")]
    assert len(lines) == 2  # one per dataset
    cells = lines[0].strip("|").split("|")
    assert len(cells) == 1 + 2 * 2  # method + (P, R) per contamination
    full = BenchReport(aggregate=[
        bench.Aggregate("circle", m, c, 1, 0.5, None, 0.5, None, 1.0)
        for m in bench.METHODS for c in bench.CONTAMINATIONS
    ])
    rows = [line for line in render_report(full, "markdown").splitlines() if line.startswith("| ")]
    method_rows = rows[1:]
    assert [r.split("|")[1].strip() for r in method_rows] == ["BSOD", "IF", "LOF"]
    assert all(len(r.strip("|").split("|")) == 9 for r in method_rows)


def test_csv_round_trip(small_report):
    text = render_report(small_report, "csv")
    back = load_report_csv(text)
    assert len(back) == len(small_report.aggregate)
    for a, b in zip(small_report.aggregate, back):
        assert (a.dataset, a.method, a.contamination, a.n_seeds) == (
            b.dataset, b.method, b.contamination, b.n_seeds)
        assert b.precision_mean == pytest.approx(a.precision_mean, abs=0.0051)
    assert render_report(BenchReport(aggregate=back), "csv") == text


def test_single_seed_has_empty_sd():
    report = run_grid(GridConfig(datasets=("moons",), contaminations=(0.1,), n_inliers=150, seeds=1))
    text = render_report(report, "csv")
    first = text.splitlines()[1].split(",")
    assert first[5] == "" and first[7] == ""


def test_json_contains_rows_and_aggregate(small_report):
    payload = json.loads(render_report(small_report, "json"))
    assert len(payload["rows"]) == len(small_report.rows)
    assert {"precision", "recall", "runtime_ms", "seed"} <= set(payload["rows"][0])
    assert len(payload["aggregate"]) == len(small_report.aggregate)


def test_empty_report():
    with pytest.raises(EmptyReport):
        render_report(BenchReport(), "markdown")


def test_grid_config_from_text():
    grid = GridConfig.from_text(
        "# small run\ndatasets = circle\ncontaminations = 0.05, 0.1\n"
        "methods = BSOD, LOF\nn_inliers = 500\nseeds = 3\n",
        seeds=None,
    )
    assert grid.datasets == ("circle",)
    assert grid.contaminations == (0.05, 0.1)
    assert grid.methods == ("BSOD", "LOF")
    assert (grid.n_inliers, grid.seeds) == (500, 3)
    assert GridConfig.from_text("seeds = 3", seeds=1).seeds == 1


@pytest.mark.parametrize("text", ["bogus = 1", "seeds 3", "n_inliers = many"])
def test_grid_config_errors(text):
    with pytest.raises(ParseError):
        GridConfig.from_text(text)


def test_grid_config_rejects_unknown_method():
    with pytest.raises(ValueError):
        GridConfig(methods=("BSOD", "SVM"))
