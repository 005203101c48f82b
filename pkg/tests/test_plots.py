"""Figure emission from experiment CSVs."""

import numpy as np
import pytest

from xbaropt.errors import MissingColumn
from xbaropt.harness import (
    CSV_SCHEMA,
    ExperimentSpec,
    run_experiment,
)
from xbaropt.plots import (
    emit_plots,
    plot_error_vs_variation,
    plot_iterations_vs_rho,
    plot_pca_scatter,
    plot_recovered_stem,
)


@pytest.fixture(scope="module")
def bench_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    run_experiment(ExperimentSpec(
        kind="lp", sizes=(20,), variation_levels=(0.0, 0.05), rho_values=(1.0,),
        trials=2, output_dir=str(out),
    ))
    return out


def _svg_ok(path):
    assert path.exists()
    assert path.stat().st_size > 500
    assert b"<svg" in path.read_bytes()


def test_emit_plots_from_bench_output(bench_dir, tmp_path):
    written = emit_plots(bench_dir / "summary.csv", tmp_path, trials_csv=bench_dir / "trials.csv")
    assert len(written) >= 2
    for path in written:
        _svg_ok(path)


def test_error_vs_variation_plot(bench_dir, tmp_path):
    from xbaropt.harness import read_csv

    rows = read_csv(bench_dir / "summary.csv")
    out = tmp_path / "err.svg"
    plot_error_vs_variation(rows, out)
    _svg_ok(out)


def test_iterations_vs_rho_plot(bench_dir, tmp_path):
    from xbaropt.harness import read_csv

    rows = read_csv(bench_dir / "trials.csv")
    out = tmp_path / "iters.svg"
    plot_iterations_vs_rho(rows, out)
    _svg_ok(out)


def test_empty_csv_yields_placeholder_plot(tmp_path):
    empty = tmp_path / "summary.csv"
    empty.write_text(CSV_SCHEMA + "\nkind,size,variation,rho,metric,mean_value,trials,converged\n")
    written = emit_plots(empty, tmp_path / "plots")
    assert written
    for path in written:
        _svg_ok(path)


def test_missing_column_raises(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("kind,size\nlp,10\n")
    with pytest.raises(MissingColumn):
        emit_plots(bad, tmp_path / "plots")


def test_recovered_stem_and_pca_scatter(tmp_path):
    truth = np.zeros(16)
    truth[3] = 1.0
    rec = truth + 0.01
    stem = tmp_path / "stem.svg"
    plot_recovered_stem(truth, rec, stem)
    _svg_ok(stem)
    scores = np.random.default_rng(0).standard_normal((9, 2))
    labels = ["setosa", "versicolor", "virginica"] * 3
    scatter = tmp_path / "scatter.svg"
    plot_pca_scatter(scores, labels, scatter)
    _svg_ok(scatter)
