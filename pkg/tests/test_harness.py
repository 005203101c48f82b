"""Generators, seeding, sweep execution, and CSV/JSON round trips."""

import numpy as np
import pytest

from xbaropt import harness, oracles
from xbaropt.cs import CsProblem
from xbaropt.errors import ParseError
from xbaropt.harness import (
    CS_NOISE_STD,
    XI_SLACK,
    ExperimentSpec,
    TrialRecord,
    constraint_count,
    generate_cs,
    generate_lp,
    generate_socp,
    generate_sym_with_multiplicity,
    load_problem,
    read_csv,
    run_experiment,
    run_trial,
    save_problem,
    trial_seed,
    write_summary_csv,
    write_trials_csv,
)
from xbaropt.mathprog import LpProblem, SocpProblem
from xbaropt.numerics import make_rng


def test_trial_seed_deterministic_and_cell_sensitive():
    a = trial_seed(1, "lp", 50, 0.1, 1.0, 0)
    assert a == trial_seed(1, "lp", 50, 0.1, 1.0, 0)
    others = {
        trial_seed(2, "lp", 50, 0.1, 1.0, 0),
        trial_seed(1, "qp", 50, 0.1, 1.0, 0),
        trial_seed(1, "lp", 100, 0.1, 1.0, 0),
        trial_seed(1, "lp", 50, 0.0, 1.0, 0),
        trial_seed(1, "lp", 50, 0.1, 10.0, 0),
        trial_seed(1, "lp", 50, 0.1, 1.0, 1),
    }
    assert a not in others and len(others) == 6


def test_constraint_count():
    assert constraint_count(50) == 3
    assert constraint_count(100) == 5
    assert constraint_count(200) == 10


def test_generate_lp_plants_the_optimum():
    rng = make_rng(0)
    prob = generate_lp(40, constraint_count(40), rng)
    x_star = oracles.lp_reference(prob)
    # The reference optimum is a vertex with exactly l positive entries.
    assert np.count_nonzero(x_star > 1e-8) == prob.l
    assert (x_star >= -1e-9).all()
    assert (prob.Gc[0] > 0).all()


def test_generate_lp_rejects_bad_row_count():
    with pytest.raises(ValueError):
        generate_lp(5, 5, make_rng(0))


def test_generate_socp_is_feasible_and_bounded():
    rng = make_rng(1)
    prob = generate_socp(20, 3, rng)
    x_star = oracles.socp_reference(prob)  # would raise if unbounded
    assert np.linalg.norm(x_star[:-1]) <= x_star[-1] + 1e-6
    # Cost is strictly interior to the dual cone.
    assert prob.d[-1] > np.linalg.norm(prob.d[:-1])


def test_generate_cs_support_and_default_xi():
    rng = make_rng(2)
    prob, truth = generate_cs(64, 32, 5, rng)
    assert len(truth.support) == 5
    assert np.count_nonzero(truth.values) == 5
    assert np.abs(truth.values[truth.support]).min() >= 0.5
    assert prob.xi == pytest.approx(XI_SLACK * CS_NOISE_STD * np.sqrt(32))
    prob2, _ = generate_cs(64, 32, 5, make_rng(3), xi=0.25)
    assert prob2.xi == 0.25


def test_generate_cs_validates_shapes():
    with pytest.raises(ValueError):
        generate_cs(10, 12, 2, make_rng(0))
    with pytest.raises(ValueError):
        generate_cs(10, 5, 11, make_rng(0))


def test_generate_sym_with_multiplicity_spectrum():
    rng = make_rng(4)
    A = generate_sym_with_multiplicity(12, 3, rng, lambda1=2.0)
    vals = np.linalg.eigvalsh(A)[::-1]
    np.testing.assert_allclose(vals[:3], [2.0, 2.0, 2.0], atol=1e-9)
    assert vals[3] <= 1.0 + 1e-9
    with pytest.raises(ValueError):
        generate_sym_with_multiplicity(3, 4, rng)


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(kind="nope")
    with pytest.raises(ValueError):
        ExperimentSpec(kind="lp", trials=0)
    with pytest.raises(ValueError):
        ExperimentSpec(kind="lp", variation_levels=(0.9,))
    with pytest.raises(ValueError):
        ExperimentSpec(kind="lp", sizes=(0,))


def test_run_trial_records_failure_instead_of_raising():
    spec = ExperimentSpec(kind="cs", output_dir="unused")
    # s > p is invalid at desk scale -> generation raises inside the trial.
    records = run_trial(spec, 300, 0.0, 10.0, 0)
    assert len(records) == 1
    assert records[0].metric_name == "failure"
    assert not records[0].converged


def test_run_experiment_writes_csvs(tmp_path):
    spec = ExperimentSpec(
        kind="lp", sizes=(25,), variation_levels=(0.0,), rho_values=(1.0,),
        trials=2, output_dir=str(tmp_path),
    )
    records = run_experiment(spec)
    assert len(records) == 2
    trials = read_csv(tmp_path / "trials.csv")
    summary = read_csv(tmp_path / "summary.csv")
    assert len(trials) == 2
    assert len(summary) == 1
    assert float(summary[0]["mean_value"]) == pytest.approx(
        np.mean([float(r["value"]) for r in trials])
    )
    with open(tmp_path / "trials.csv") as f:
        assert f.readline().startswith("# xbaropt trials schema v1")


def test_run_experiment_deterministic_modulo_wall_time(tmp_path):
    spec = ExperimentSpec(
        kind="lp", sizes=(20,), variation_levels=(0.05,), rho_values=(1.0,),
        trials=2, output_dir=str(tmp_path / "a"),
    )
    run_experiment(spec)
    run_experiment(ExperimentSpec(
        kind="lp", sizes=(20,), variation_levels=(0.05,), rho_values=(1.0,),
        trials=2, output_dir=str(tmp_path / "b"),
    ))

    def strip_wall(path):
        rows = read_csv(path)
        return [{k: v for k, v in row.items() if k != "wall_ms"} for row in rows]

    assert strip_wall(tmp_path / "a" / "trials.csv") == strip_wall(tmp_path / "b" / "trials.csv")


def test_csv_round_trip(tmp_path):
    rec = TrialRecord(
        kind="lp", size=10, variation=0.1, rho=1.0, trial_index=0, seed=42,
        metric_name="rel_error", metric_value=0.0123, iterations=7,
        converged=True, wall_time=0.5,
    )
    write_trials_csv([rec], tmp_path / "t.csv")
    write_summary_csv([rec], tmp_path / "s.csv")
    row = read_csv(tmp_path / "t.csv")[0]
    assert row["kind"] == "lp" and int(row["size"]) == 10
    assert float(row["value"]) == 0.0123
    srow = read_csv(tmp_path / "s.csv")[0]
    assert float(srow["mean_value"]) == 0.0123
    assert int(srow["trials"]) == 1


def test_problem_json_round_trip(tmp_path):
    rng = make_rng(5)
    Gc = np.vstack([0.5 + rng.random(6), rng.standard_normal(6)])
    lp = LpProblem(d=rng.standard_normal(6), Gc=Gc, h=rng.standard_normal(2))
    path = tmp_path / "lp.json"
    save_problem(lp, path)
    loaded = load_problem(path)
    assert isinstance(loaded, LpProblem)
    np.testing.assert_allclose(loaded.Gc, lp.Gc)
    np.testing.assert_allclose(loaded.d, lp.d)

    socp = SocpProblem(d=rng.standard_normal(4), Gc=rng.standard_normal((1, 4)), h=rng.standard_normal(1))
    save_problem(socp, tmp_path / "socp.json")
    assert isinstance(load_problem(tmp_path / "socp.json"), SocpProblem)

    cs = CsProblem(H=rng.standard_normal((3, 6)), h=rng.standard_normal(3), xi=0.2)
    save_problem(cs, tmp_path / "cs.json")
    loaded_cs = load_problem(tmp_path / "cs.json")
    assert loaded_cs.xi == 0.2
    np.testing.assert_allclose(loaded_cs.H, cs.H)

    A = rng.standard_normal((4, 4))
    save_problem(A, tmp_path / "eig.json")
    np.testing.assert_allclose(load_problem(tmp_path / "eig.json"), A)


def test_load_problem_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_problem(bad)
    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"kind": "mystery"}')
    with pytest.raises(ParseError):
        load_problem(unknown)
    with pytest.raises(ParseError):
        load_problem(tmp_path / "missing.json")
