import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formopt.benchmarks import sphere
from formopt.core import RngStream, SearchSpace
from formopt.errors import ConfigError, DataError, SchemaError, TrainingError
from formopt.harness import cli
from formopt.harness.cli import main
from formopt.harness.data_io import (FORMULATION_INPUTS, FORMULATION_OUTPUTS, formulation_dataset,
                                     ingest_dataset, random_teacher_network, synth_dataset)
from formopt.harness.experiment import (ExperimentConfig, TimingCell, detect_convergence, run_comparison,
                                        run_timing, trial_seed)
from formopt.harness.modelcomp import compare_models
from formopt.harness.pipeline import PipelineConfig, _Scalarized, run_pipeline
from formopt.harness.reports import SUMMARY_COLUMNS, emit_reports, emit_timing
from formopt.surrogate import SurrogateSpec, TrainConfig

SMALL = dict(algorithms={"ga": {"population": 10}, "sos": {"population": 10}},
             benchmarks=["holder-table", "sphere"], trials=2, budget=600, seed=3)


@pytest.fixture(scope="module")
def small_run():
    return run_comparison(ExperimentConfig(**SMALL))


# Experiment runner -------------------------------------------------------

def test_trial_seed_is_stable_and_distinct():
    assert trial_seed(0, "ga", "sphere", 1) == trial_seed(0, "ga", "sphere", 1)
    seeds = {trial_seed(0, a, b, t) for a in ("ga", "cs") for b in ("sphere", "happy-cat") for t in range(5)}
    assert len(seeds) == 20


def test_comparison_cardinality(small_run):
    summaries, reports = small_run
    assert len(summaries) == 4 and len(reports) == 8
    assert [(s.algorithm, s.benchmark) for s in summaries] == [
        ("ga", "holder-table"), ("ga", "sphere"), ("sos", "holder-table"), ("sos", "sphere")]
    assert all(s.trials == 2 and s.std_f >= 0 and min(s.std_x) >= 0 for s in summaries)
    holder = summaries[0]
    assert min(holder.mean_x) >= 0  # positions are folded by sign symmetry


def test_experiment_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="valid names"):
        ExperimentConfig(algorithms=["pso"])
    with pytest.raises(ConfigError, match="valid names"):
        ExperimentConfig(benchmarks=["ackley"])
    with pytest.raises(ConfigError):
        ExperimentConfig(budget=10)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"trails": 3})
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"benchmarks": ["sphere"], "trials": 4}))
    cfg = ExperimentConfig.from_file(path, trials=2, budget=None)
    assert cfg.trials == 2 and cfg.benchmarks == ["sphere"]


def test_detect_convergence_examples():
    assert detect_convergence([5.0, 5.0, 5.0], 1e-9) == 0
    assert detect_convergence([3, 2, 1, 1, 1], 1e-9) == 2
    assert detect_convergence([5, 4, 3, 2, 1], 1e-9) == 4
    assert detect_convergence([(10, 3.0), (20, 1.0), (30, 1.0)], 1e-9) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30), st.floats(0, 1), st.floats(0, 1))
def test_detect_convergence_monotone_in_epsilon(values, e1, e2):
    trace = np.minimum.accumulate(values)
    lo, hi = sorted((e1, e2))
    assert detect_convergence(trace, hi) <= detect_convergence(trace, lo)


def test_timing_ratios():
    cfg = ExperimentConfig(algorithms={"ga": {"population": 10}, "sos": {"population": 10}},
                           benchmarks=["sphere"], trials=2, budget=2000)
    cells = run_timing(cfg)
    row = cells["sphere"]
    converged = [c for c in row if c.converged]
    if converged:
        assert min(c.ratio for c in converged) == pytest.approx(1.0)
    for c in row:
        assert (c.label.startswith(">")) == (not c.converged)


def test_timing_cell_labels():
    assert TimingCell("ga", "sphere", 100.0, 0.1, True, 1.0).label == "1"
    assert TimingCell("fa", "sphere", 500.0, 0.5, False, 5.0).label == ">5"
    assert TimingCell("fa", "sphere", 500.0, 0.5, False).label == ">"


# Dataset I/O -------------------------------------------------------------

def test_ingest_formulation_csv(tmp_path):
    path = tmp_path / "f.csv"
    formulation_dataset(n=30, seed=1).to_csv(path)
    data = ingest_dataset(path, FORMULATION_INPUTS, FORMULATION_OUTPUTS)
    assert data.n == 30 and data.n_inputs == 3 and data.n_outputs == 4
    assert ingest_dataset(path, FORMULATION_INPUTS).output_names == list(FORMULATION_OUTPUTS)


def test_ingest_errors(tmp_path):
    header_only = tmp_path / "h.csv"
    header_only.write_text("a,b\n")
    with pytest.raises(DataError):
        ingest_dataset(header_only, ["a"], ["b"])
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(DataError):
        ingest_dataset(empty, ["a"], ["b"])
    with pytest.raises(SchemaError, match="c"):
        ingest_dataset(header_only, ["a"], ["c"])


def test_ingest_drops_malformed_row(tmp_path):
    rows = [f"{i},{2 * i}" for i in range(10)]
    rows[4] = "4,oops"
    path = tmp_path / "m.csv"
    path.write_text("a,b\n" + "\n".join(rows) + "\n")
    with pytest.warns(UserWarning, match=r"\[6\]"):
        data = ingest_dataset(path, ["a"], ["b"])
    assert data.n == 9


def test_synth_dataset_contract():
    teacher = random_teacher_network([2, 3, 1], seed=0)
    space = SearchSpace.uniform(-1, 1, 2)
    clean = synth_dataset(teacher, 15, 0.0, RngStream(1), space)
    np.testing.assert_array_equal(clean.outputs, teacher.predict(clean.inputs))
    a = synth_dataset(teacher, 15, 0.1, RngStream(2), space)
    b = synth_dataset(teacher, 15, 0.1, RngStream(2), space)
    np.testing.assert_array_equal(a.inputs, b.inputs)
    np.testing.assert_array_equal(a.outputs, b.outputs)
    with pytest.raises(DataError):
        synth_dataset(teacher, 0, 0.0, RngStream(0), space)


def test_formulation_dataset_is_positive_and_in_box():
    data = formulation_dataset(n=50, seed=3, clusters=3)
    assert np.all(data.outputs > 0)
    assert np.all(data.inputs >= [20, 0.5, 1]) and np.all(data.inputs <= [100, 3, 10])


# Pipeline ----------------------------------------------------------------

QUICK = SurrogateSpec("mlp", (4,), train=TrainConfig(0.5, 300))


def sphere_data(n=30):
    return synth_dataset(lambda x: sphere(x)[:, None] + 1.0, n, 0.0, RngStream(0),
                         SearchSpace.uniform(-1, 1, 2), ["a", "b"], ["f"])


def test_pipeline_budget_equals_population():
    cfg = PipelineConfig({"a": [-1, 1], "b": [-1, 1]}, {"f": "minimize"}, surrogate=QUICK,
                         algorithm_params={"population": 20}, budget=20)
    report = run_pipeline(cfg, sphere_data())
    assert report.trial.evaluations_used == 20
    assert set(report.best_input) == {"a", "b"}
    assert report.fit_chi2["f"] is not None


def test_pipeline_target_direction_self_consistent():
    data = sphere_data()
    base = PipelineConfig({"a": [-1, 1], "b": [-1, 1]}, {"f": "minimize"}, surrogate=QUICK, budget=50)
    model = run_pipeline(base, data).surrogates["f"]
    target = float(model.predict(data.inputs[3])[0])
    cfg = PipelineConfig({"a": [-1, 1], "b": [-1, 1]}, {"f": {"direction": {"target": target}}},
                         surrogate=QUICK, algorithm="sos", budget=3000)
    report = run_pipeline(cfg, data)
    assert report.objective_value <= 1e-4
    assert report.predicted["f"] == pytest.approx(target, abs=1e-4)


def test_pipeline_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig({"a": [0]}, {"f": "minimize"})
    with pytest.raises(ConfigError):
        PipelineConfig({"a": [0, 1]}, {"f": {"direction": "down"}})
    with pytest.raises(ConfigError):
        PipelineConfig({"a": [0, 1]}, {"f": "minimize"}, algorithm="pso")
    with pytest.raises(ConfigError):
        PipelineConfig({"a": [0, 1]}, {"f": "minimize"}, budget=5)
    with pytest.raises(ConfigError):
        run_pipeline(PipelineConfig({"z": [0, 1]}, {"f": "minimize"}), sphere_data())


def test_scalarized_objective_refuses_out_of_box():
    space = SearchSpace.uniform(0, 1, 1)
    scalar = _Scalarized([], [], [], space)
    with pytest.raises(AssertionError):
        scalar(np.array([2.0]))


# Reports -----------------------------------------------------------------

def test_emit_reports_header_and_determinism(small_run, tmp_path):
    summaries, reports = small_run
    paths_a = emit_reports(summaries, reports, tmp_path / "a")
    paths_b = emit_reports(summaries, reports, tmp_path / "b")
    header = open(paths_a[0], encoding="utf-8").readline().strip()
    assert header == ",".join(SUMMARY_COLUMNS) == "algorithm,benchmark,mean_f,std_f,mean_t_conv,trials"
    for a, b in zip(paths_a, paths_b):
        assert open(a, "rb").read() == open(b, "rb").read()
    assert any(p.endswith(os.path.join("convergence", "ga__sphere.csv")) for p in paths_a)


def test_emit_reports_json_and_empty(small_run, tmp_path):
    summaries, reports = small_run
    paths = emit_reports(summaries, reports, tmp_path, fmt="json", plot=False)
    assert [os.path.basename(p) for p in paths] == ["summary.json", "trials.json"]
    assert len(json.load(open(paths[0]))) == 4
    with pytest.raises(DataError):
        emit_reports([], [], tmp_path)


def test_emit_timing(tmp_path):
    cells = {"sphere": [TimingCell("ga", "sphere", 100.0, 0.1, True, 1.0, 1.0)]}
    paths = emit_timing(cells, tmp_path)
    assert [os.path.basename(p) for p in paths] == ["timing.csv", "timing.json"]


# Model comparison --------------------------------------------------------

def test_compare_models_structure():
    data = formulation_dataset(n=30, seed=0)
    quick = TrainConfig(0.5, 100)
    results = compare_models(data, RngStream(0), hidden_range=[2, 3], activations=["tanh"], config=quick,
                             anfis_config=quick)
    assert [r.output for r in results] == list(FORMULATION_OUTPUTS)
    for r in results:
        assert set(r.chi2_train) == set(r.chi2_test) == {"mlp", "anfis", "baseline"}
        assert len(r.selection_table) == 2


# CLI ---------------------------------------------------------------------

def test_cli_synth_train_assess(tmp_path):
    csv_path = str(tmp_path / "d.csv")
    assert main(["synth", "--out", csv_path, "--n", "24", "--seed", "1"]) == 0
    inputs = ",".join(FORMULATION_INPUTS)
    model = str(tmp_path / "m.json")
    assert main(["train", "--data", csv_path, "--inputs", inputs, "--epochs", "50", "--out", model]) == 0
    assert json.load(open(model))["format"] == "formopt-surrogate"
    assert main(["train", "--data", csv_path, "--inputs", inputs, "--epochs", "20", "--select", "2-3",
                 "--activations", "tanh", "--out", model]) == 0
    out = str(tmp_path / "assess")
    assert main(["assess", "--data", csv_path, "--inputs", inputs, "--epochs", "20", "--method",
                 "no_repetition", "--sizes", "5,10", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "assessment.csv"))


def test_cli_bench_and_optimize(tmp_path):
    out = str(tmp_path / "bench")
    assert main(["bench", "--trials", "1", "--budget", "100", "--out", out, "--no-plot"]) == 0
    assert sorted(os.listdir(out)) == ["summary.csv", "trials.json"]
    csv_path = tmp_path / "d.csv"
    formulation_dataset(n=20, seed=0).to_csv(csv_path)
    cfg = tmp_path / "pipe.json"
    cfg.write_text(json.dumps({
        "dataset": "d.csv", "inputs": {"plga_mg": [20, 100], "pva_pct": [0.5, 3], "resveratrol_mg": [1, 10]},
        "objectives": {"diameter_nm": "minimize", "loading_pct": {"direction": "maximize", "weight": 0.5}},
        "surrogate": {"hidden": [3], "train": {"epochs": 50}}, "algorithm": "cs", "budget": 200}))
    report = str(tmp_path / "report.json")
    assert main(["optimize", "--config", str(cfg), "--out", report]) == 0
    doc = json.load(open(report))
    assert set(doc["best_input"]) == {"plga_mg", "pva_pct", "resveratrol_mg"}


def test_cli_exit_codes(tmp_path, monkeypatch):
    assert main(["bench", "--config", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"algorithms": ["pso"]}))
    assert main(["bench", "--config", str(bad)]) == 2
    assert main(["bench", "--budget", "5"]) == 2
    header_only = tmp_path / "h.csv"
    header_only.write_text("a,b\n")
    assert main(["train", "--data", str(header_only), "--inputs", "a", "--out", str(tmp_path / "m")]) == 3
    assert main(["train", "--data", str(header_only), "--inputs", "zz", "--out", str(tmp_path / "m")]) == 3
    csv_path = tmp_path / "d.csv"
    formulation_dataset(n=12, seed=0).to_csv(csv_path)
    assert main(["assess", "--data", str(csv_path), "--inputs", ",".join(FORMULATION_INPUTS),
                 "--method", "repeated_cv", "--sizes", "12"]) == 2

    def diverge(*args, **kwargs):
        raise TrainingError("loss became non-finite at epoch 3", epoch=3)

    monkeypatch.setattr(cli, "fit_surrogate", diverge)
    assert main(["train", "--data", str(csv_path), "--inputs", ",".join(FORMULATION_INPUTS),
                 "--out", str(tmp_path / "m.json")]) == 4
