"""Tests for the benchmark commands, reports and worker pool."""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from loguru import logger

from src.config import DatasetSection, ExperimentConfig, ExplainerSection, FamilySection
from src.data import generate_synthetic, load_csv, planted_rule_spec
from src.explainers import ExplainerKind, LimeParams, sample_seed
from src.harness import (
    Experiment,
    ExplainJob,
    cmd_bench,
    cmd_explain,
    cmd_metrics,
    cmd_synth,
    cmd_train,
    explain_many,
    load_dataset,
    resolve_jobs,
)
from src.harness import reports
from src.main import main
from src.models import FamilyVariation, TrainConfig
from src.utils.errors import CacheError, FingerprintMismatchError, ModelError
from src.utils.logging import error_log_path

EVAL_SAMPLES = 20


def create_experiment_config(out_dir, **overrides):
    """Small two-classifier experiment with cheap explainers."""
    cfg = ExperimentConfig(
        dataset=DatasetSection(name="toy", synthetic=planted_rule_spec(d=10, n=120, seed=1)),
        classifiers={
            "rf": TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 10}),
            "knn": TrainConfig(algorithm="knn", hyperparams={"neighbor_count": 3}),
        },
        family=FamilySection(base="rf", variation=FamilyVariation(rf_tree_counts=[9, 10])),
        base_model="rf",
        explainers=ExplainerSection(
            kinds=["lime", "shap"],
            params={"lime": {"t": 100}, "shap": {"coalition_count": 64}},
        ),
        k_max=5,
        effective_k=3,
        max_explain_samples=EVAL_SAMPLES,
        bench_samples=3,
        output_dir=str(out_dir),
    )
    return cfg.model_copy(update=overrides)


CONFIG_YAML = """
dataset:
  name: toy
  synthetic: {{d: 10, n: 120, rule_sets: [[], [[0, 1], [1, 1]]], seed: 1}}
classifiers:
  rf: {{algorithm: random_forest, hyperparams: {{tree_count: 10}}}}
family:
  base: rf
  variation: {{rf_tree_counts: [9, 10]}}
explainers:
  kinds: [lime]
k_max: 5
bench_samples: {bench_samples}
"""


@pytest.fixture(scope="module")
def explained_run(tmp_path_factory):
    """A trained and explained experiment shared by the read-only tests."""
    cfg = create_experiment_config(tmp_path_factory.mktemp("run"))
    index = cmd_train(cfg)
    computed = cmd_explain(cfg)
    return cfg, index, computed


class TestExperiment:
    """Test experiment preparation."""

    def test_effective_config_written(self, tmp_path):
        """Test the resolved config is saved next to the outputs."""
        cfg = create_experiment_config(tmp_path / "out")
        Experiment.prepare(cfg, "train")
        snapshot = json.loads((tmp_path / "out" / "effective_config.json").read_text())
        assert snapshot["k_max"] == 5

    def test_evaluation_ids(self, tmp_path):
        """Test evaluation ids are a sorted, seeded subsample of the test side."""
        exp = Experiment.prepare(create_experiment_config(tmp_path), "train")
        ids = exp.evaluation_ids()
        assert len(ids) == EVAL_SAMPLES
        assert ids == sorted(ids)
        assert ids == Experiment.prepare(create_experiment_config(tmp_path), "train").evaluation_ids()
        test_ids = {exp.dataset.sample_ids[i] for i in exp.split.test_indices}
        assert set(ids) <= test_ids

    def test_missing_index(self, tmp_path):
        """Test commands after train need the model index."""
        exp = Experiment.prepare(create_experiment_config(tmp_path), "explain")
        with pytest.raises(ModelError, match="run the train command"):
            exp.load_index()


class TestSynth:
    """Test the synth command."""

    def test_writes_ingestible_csv(self, tmp_path):
        """Test the written dataset loads back identically."""
        cfg = create_experiment_config(tmp_path)
        path = cmd_synth(cfg)
        assert path == tmp_path / "data" / "toy.csv"
        expected = generate_synthetic(cfg.dataset.synthetic)
        assert load_csv(path).equals(expected)
        from_csv = cfg.model_copy(update={"dataset": DatasetSection(name="toy", csv=str(path))})
        assert load_dataset(from_csv).equals(expected)

    def test_standalone_spec(self, tmp_path):
        """Test --spec names the output after the spec file."""
        spec = tmp_path / "tiny.json"
        spec.write_text(json.dumps({"d": 4, "n": 10, "rule_sets": [[], [[0, 1]]]}))
        path = cmd_synth(create_experiment_config(tmp_path / "out"), str(spec))
        assert path.name == "tiny.csv"


class TestTrain:
    """Test the train command."""

    def test_index_and_reuse(self, explained_run):
        """Test the family member equal to the rf classifier is trained once."""
        cfg, index, _ = explained_run
        assert index.family[1] == index.classifiers["rf"]
        assert index.member_name(0) == "rf[rf_tree_counts=9]"
        models = sorted(p.stem for p in (Path(cfg.output_dir) / "models").glob("*.npz"))
        assert len(models) == 3

    def test_reports(self, explained_run):
        """Test performance, ranking and overlap reports are written."""
        cfg, _, _ = explained_run
        reports_dir = Experiment.prepare(cfg, "train").reports_dir
        performance = pd.read_csv(reports_dir / "performance.csv")
        assert list(performance["classifier"]) == ["rf", "knn", "rf[rf_tree_counts=9]", "rf[rf_tree_counts=10]"]
        ranking = pd.read_csv(reports_dir / "feature_ranking.csv")
        assert list(ranking.columns) == ["rank", "rf[rf_tree_counts=9]", "rf[rf_tree_counts=10]"]
        overlap = pd.read_csv(reports_dir / "ranking_overlap.csv")
        assert 0.0 <= overlap["ranking_overlap"][0] <= 1.0


class TestExplainAndMetrics:
    """Test the explain and metrics commands."""

    def test_explain_counts(self, explained_run):
        """Test every evaluation sample is explained under each distinct model."""
        _, _, computed = explained_run
        assert computed == {"lime": 3 * EVAL_SAMPLES, "shap": 3 * EVAL_SAMPLES}

    def test_explain_resumes(self, explained_run):
        """Test a second explain run finds everything cached."""
        cfg, _, _ = explained_run
        assert cmd_explain(cfg) == {"lime": 0, "shap": 0}

    def test_metrics_rows(self, explained_run):
        """Test metrics cover every metric, approach, classifier and k."""
        cfg, _, _ = explained_run
        metrics = cmd_metrics(cfg)
        # stability 2 kinds; per classifier robustness and effectiveness for
        # 2 kinds plus consistency, each over 5 k values
        assert len(metrics) == 2 * 5 + 2 * (2 * 2 + 1) * 5
        assert set(metrics["metric"]) == {"stability", "robustness", "effectiveness", "consistency"}
        assert ((metrics["n_samples"] + metrics["n_skipped"]) == EVAL_SAMPLES).all()
        assert set(metrics.loc[metrics["metric"] == "consistency", "approach"]) == {"lime+shap"}

    def test_metrics_reports(self, explained_run):
        """Test the per-class, effective-feature, size and summary reports."""
        cfg, _, _ = explained_run
        cmd_metrics(cfg)
        reports_dir = Experiment.prepare(cfg, "metrics").reports_dir
        by_class = pd.read_csv(reports_dir / "robustness_by_class.csv")
        assert {"lime_S", "lime_D", "lime_rob", "shap_rob"} <= set(by_class.columns)
        assert np.allclose(by_class["lime_rob"], by_class["lime_S"] - by_class["lime_D"], equal_nan=True)
        sizes = pd.read_csv(reports_dir / "explanation_sizes.csv")
        assert (sizes["n_explanations"] == EVAL_SAMPLES).all()
        summary = (reports_dir / "summary.md").read_text()
        assert reports.NON_REPRODUCIBILITY in summary
        assert "two members" in summary
        assert (reports_dir / "metrics.prom").exists()

    def test_summary_states_subsample(self, explained_run):
        """Test the summary says how many test samples the metrics cover."""
        cfg, _, _ = explained_run
        cmd_metrics(cfg)
        exp = Experiment.prepare(cfg, "metrics")
        summary = (exp.reports_dir / "summary.md").read_text()
        test_size = exp.split.test_indices.size
        assert f"Metrics cover {EVAL_SAMPLES} of {test_size} test samples" in summary
        assert "max_explain_samples" in summary

    def test_metrics_before_explain(self, tmp_path):
        """Test metrics without cached explanations is a cache error."""
        cfg = create_experiment_config(tmp_path)
        cmd_train(cfg)
        with pytest.raises(CacheError, match="run the explain command"):
            cmd_metrics(cfg)

    def test_fingerprint_mismatch(self, explained_run):
        """Test models trained on another feature dictionary are refused."""
        cfg, _, _ = explained_run
        spec = cfg.dataset.synthetic.model_copy(update={"feature_prefix": "g"})
        renamed = cfg.model_copy(update={"dataset": DatasetSection(name="toy", synthetic=spec)})
        with pytest.raises(FingerprintMismatchError):
            cmd_explain(renamed)

    def test_bench(self, explained_run):
        """Test bench times each approach on the first evaluation samples."""
        cfg, _, _ = explained_run
        runtime = cmd_bench(cfg)
        assert list(runtime["approach"]) == ["lime", "shap"]
        assert (runtime["n_samples"] == 3).all()
        assert (runtime["mean_seconds"] > 0).all()


class TestPool:
    """Test the explanation worker pool."""

    def test_resolve_jobs(self):
        """Test -1 means one worker per CPU."""
        assert resolve_jobs(-1) >= 1
        assert resolve_jobs(3) == 3

    def test_workers_match_in_process(self, forest_model, planted_dataset):
        """Test pooled explanations equal in-process ones apart from timing."""
        jobs = [
            ExplainJob(sid, planted_dataset.samples[i], sample_seed(0, sid))
            for i, sid in enumerate(planted_dataset.sample_ids[:6])
        ]
        params = LimeParams(t=100)
        serial = list(explain_many(forest_model, ExplainerKind.LIME, params, jobs, workers=1))
        pooled = list(explain_many(forest_model, ExplainerKind.LIME, params, jobs, workers=2))
        assert [e.sample_id for e in pooled] == [job.sample_id for job in jobs]
        for a, b in zip(serial, pooled):
            assert a.items == b.items
            assert a.flags == b.flags
            assert a.params_hash == b.params_hash


class TestReports:
    """Test report writers."""

    def test_write_table_column_order(self, tmp_path):
        """Test columns follow the given order and floats keep full precision."""
        path = reports.write_table([{"b": 0.1 + 0.2, "a": 1}], tmp_path / "t.csv", ["a", "b"])
        assert path.read_text().splitlines() == ["a,b", "1,0.3"]

    def test_markdown_table(self):
        """Test markdown tables format floats and blanks."""
        frame = pd.DataFrame([{"x": "lime", "v": 0.12345}, {"x": "shap", "v": float("nan")}])
        lines = reports.markdown_table(frame).splitlines()
        assert lines[0] == "| x | v |"
        assert lines[2] == "| lime | 0.123 |"
        assert lines[3] == "| shap |  |"

    def test_summary_full_test_side(self):
        """Test a run over the whole test side says so."""
        row = {"metric": "stability", "approach": "lime", "dataset": "d", "classifier": "rf", "k": 5}
        metrics = pd.DataFrame([{**row, "value": 0.9, "n_samples": 30, "n_skipped": 0}])
        summary = reports.summary_markdown(
            "d", metrics, 4, "rf_tree_counts", 3, n_evaluated=30, test_size=30
        )
        assert "Metrics cover all 30 test samples." in summary
        assert "| rf | lime | 0.900 |" in summary


class TestMain:
    """Test the command-line entry point."""

    def test_synth_succeeds(self, tmp_path):
        """Test a valid run exits 0."""
        config = tmp_path / "config.yaml"
        config.write_text(CONFIG_YAML.format(bench_samples=3))
        assert main(["synth", "--config", str(config), "--out", str(tmp_path / "out")]) == 0
        assert (tmp_path / "out" / "data" / "toy.csv").exists()

    def test_validation_error_exits_1(self, tmp_path):
        """Test a config error exits 1."""
        config = tmp_path / "config.yaml"
        config.write_text(CONFIG_YAML.format(bench_samples=0))
        assert main(["bench", "--config", str(config), "--out", str(tmp_path / "out")]) == 1

    def test_missing_config_exits_1(self, tmp_path):
        """Test a missing config file exits 1."""
        assert main(["train", "--config", str(tmp_path / "absent.yaml")]) == 1

    def test_missing_models_exit_2(self, tmp_path):
        """Test a runtime failure exits 2."""
        config = tmp_path / "config.yaml"
        config.write_text(CONFIG_YAML.format(bench_samples=3))
        assert main(["explain", "--config", str(config), "--out", str(tmp_path / "out")]) == 2

    def test_log_files(self, tmp_path, monkeypatch):
        """Test a configured log file gets the run log and an error log beside it."""
        config = tmp_path / "config.yaml"
        config.write_text(CONFIG_YAML.format(bench_samples=3))
        log_file = tmp_path / "logs" / "run.log"
        monkeypatch.setenv("XBENCH_LOG_FILE", str(log_file))
        assert main(["synth", "--config", str(config), "--out", str(tmp_path / "out")]) == 0
        logger.remove()
        assert "Wrote 120 samples" in log_file.read_text()
        assert error_log_path(str(log_file)).exists()
