"""Unit tests for experiment configuration."""

import pytest

from src.config import (
    ExperimentConfig,
    ExplainerSection,
    FamilySection,
    load_config,
    planted_rule_config,
)
from src.explainers import ExplainerKind, LimeParams
from src.models import FamilyVariation, TrainConfig
from src.utils.errors import ConfigError


def write_config(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadConfig:
    """Test loading configuration files."""

    def test_load_yaml(self, tmp_path):
        """Test sections and classifiers are parsed."""
        path = write_config(
            tmp_path,
            """
dataset:
  name: toy
  synthetic: {d: 10, n: 100, rule_sets: [[], [[0, 1]]]}
classifiers:
  rf: {algorithm: random_forest, hyperparams: {tree_count: 10}}
  knn: {algorithm: knn, hyperparams: {neighbor_count: 3}}
family:
  base: rf
  variation: {rf_tree_counts: [9, 10]}
explainers:
  kinds: [lime, shap]
  params:
    lime: {t: 100}
k_max: 5
seed: 3
""",
        )
        cfg = load_config(str(path))
        assert cfg.dataset.name == "toy"
        assert cfg.classifiers["knn"].params().neighbor_count == 3
        assert cfg.explainer_kinds == [ExplainerKind.LIME, ExplainerKind.SHAP]
        assert cfg.explainer_params(ExplainerKind.LIME) == LimeParams(t=100)
        assert cfg.k_values == [1, 2, 3, 4, 5]
        assert cfg.split_seed == 3

    def test_missing_file(self, tmp_path):
        """Test a missing config file is a config error."""
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "absent.yaml"))

    def test_bad_yaml(self, tmp_path):
        """Test unparsable YAML is a config error."""
        path = write_config(tmp_path, "seed: [1, 2\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(str(path))

    def test_not_a_mapping(self, tmp_path):
        """Test the top level must be a mapping."""
        path = write_config(tmp_path, "- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(str(path))

    def test_every_violation_listed(self, tmp_path):
        """Test all invalid fields are reported together."""
        path = write_config(tmp_path, "k_min: 0\nneighbor_cap: 0\n")
        with pytest.raises(ConfigError) as info:
            load_config(str(path))
        assert len(info.value.violations) == 2
        assert any(v.startswith("k_min") for v in info.value.violations)

    def test_defaults_only(self):
        """Test None loads the built-in defaults."""
        cfg = load_config(None)
        assert cfg.k_values == list(range(1, 21))
        assert cfg.family.variation.rf_tree_counts == [98, 99, 100, 101]

    def test_environment_overrides_file(self, tmp_path, monkeypatch):
        """Test XBENCH_ variables win over file values."""
        path = write_config(tmp_path, "seed: 3\n")
        monkeypatch.setenv("XBENCH_SEED", "7")
        assert load_config(str(path)).seed == 7


class TestValidateFor:
    """Test per-command validation."""

    def test_planted_default_is_valid(self):
        """Test the default planted experiment passes every command."""
        cfg = planted_rule_config()
        for command in ("synth", "train", "explain", "metrics", "bench"):
            cfg.validate_for(command, d=50)

    def test_k_max_exceeds_features(self):
        """Test k_max is checked against the loaded dataset."""
        with pytest.raises(ConfigError, match="k_max 20 exceeds the feature count 10"):
            planted_rule_config().validate_for("metrics", d=10)

    def test_unknown_explainer(self):
        """Test unknown explainer tags are listed."""
        cfg = planted_rule_config(explainers=ExplainerSection(kinds=["lime", "gradcam"]))
        with pytest.raises(ConfigError, match="gradcam"):
            cfg.validate_for("explain")

    def test_family_algorithm_mismatch(self):
        """Test a tree-count family needs a forest base."""
        cfg = planted_rule_config(
            classifiers={
                "rf": TrainConfig(algorithm="random_forest"),
                "knn": TrainConfig(algorithm="knn"),
            },
            family=FamilySection(base="knn", variation=FamilyVariation(rf_tree_counts=[1, 2])),
        )
        with pytest.raises(ConfigError, match="random_forest"):
            cfg.validate_for("train")

    def test_unknown_base_model(self):
        """Test base_model must name a classifier."""
        with pytest.raises(ConfigError, match="base_model 'mlp'"):
            planted_rule_config(base_model="mlp").validate_for("train")

    def test_no_dataset_source(self):
        """Test a dataset source is required."""
        with pytest.raises(ConfigError, match="exactly one of"):
            ExperimentConfig().validate_for("train")

    def test_jobs_zero(self):
        """Test zero workers is rejected."""
        with pytest.raises(ConfigError, match="jobs"):
            planted_rule_config().with_overrides(jobs=0).validate_for("explain")

    def test_bench_needs_samples(self):
        """Test bench_samples must be positive for bench."""
        cfg = planted_rule_config(bench_samples=0)
        cfg.validate_for("metrics")
        with pytest.raises(ConfigError, match="bench_samples"):
            cfg.validate_for("bench")

    def test_with_overrides_ignores_none(self):
        """Test None overrides keep existing values."""
        cfg = planted_rule_config(seed=4).with_overrides(seed=None, output_dir="elsewhere")
        assert cfg.seed == 4
        assert cfg.output_dir == "elsewhere"
