"""Unit tests for planted-rule synthetic datasets."""

import json

import numpy as np
import pytest

from src.data import SyntheticSpec, generate_synthetic, planted_label, planted_rule_spec
from src.solvers import CartParams, cart_build
from src.utils.errors import ConfigError


class TestSyntheticSpec:
    """Test spec validation."""

    def test_feature_out_of_range(self):
        """Test rule features must index into d."""
        with pytest.raises(ConfigError, match="outside"):
            SyntheticSpec.parse({"d": 3, "n": 10, "rule_sets": [[], [[5, 1]]]})

    def test_two_default_classes(self):
        """Test at most one class may have an empty rule."""
        with pytest.raises(ConfigError, match="empty conjunctions"):
            SyntheticSpec.parse({"d": 3, "n": 10, "rule_sets": [[], []]})

    def test_implied_rule(self):
        """Test a rule may not imply another class's rule."""
        with pytest.raises(ConfigError, match="implies"):
            SyntheticSpec.parse({"d": 3, "n": 10, "rule_sets": [[[0, 1]], [[0, 1], [1, 1]]]})

    def test_contradictory_rule(self):
        """Test a rule may not require a feature to be both 0 and 1."""
        with pytest.raises(ConfigError, match="both 0 and 1"):
            SyntheticSpec.parse({"d": 3, "n": 10, "rule_sets": [[], [[0, 1], [0, 0]]]})

    def test_every_violation_listed(self):
        """Test one error carries every problem."""
        with pytest.raises(ConfigError) as info:
            SyntheticSpec.parse({"d": 2, "n": 10, "rule_sets": [[[4, 1]], [[7, 2]]]})
        assert len(info.value.violations) == 1
        message = info.value.violations[0]
        assert "feature index 4" in message and "feature index 7" in message and "bit 2" in message

    def test_from_file(self, tmp_path):
        """Test specs load from JSON files."""
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"d": 4, "n": 20, "rule_sets": [[], [[0, 1]]], "seed": 9}))
        spec = SyntheticSpec.from_file(path)
        assert spec.seed == 9
        assert spec.labels == ["class_0", "class_1"]

    def test_from_missing_file(self, tmp_path):
        """Test a missing spec file is a config error."""
        with pytest.raises(ConfigError, match="cannot read"):
            SyntheticSpec.from_file(tmp_path / "absent.json")


class TestGenerateSynthetic:
    """Test planted-rule generation."""

    def test_labels_follow_rule_without_noise(self, planted_dataset, planted_spec):
        """Test every label equals the planted oracle at noise 0."""
        oracle = [planted_label(planted_spec, row) for row in planted_dataset.samples]
        assert np.array_equal(planted_dataset.labels, oracle)
        malicious = planted_dataset.labels == 1
        assert planted_dataset.samples[malicious][:, :2].all()
        assert not planted_dataset.samples[~malicious][:, :2].all(axis=1).any()

    def test_deterministic_per_seed(self, planted_spec):
        """Test identical specs give identical datasets."""
        assert generate_synthetic(planted_spec).equals(generate_synthetic(planted_spec))
        other = generate_synthetic(planted_spec.model_copy(update={"seed": 4}))
        assert not np.array_equal(other.samples, generate_synthetic(planted_spec).samples)

    def test_noise_rate(self):
        """Test labels flip at roughly the noise rate."""
        spec = planted_rule_spec(d=10, n=4000, noise_rate=0.1, seed=0)
        ds = generate_synthetic(spec)
        oracle = np.array([planted_label(spec, row) for row in ds.samples])
        assert 0.07 < (ds.labels != oracle).mean() < 0.13

    def test_multi_class_rules_exclusive(self):
        """Test every sample satisfies exactly its own class rule."""
        spec = SyntheticSpec(d=8, n=300, rule_sets=[[], [(0, 1), (1, 1)], [(2, 1), (3, 0)]], seed=2)
        ds = generate_synthetic(spec)
        assert ds.class_count == 3
        for row, label in zip(ds.samples, ds.labels):
            assert planted_label(spec, row) == label

    def test_depth_two_tree_recovers_rule(self, planted_dataset):
        """Test the planted rule is detectable by a depth-2 tree."""
        tree = cart_build(planted_dataset.samples, planted_dataset.labels, params=CartParams(max_depth=2))
        assert (tree.predict(planted_dataset.samples) == planted_dataset.labels).mean() == 1.0
        assert set(tree.feature[tree.feature >= 0]) == {0, 1}
