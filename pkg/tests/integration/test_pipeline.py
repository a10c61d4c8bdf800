"""End-to-end runs over the default planted-rule dataset.

Malicious iff f0 and f1 are both set, over 50 features and 4000 samples.
Every sanity check below has a known right answer on this data.
"""

import time

import numpy as np
import pytest

from src.config import DatasetSection, ExperimentConfig, ExplainerSection, FamilySection
from src.data import generate_synthetic, planted_rule_spec, split_per_class
from src.explainers import (
    AnchorParams,
    LemnaParams,
    LimeParams,
    LoreParams,
    ShapParams,
    explain,
    sample_seed,
)
from src.harness import cmd_explain, cmd_metrics, cmd_train
from src.models import FamilyVariation, TrainConfig, evaluate, train, train_similar_family
from src.sanity import effectiveness, stability

pytestmark = pytest.mark.slow

RULE_SAMPLES = 20
FAMILY_SAMPLES = 40


@pytest.fixture(scope="module")
def planted():
    ds = generate_synthetic(planted_rule_spec())
    return ds, split_per_class(ds, seed=0)


@pytest.fixture(scope="module")
def planted_forest(planted):
    ds, split = planted
    return train(ds, split, TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 30}))


@pytest.fixture(scope="module")
def rule_samples(planted):
    """Test samples that satisfy the planted rule."""
    ds, split = planted
    test = split.test_indices
    chosen = test[(ds.samples[test, 0] == 1) & (ds.samples[test, 1] == 1)][:RULE_SAMPLES]
    return {ds.sample_ids[i]: ds.samples[i] for i in chosen}


def explain_all(kind, model, samples, params):
    return {
        sid: explain(kind, model, x, params, sample_seed(0, sid, model.model_id), sid)
        for sid, x in samples.items()
    }


class TestPlantedRule:
    """Test the explainers recover the planted rule through a forest."""

    def test_forest_accuracy(self, planted, planted_forest):
        """Test the forest learns the rule almost perfectly."""
        ds, split = planted
        assert evaluate(planted_forest, ds, split).accuracy >= 0.99

    @pytest.mark.parametrize("kind,params", [("lime", LimeParams()), ("shap", ShapParams())])
    def test_top_two_features_are_effective(self, planted_forest, rule_samples, kind, params):
        """Test removing the top two features flips almost every prediction."""
        explanations = explain_all(kind, planted_forest, rule_samples, params)
        series = effectiveness(planted_forest, rule_samples, explanations, [2], approach=kind)
        assert series.value(2) >= 0.9

    def test_anchor_fixes_rule_features(self, planted_forest, rule_samples):
        """Test anchors of rule-satisfying samples hold both rule features."""
        explanations = explain_all("anchor", planted_forest, rule_samples, AnchorParams())
        hits = [{0, 1} <= {item.feature for item in e.items} for e in explanations.values()]
        assert np.mean(hits) >= 0.9

    def test_runtime_ordering(self, planted_forest, rule_samples):
        """Test LIME is faster per sample than Anchor and LORE."""
        samples = dict(list(rule_samples.items())[:5])
        seconds = {}
        for kind, params in (("lime", LimeParams()), ("anchor", AnchorParams()), ("lore", LoreParams())):
            started = time.perf_counter()
            explain_all(kind, planted_forest, samples, params)
            seconds[kind] = time.perf_counter() - started
        assert seconds["lime"] < seconds["anchor"]
        assert seconds["lime"] < seconds["lore"]


class TestFamilyStability:
    """Test stability across a forest family on the planted rule."""

    @pytest.fixture(scope="class")
    def forest_family(self, planted):
        ds, split = planted
        variation = FamilyVariation(rf_tree_counts=[98, 99, 100, 101])
        return train_similar_family(ds, split, TrainConfig(algorithm="random_forest"), variation)

    @pytest.fixture(scope="class")
    def family_samples(self, planted):
        ds, split = planted
        chosen = split.test_indices[:FAMILY_SAMPLES]
        return {ds.sample_ids[i]: ds.samples[i] for i in chosen}

    def test_lime_more_stable_than_lemna(self, forest_family, family_samples):
        """Test LIME is more stable than LEMNA at every k from 5 to 20."""
        ks = [5, 10, 15, 20]
        series = {
            kind: stability(
                [explain_all(kind, model, family_samples, params) for model in forest_family.models],
                ks,
                approach=kind,
            )
            for kind, params in (("lime", LimeParams()), ("lemna", LemnaParams()))
        }
        for k in ks:
            assert series["lime"].value(k) > series["lemna"].value(k), k


def create_pipeline_config(out_dir, jobs):
    return ExperimentConfig(
        dataset=DatasetSection(name="planted", synthetic=planted_rule_spec(d=20, n=400)),
        classifiers={"rf": TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 10})},
        family=FamilySection(base="rf", variation=FamilyVariation(rf_tree_counts=[9, 10, 11])),
        explainers=ExplainerSection(
            kinds=["lime", "shap", "lore"],
            params={"lime": {"t": 200}, "shap": {"coalition_count": 128}, "lore": {"generations": 5}},
        ),
        k_max=10,
        max_explain_samples=30,
        jobs=jobs,
        output_dir=str(out_dir),
    )


class TestReproducibility:
    """Test whole runs are reproducible."""

    def test_metrics_files_identical(self, tmp_path):
        """Test two runs, one of them pooled, write byte-identical metrics."""
        for name, jobs in (("a", 1), ("b", 2)):
            cfg = create_pipeline_config(tmp_path / name, jobs)
            cmd_train(cfg)
            cmd_explain(cfg)
            cmd_metrics(cfg)
        for report in ("metrics.csv", "robustness_by_class.csv", "effective_features.csv", "performance.csv"):
            a = (tmp_path / "a" / "reports" / report).read_bytes()
            b = (tmp_path / "b" / "reports" / report).read_bytes()
            assert a == b, report
