"""Kernel SHAP against exact Shapley values."""

import numpy as np
import pytest

from src.data import FeatureDictionary, LabeledDataset, split_per_class
from src.explainers import ShapParams, exact_shapley, explain_shap, kernel_shap_values
from src.explainers.shap import shapley_kernel
from src.models import TrainConfig, train
from src.utils.errors import ExplainerError

from .factories import random_vector

D = 12


def create_small_forest(seed, d=D, n=150):
    """Five-tree forest on random bits labeled by a majority of three features."""
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(n, d), dtype=np.uint8)
    y = (X[:, :3].sum(axis=1) >= 2).astype(np.int64)
    ds = LabeledDataset(
        dictionary=FeatureDictionary.synthetic(d),
        samples=X,
        labels=y,
        label_names=("neg", "pos"),
        sample_ids=tuple(f"r{i}" for i in range(n)),
    )
    cfg = TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 5}, seed=seed)
    return train(ds, split_per_class(ds, seed=seed), cfg)


class TestShapleyKernel:
    """Test kernel weights."""

    def test_values(self):
        """Test weights of small coalitions."""
        assert np.allclose(shapley_kernel(4, np.array([1, 2, 3])), [0.25, 0.125, 0.25])


class TestExactShapley:
    """Test the enumeration oracle."""

    def test_conjunction_game(self, and_oracle, positive_x_and):
        """Test the two rule features share the payoff equally."""
        phi = exact_shapley(and_oracle, positive_x_and, np.zeros(D, dtype=np.uint8))
        expected = np.zeros(D)
        expected[[0, 1]] = 0.5
        assert np.allclose(phi, expected)

    def test_too_many_features(self, and_oracle):
        """Test enumeration refuses more than twenty features."""
        with pytest.raises(ExplainerError, match="d <= 20"):
            exact_shapley(and_oracle, np.ones(21, dtype=np.uint8), np.zeros(21, dtype=np.uint8))


@pytest.fixture
def positive_x_and():
    return random_vector(D, seed=11, ones=[0, 1])


class TestKernelShap:
    """Test the kernel estimator."""

    @pytest.mark.parametrize("seed", range(50))
    def test_enumeration_matches_exact(self, seed):
        """Test full coalition enumeration reproduces exact Shapley values."""
        model = create_small_forest(seed)
        x = random_vector(D, seed=100 + seed)
        reference = np.zeros(D, dtype=np.uint8)
        rng = np.random.default_rng(seed)
        estimated = kernel_shap_values(model, x, reference, 2**D, rng)
        assert np.allclose(estimated, exact_shapley(model, x, reference), atol=1e-6)

    @pytest.mark.parametrize("seed", range(50))
    def test_sampled_close_to_exact(self, seed):
        """Test 2000 paired coalitions land within 0.05 of exact values."""
        model = create_small_forest(seed)
        x = np.ones(D, dtype=np.uint8)
        reference = np.zeros(D, dtype=np.uint8)
        estimated = kernel_shap_values(model, x, reference, 2000, np.random.default_rng(seed))
        assert np.abs(estimated - exact_shapley(model, x, reference)).max() < 0.05

    def test_efficiency(self):
        """Test attributions sum to f(x) - f(reference) when sampling."""
        model = create_small_forest(7)
        x = np.ones(D, dtype=np.uint8)
        reference = np.zeros(D, dtype=np.uint8)
        label = model.predict(x)
        phi = kernel_shap_values(model, x, reference, 100, np.random.default_rng(0), label=label)
        delta = model.predict_proba(x[None, :])[0, label] - model.predict_proba(reference[None, :])[0, label]
        assert phi.sum() == pytest.approx(delta, abs=1e-9)

    def test_null_players(self, and_oracle, positive_x_and):
        """Test features equal to the reference get zero."""
        reference = positive_x_and.copy()
        reference[0] = 0
        phi = kernel_shap_values(and_oracle, positive_x_and, reference, 64, np.random.default_rng(0))
        assert phi[0] == pytest.approx(1.0)
        assert np.count_nonzero(phi) == 1

    def test_too_few_coalitions(self, and_oracle):
        """Test sampling needs at least m + 2 coalitions."""
        with pytest.raises(ExplainerError, match="at least 14"):
            kernel_shap_values(
                and_oracle, np.ones(D, dtype=np.uint8), np.zeros(D, dtype=np.uint8), 10,
                np.random.default_rng(0),
            )


class TestExplainShap:
    """Test SHAP explanations."""

    def test_conjunction(self, and_oracle, positive_x_and):
        """Test the rule features lead with equal weight."""
        exp = explain_shap(and_oracle, positive_x_and, ShapParams(), seed=0)
        assert exp.top_features(2) == {0, 1}
        assert exp.items[0].weight == pytest.approx(0.5)
        assert all(abs(item.weight) < 1e-9 for item in exp.items[2:])

    def test_sample_equal_to_reference(self, and_oracle):
        """Test nothing varies against the reference gives a degenerate explanation."""
        exp = explain_shap(and_oracle, np.zeros(D, dtype=np.uint8), ShapParams(), seed=0)
        assert exp.is_empty and exp.degenerate

    def test_custom_reference(self, and_oracle, positive_x_and):
        """Test the configured reference vector is used."""
        params = ShapParams(reference=[1] * D)
        exp = explain_shap(and_oracle, positive_x_and, params, seed=0)
        assert exp.is_empty

    def test_reference_length_checked(self, and_oracle, positive_x_and):
        """Test a reference of the wrong length is rejected."""
        with pytest.raises(ExplainerError, match="length 12"):
            explain_shap(and_oracle, positive_x_and, ShapParams(reference=[0, 1]), seed=0)
