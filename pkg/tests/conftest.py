"""Shared pytest fixtures."""

import numpy as np
import pytest

from src.data import (
    FeatureDictionary,
    LabeledDataset,
    generate_synthetic,
    planted_rule_spec,
    split_per_class,
)
from src.models import TrainConfig, train

from .factories import OracleModel, conjunction_rule


@pytest.fixture
def tiny_dataset():
    """Six samples over four features, two classes."""
    return LabeledDataset(
        dictionary=FeatureDictionary.from_names(["a", "b", "c", "d"], kind="api"),
        samples=np.array(
            [
                [1, 0, 0, 1],
                [1, 1, 0, 0],
                [0, 0, 1, 1],
                [0, 1, 1, 0],
                [1, 1, 1, 1],
                [0, 0, 0, 0],
            ],
            dtype=np.uint8,
        ),
        labels=np.array([1, 1, 0, 0, 1, 0]),
        label_names=("benign", "malicious"),
        sample_ids=("s0", "s1", "s2", "s3", "s4", "s5"),
    )


@pytest.fixture(scope="session")
def planted_spec():
    """Small planted-rule spec: malicious iff f0 and f1 are both set."""
    return planted_rule_spec(d=12, n=400, rule_size=2, seed=3)


@pytest.fixture(scope="session")
def planted_dataset(planted_spec):
    return generate_synthetic(planted_spec)


@pytest.fixture(scope="session")
def planted_split(planted_dataset):
    return split_per_class(planted_dataset, seed=0)


@pytest.fixture(scope="session")
def forest_model(planted_dataset, planted_split):
    """Random forest of 20 trees on the small planted dataset."""
    cfg = TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 20})
    return train(planted_dataset, planted_split, cfg)


@pytest.fixture
def and_oracle():
    """Oracle labeling 1 iff features 0 and 1 are both set, over 12 features."""
    return OracleModel(conjunction_rule([0, 1]), n_features=12)
