"""Dataset package: binary feature vectors, splits and synthetic oracles."""

from .dataset import (
    FEATURE_KINDS,
    FeatureDictionary,
    FeatureVector,
    LabeledDataset,
    Split,
    as_feature_vector,
)
from .io import DatasetSidecar, load_csv, load_sidecar, sidecar_path, write_csv, write_sidecar
from .splits import split_per_class, split_random
from .synthetic import SyntheticSpec, generate_synthetic, planted_label, planted_rule_spec

__all__ = [
    "FEATURE_KINDS",
    "FeatureDictionary",
    "FeatureVector",
    "LabeledDataset",
    "Split",
    "as_feature_vector",
    "load_csv",
    "DatasetSidecar",
    "load_sidecar",
    "sidecar_path",
    "write_csv",
    "write_sidecar",
    "split_per_class",
    "split_random",
    "SyntheticSpec",
    "generate_synthetic",
    "planted_label",
    "planted_rule_spec",
]
