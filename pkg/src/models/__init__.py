"""Black-box classifiers explained by the benchmark."""

from .base import (
    ClassifierModel,
    ClassPerformance,
    ForestParams,
    KnnParams,
    MlpParams,
    PerformanceReport,
    SimilarModelFamily,
    TrainConfig,
    hash_arrays,
)
from .persistence import load_model, save_model
from .ranking import information_gain_ranking, information_gains
from .training import (
    FamilyVariation,
    evaluate,
    performance_from_predictions,
    predict,
    train,
    train_similar_family,
)

__all__ = [
    "ClassifierModel",
    "ClassPerformance",
    "ForestParams",
    "KnnParams",
    "MlpParams",
    "PerformanceReport",
    "SimilarModelFamily",
    "TrainConfig",
    "hash_arrays",
    "load_model",
    "save_model",
    "information_gain_ranking",
    "information_gains",
    "FamilyVariation",
    "evaluate",
    "performance_from_predictions",
    "predict",
    "train",
    "train_similar_family",
]
