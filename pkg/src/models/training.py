"""Training, evaluation and similar-model families."""

from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..data.dataset import FeatureVector, LabeledDataset, Split
from ..utils.errors import ConfigError, ModelError
from .base import (
    ClassifierModel,
    ClassPerformance,
    ForestParams,
    KnnParams,
    PerformanceReport,
    SimilarModelFamily,
    TrainConfig,
)
from .forest import RandomForest
from .knn import NearestNeighbors
from .mlp import MultilayerPerceptron


def train(ds: LabeledDataset, split: Split, cfg: TrainConfig) -> ClassifierModel:
    """Train a classifier on the train side of a split.

    Args:
        ds: Dataset
        split: Train/test partition
        cfg: Algorithm, hyperparameters and seed

    Returns:
        Trained model; identical inputs give an identical model_id
    """
    split.check(ds)
    X = ds.samples[split.train_indices]
    y = ds.labels[split.train_indices]
    params = cfg.params()

    if cfg.algorithm in ("random_forest", "mlp") and np.unique(y).size < 2:
        raise ModelError(f"{cfg.algorithm} needs at least two classes in the training set")

    logger.info(f"Training {cfg.describe()} on {X.shape[0]} samples, {X.shape[1]} features")
    if isinstance(params, ForestParams):
        learned = RandomForest.fit(X, y, ds.class_count, params, cfg.seed)
    elif isinstance(params, KnnParams):
        learned = NearestNeighbors.fit(X, y, ds.class_count, params)
    else:
        learned = MultilayerPerceptron.fit(X, y, ds.class_count, params, cfg.seed)

    model = ClassifierModel(
        config=cfg,
        learned=learned,
        dictionary_fingerprint=ds.dictionary.fingerprint,
        n_features=ds.d,
        label_names=ds.label_names,
    )
    logger.debug(f"Trained model {model.model_id}")
    return model


def predict(model: ClassifierModel, x: FeatureVector) -> int:
    """Predicted class index of one vector."""
    return model.predict(x)


def _rates(y_true: np.ndarray, y_pred: np.ndarray, label: int, name: str) -> ClassPerformance:
    positive = y_true == label
    predicted = y_pred == label
    tp = int((positive & predicted).sum())
    fp = int((~positive & predicted).sum())
    fn = int((positive & ~predicted).sum())
    tn = int((~positive & ~predicted).sum())

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    fpr = fp / (fp + tn) if fp + tn else 0.0
    f_measure = 2 * precision * recall / (precision + recall) if precision and recall else 0.0
    return ClassPerformance(
        label=name,
        support=int(positive.sum()),
        tpr=recall,
        fpr=fpr,
        precision=precision,
        recall=recall,
        f_measure=f_measure,
    )


def performance_from_predictions(
    y_true: np.ndarray, y_pred: np.ndarray, label_names: List[str]
) -> PerformanceReport:
    """Detection rates from true and predicted class indices.

    Binary tasks report the second class as positive; multi-class tasks
    report macro averages over classes.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise ModelError("cannot evaluate on an empty test side")
    per_class = [_rates(y_true, y_pred, c, name) for c, name in enumerate(label_names)]

    if len(label_names) == 2:
        summary = per_class[1]
        tpr, fpr = summary.tpr, summary.fpr
        precision, recall, f_measure = summary.precision, summary.recall, summary.f_measure
    else:
        tpr = float(np.mean([p.tpr for p in per_class]))
        fpr = float(np.mean([p.fpr for p in per_class]))
        precision = float(np.mean([p.precision for p in per_class]))
        recall = float(np.mean([p.recall for p in per_class]))
        f_measure = (
            2 * precision * recall / (precision + recall) if precision and recall else 0.0
        )

    return PerformanceReport(
        tpr=tpr,
        fpr=fpr,
        precision=precision,
        recall=recall,
        f_measure=f_measure,
        accuracy=float((y_true == y_pred).mean()),
        n_samples=int(y_true.size),
        per_class=per_class,
    )


def evaluate(
    model: ClassifierModel, ds: LabeledDataset, split: Split, side: str = "test"
) -> PerformanceReport:
    """Performance of a model over one side of a split (test by default)."""
    indices = split.test_indices if side == "test" else split.train_indices
    if indices.size == 0:
        raise ModelError(f"{side} side of the split is empty")
    y_pred = model.predict_batch(ds.samples[indices])
    report = performance_from_predictions(ds.labels[indices], y_pred, list(ds.label_names))
    logger.info(
        f"Evaluated {model.config.describe()}: accuracy={report.accuracy:.4f} "
        f"tpr={report.tpr:.4f} fpr={report.fpr:.4f}"
    )
    return report


class FamilyVariation(BaseModel):
    """Which knob varies across a similar-model family; exactly one is set."""

    model_config = ConfigDict(extra="forbid")

    rf_tree_counts: Optional[List[int]] = Field(default=None, min_length=2)
    seeds: Optional[List[int]] = Field(default=None, min_length=2)
    knn_neighbors: Optional[List[int]] = Field(default=None, min_length=2)
    mlp_iterations: Optional[List[int]] = Field(default=None, min_length=2)

    @model_validator(mode="after")
    def _exactly_one(self) -> "FamilyVariation":
        chosen = [name for name, value in self if value is not None]
        if len(chosen) != 1:
            raise ValueError(f"exactly one variation must be set, got {chosen or 'none'}")
        return self

    @property
    def kind(self) -> str:
        return next(name for name, value in self if value is not None)

    @property
    def values(self) -> List[int]:
        return list(getattr(self, self.kind))

    def configs(self, base: TrainConfig) -> List[TrainConfig]:
        """One TrainConfig per variation value, all else equal to ``base``."""
        required = {
            "rf_tree_counts": "random_forest",
            "knn_neighbors": "knn",
            "mlp_iterations": "mlp",
        }.get(self.kind)
        if required is not None and base.algorithm != required:
            raise ConfigError(
                f"variation {self.kind} needs algorithm {required}, family base is {base.algorithm}"
            )
        if self.kind == "seeds":
            return [base.with_seed(s) for s in self.values]
        knob = {
            "rf_tree_counts": "tree_count",
            "knn_neighbors": "neighbor_count",
            "mlp_iterations": "max_iterations",
        }[self.kind]
        return [base.with_hyperparams(**{knob: v}) for v in self.values]


def train_similar_family(
    ds: LabeledDataset, split: Split, cfg: TrainConfig, variation: FamilyVariation
) -> SimilarModelFamily:
    """Train one model per variation value.

    Args:
        ds: Dataset
        split: Train/test partition
        cfg: Base configuration shared by every member
        variation: The varied hyperparameter or seed list

    Returns:
        Family of α = len(values) models
    """
    configs = variation.configs(cfg)
    if len({c.algorithm for c in configs}) != 1:
        raise ConfigError("all members of a similar-model family must share one algorithm")
    logger.info(f"Training similar family over {variation.kind}={variation.values}")
    models = [train(ds, split, c) for c in configs]
    return SimilarModelFamily(models=models, variation=variation.kind, values=variation.values)
