"""Classifier configuration, model container and performance records."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Literal, Optional, Protocol, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.errors import DimensionMismatchError

Algorithm = Literal["random_forest", "knn", "mlp"]


class ForestParams(BaseModel):
    """Random forest hyperparameters."""

    model_config = ConfigDict(extra="forbid")

    tree_count: int = Field(default=100, ge=1)
    split_criterion: Literal["gini"] = "gini"
    min_samples_leaf: int = Field(default=1, ge=1)
    min_samples_split: int = Field(default=2, ge=2)
    max_depth: Optional[int] = Field(default=None, ge=1)
    max_features: Union[Literal["sqrt", "all"], int] = "sqrt"
    bootstrap: bool = True


class KnnParams(BaseModel):
    """k-nearest-neighbour hyperparameters (Hamming distance)."""

    model_config = ConfigDict(extra="forbid")

    neighbor_count: int = Field(default=10, ge=1)
    weighting: Literal["uniform"] = "uniform"


class MlpParams(BaseModel):
    """Multilayer perceptron hyperparameters."""

    model_config = ConfigDict(extra="forbid")

    hidden_layers: int = Field(default=3, ge=0)
    neurons_per_layer: int = Field(default=128, ge=1)
    activation: Literal["relu", "tanh", "logistic"] = "relu"
    max_iterations: int = Field(default=200, ge=1)
    batch_size: int = Field(default=200, ge=1)
    learning_rate: float = Field(default=0.01, gt=0)


PARAMS_BY_ALGORITHM = {"random_forest": ForestParams, "knn": KnnParams, "mlp": MlpParams}


class TrainConfig(BaseModel):
    """Algorithm tag, algorithm-specific hyperparameters and seed."""

    model_config = ConfigDict(extra="forbid")

    algorithm: Algorithm = "random_forest"
    hyperparams: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0

    @model_validator(mode="after")
    def _check_hyperparams(self) -> "TrainConfig":
        # Normalize to the full, validated parameter set so equal configs hash equally
        self.hyperparams = self.params().model_dump()
        return self

    def params(self) -> Union[ForestParams, KnnParams, MlpParams]:
        """Typed hyperparameters for the configured algorithm."""
        return PARAMS_BY_ALGORITHM[self.algorithm].model_validate(self.hyperparams)

    def with_hyperparams(self, **overrides: Any) -> "TrainConfig":
        """Copy with some hyperparameters replaced."""
        return TrainConfig(
            algorithm=self.algorithm, hyperparams={**self.hyperparams, **overrides}, seed=self.seed
        )

    def with_seed(self, seed: int) -> "TrainConfig":
        """Copy with another seed."""
        return TrainConfig(algorithm=self.algorithm, hyperparams=self.hyperparams, seed=seed)

    def describe(self) -> str:
        """Short human-readable tag."""
        params = self.params()
        if isinstance(params, ForestParams):
            detail = f"trees={params.tree_count}"
        elif isinstance(params, KnnParams):
            detail = f"k={params.neighbor_count}"
        else:
            detail = f"{params.hidden_layers}x{params.neurons_per_layer} iters={params.max_iterations}"
        return f"{self.algorithm}({detail}, seed={self.seed})"


class Estimator(Protocol):
    """Learned parameters of one algorithm."""

    n_classes: int

    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...

    def to_arrays(self) -> Dict[str, np.ndarray]: ...


def hash_arrays(meta: Dict[str, Any], arrays: Dict[str, np.ndarray]) -> str:
    """Content hash over metadata and named arrays."""
    digest = hashlib.sha256(json.dumps(meta, sort_keys=True).encode("utf-8"))
    for name in sorted(arrays):
        array = np.ascontiguousarray(arrays[name])
        digest.update(name.encode("utf-8"))
        digest.update(str(array.dtype).encode("utf-8"))
        digest.update(str(array.shape).encode("utf-8"))
        digest.update(array.tobytes())
    return digest.hexdigest()[:20]


@dataclass(eq=False)
class ClassifierModel:
    """A trained black-box model f.

    ``predict`` is a pure function of the learned parameters and the input.
    """

    config: TrainConfig
    learned: Estimator
    dictionary_fingerprint: str
    n_features: int
    label_names: Tuple[str, ...]
    model_id: str = ""

    def __post_init__(self):
        self.label_names = tuple(self.label_names)
        if not self.model_id:
            self.model_id = hash_arrays(self.identity(), self.learned.to_arrays())

    @property
    def algorithm(self) -> str:
        return self.config.algorithm

    @property
    def class_count(self) -> int:
        return len(self.label_names)

    @property
    def exposes_votes(self) -> bool:
        """Whether ``predict_proba`` returns vote fractions (forest, neighbours)."""
        return self.config.algorithm in ("random_forest", "knn")

    def identity(self) -> Dict[str, Any]:
        """Metadata that, with the learned arrays, defines the model."""
        return {
            "config": self.config.model_dump(),
            "dictionary_fingerprint": self.dictionary_fingerprint,
            "n_features": self.n_features,
            "label_names": list(self.label_names),
        }

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.uint8)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatchError(
                f"input has {X.shape[-1]} features, model {self.model_id} expects {self.n_features}"
            )
        return X

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Class scores (votes or probabilities) for each row."""
        return self.learned.predict_proba(self._check(X))

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        """Predicted class indices, lowest index on score ties."""
        return np.argmax(self.predict_proba(X), axis=1)

    def predict(self, x: np.ndarray) -> int:
        """Predicted class index of a single vector."""
        x = np.asarray(x)
        if x.ndim != 1:
            raise DimensionMismatchError("predict expects a single feature vector")
        return int(self.predict_batch(x)[0])


@dataclass
class SimilarModelFamily:
    """Near-identical models used by the stability metric."""

    models: List[ClassifierModel]
    variation: str
    values: List[Any] = field(default_factory=list)

    @property
    def alpha(self) -> int:
        return len(self.models)

    @property
    def model_ids(self) -> List[str]:
        return [m.model_id for m in self.models]


@dataclass
class ClassPerformance:
    """One-vs-rest rates for one class."""

    label: str
    support: int
    tpr: float
    fpr: float
    precision: float
    recall: float
    f_measure: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class PerformanceReport:
    """Detection performance over the test side of a split.

    Binary tasks report the rates of the second class (the positive,
    e.g. malicious); multi-class tasks report macro averages.
    """

    tpr: float
    fpr: float
    precision: float
    recall: float
    f_measure: float
    accuracy: float
    n_samples: int
    per_class: List[ClassPerformance] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Flat row in the published table's shape."""
        return {
            "tpr": round(self.tpr, 6),
            "fpr": round(self.fpr, 6),
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f_measure": round(self.f_measure, 6),
            "accuracy": round(self.accuracy, 6),
            "n_samples": self.n_samples,
        }
