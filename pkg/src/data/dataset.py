"""Binary feature-vector dataset models and structures."""

import hashlib
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..utils.errors import DatasetError

FEATURE_KINDS = ("api", "permission", "intent", "synthetic")

# A feature vector is a length-d uint8 array over {0, 1}.
FeatureVector = np.ndarray


def as_feature_vector(bits: Iterable[int], d: Optional[int] = None) -> FeatureVector:
    """Coerce and validate a single binary feature vector.

    Args:
        bits: Sequence of 0/1 values
        d: Expected length, if known

    Returns:
        uint8 numpy array
    """
    vector = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
    if vector.ndim != 1:
        raise DatasetError(f"feature vector must be one-dimensional, got shape {vector.shape}")
    if d is not None and vector.shape[0] != d:
        raise DatasetError(f"feature vector has length {vector.shape[0]}, expected {d}")
    if not np.isin(vector, (0, 1)).all():
        raise DatasetError("feature vector contains values outside {0, 1}")
    return vector.astype(np.uint8)


@dataclass(frozen=True)
class FeatureDictionary:
    """Named feature namespace shared by datasets and models."""

    names: Tuple[str, ...]
    kinds: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if len(self.names) < 1:
            raise DatasetError("feature dictionary must contain at least one feature")
        seen: set[str] = set()
        for name in self.names:
            if name in seen:
                raise DatasetError(f"duplicate feature name '{name}'")
            seen.add(name)
        if len(self.kinds) != len(self.names):
            raise DatasetError(
                f"{len(self.kinds)} feature kinds given for {len(self.names)} features"
            )
        unknown = sorted(set(self.kinds) - set(FEATURE_KINDS))
        if unknown:
            raise DatasetError(f"unknown feature kinds: {', '.join(unknown)}")

    @classmethod
    def from_names(cls, names: Sequence[str], kind: str = "synthetic") -> "FeatureDictionary":
        """Build a dictionary whose features all share one kind."""
        return cls(names=tuple(names), kinds=tuple(kind for _ in names))

    @classmethod
    def synthetic(cls, d: int, prefix: str = "f") -> "FeatureDictionary":
        """Dictionary of ``d`` synthetic features named f0..f{d-1}."""
        return cls.from_names([f"{prefix}{j}" for j in range(d)])

    @property
    def d(self) -> int:
        """Number of features."""
        return len(self.names)

    @property
    def fingerprint(self) -> str:
        """Stable hash of the ordered feature names."""
        digest = hashlib.sha256("\n".join(self.names).encode("utf-8"))
        return digest.hexdigest()[:16]

    def index_of(self, name: str) -> int:
        """Index of a feature by name."""
        try:
            return self.names.index(name)
        except ValueError:
            raise DatasetError(f"unknown feature '{name}'") from None

    def to_records(self) -> list[Dict[str, str]]:
        """Sidecar representation: list of {name, kind}."""
        return [{"name": n, "kind": k} for n, k in zip(self.names, self.kinds)]


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Binary samples with class labels and a feature dictionary.

    Arrays are made read-only on construction so a dataset can be shared
    between workers without copies.
    """

    dictionary: FeatureDictionary
    samples: np.ndarray
    labels: np.ndarray
    label_names: Tuple[str, ...]
    sample_ids: Tuple[str, ...]

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.uint8)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "label_names", tuple(self.label_names))
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

        if samples.ndim != 2:
            raise DatasetError(f"samples must be a 2-D matrix, got shape {samples.shape}")
        n, d = samples.shape
        if d != self.dictionary.d:
            raise DatasetError(f"samples have {d} columns, dictionary has {self.dictionary.d}")
        if labels.shape != (n,) or len(self.sample_ids) != n:
            raise DatasetError(
                f"inconsistent lengths: {n} samples, {labels.shape[0]} labels, "
                f"{len(self.sample_ids)} sample ids"
            )
        if n and not np.isin(samples, (0, 1)).all():
            raise DatasetError("samples contain values outside {0, 1}")
        if len(set(self.label_names)) != len(self.label_names):
            raise DatasetError("label names must be distinct")
        if n and (labels.min() < 0 or labels.max() >= len(self.label_names)):
            raise DatasetError("label index out of range of label names")
        if len(set(self.sample_ids)) != n:
            raise DatasetError("sample ids must be unique")

        samples.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        """Number of samples."""
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        """Number of features."""
        return self.dictionary.d

    @property
    def class_count(self) -> int:
        """Number of classes."""
        return len(self.label_names)

    def class_indices(self, label: int) -> np.ndarray:
        """Sample indices of one class, in file order."""
        return np.flatnonzero(self.labels == label)

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        """Dataset restricted to the given sample indices."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            dictionary=self.dictionary,
            samples=self.samples[idx],
            labels=self.labels[idx],
            label_names=self.label_names,
            sample_ids=tuple(self.sample_ids[i] for i in idx),
        )

    def equals(self, other: "LabeledDataset") -> bool:
        """Structural equality."""
        return (
            self.dictionary == other.dictionary
            and self.label_names == other.label_names
            and self.sample_ids == other.sample_ids
            and np.array_equal(self.samples, other.samples)
            and np.array_equal(self.labels, other.labels)
        )

    def to_frame(self) -> pd.DataFrame:
        """Ingestion-format frame: sample_id, label, then feature columns."""
        frame = pd.DataFrame(self.samples, columns=list(self.dictionary.names))
        frame.insert(0, "label", [self.label_names[y] for y in self.labels])
        frame.insert(0, "sample_id", list(self.sample_ids))
        return frame

    def summary(self) -> Dict[str, Any]:
        """Short description used in logs and reports."""
        counts = np.bincount(self.labels, minlength=self.class_count)
        return {
            "n": self.n,
            "d": self.d,
            "classes": {name: int(c) for name, c in zip(self.label_names, counts)},
        }


@dataclass(frozen=True, eq=False)
class Split:
    """Disjoint train/test index partition of a dataset."""

    train_indices: np.ndarray
    test_indices: np.ndarray

    def __post_init__(self):
        train = np.sort(np.asarray(self.train_indices, dtype=np.int64))
        test = np.sort(np.asarray(self.test_indices, dtype=np.int64))
        if train.size == 0:
            raise DatasetError("training side of a split must be nonempty")
        if np.intersect1d(train, test).size:
            raise DatasetError("train and test indices overlap")
        if np.unique(train).size != train.size or np.unique(test).size != test.size:
            raise DatasetError("split indices must be unique")
        train.setflags(write=False)
        test.setflags(write=False)
        object.__setattr__(self, "train_indices", train)
        object.__setattr__(self, "test_indices", test)

    def check(self, dataset: LabeledDataset):
        """Verify the split lies within the dataset's index range."""
        top = max(
            int(self.train_indices.max()),
            int(self.test_indices.max()) if self.test_indices.size else -1,
        )
        if self.train_indices.min() < 0 or top >= dataset.n:
            raise DatasetError("split indices fall outside the dataset")

    def equals(self, other: "Split") -> bool:
        """Structural equality."""
        return np.array_equal(self.train_indices, other.train_indices) and np.array_equal(
            self.test_indices, other.test_indices
        )
