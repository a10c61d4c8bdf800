"""Information-gain feature ranking."""

from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import entropy

from ..data.dataset import LabeledDataset, Split


def _label_entropy(labels: np.ndarray, n_classes: int) -> float:
    if labels.size == 0:
        return 0.0
    return float(entropy(np.bincount(labels, minlength=n_classes), base=2))


def information_gains(X: np.ndarray, y: np.ndarray, n_classes: int) -> np.ndarray:
    """Gain of every binary feature about the labels."""
    n = y.size
    base = _label_entropy(y, n_classes)
    gains = np.empty(X.shape[1])
    for j in range(X.shape[1]):
        ones = X[:, j] == 1
        conditional = 0.0
        for side in (~ones, ones):
            if side.any():
                conditional += side.sum() / n * _label_entropy(y[side], n_classes)
        gains[j] = base - conditional
    return gains


def information_gain_ranking(
    ds: LabeledDataset, split: Split, top_n: int = 10, labels: Optional[np.ndarray] = None
) -> List[Tuple[str, float]]:
    """Top features by information gain on the train side.

    Descending gain; ties go to the lower feature index. ``labels`` replaces
    the dataset labels (one per sample), e.g. a model's predictions, to rank
    the features a particular classifier relies on.
    """
    X = ds.samples[split.train_indices]
    y = (ds.labels if labels is None else np.asarray(labels, dtype=np.int64))[split.train_indices]
    gains = information_gains(X, y, ds.class_count)
    # Round away float noise so permuted samples rank identically
    keys = np.round(gains, 12)
    order = np.lexsort((np.arange(gains.size), -keys))
    return [(ds.dictionary.names[j], float(gains[j])) for j in order[:top_n]]
