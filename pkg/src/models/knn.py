"""k-nearest-neighbour classifier under Hamming distance."""

from typing import Dict

import numpy as np

from .base import KnnParams


class NearestNeighbors:
    """Stores the training vectors; scores are uniform neighbour vote fractions.

    Distance ties keep the earlier training row; vote ties go to the lowest
    class index.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, n_classes: int, neighbor_count: int):
        self.X = np.asarray(X, dtype=np.uint8)
        self.y = np.asarray(y, dtype=np.int64)
        self.n_classes = n_classes
        self.neighbor_count = neighbor_count
        self._ones = self.X.astype(np.float32)

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, n_classes: int, params: KnnParams) -> "NearestNeighbors":
        return cls(X, y, n_classes, params.neighbor_count)

    def hamming(self, X: np.ndarray) -> np.ndarray:
        """Hamming distances from each query row to each training row."""
        Q = np.asarray(X, dtype=np.float32)
        # |a xor b| = |a| + |b| - 2 a.b on 0/1 vectors
        dist = Q.sum(axis=1)[:, None] + self._ones.sum(axis=1)[None, :] - 2.0 * (Q @ self._ones.T)
        return np.rint(dist).astype(np.int64)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        k = min(self.neighbor_count, self.X.shape[0])
        dist = self.hamming(X)
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
        votes = np.zeros((dist.shape[0], self.n_classes))
        for c in range(self.n_classes):
            votes[:, c] = (self.y[nearest] == c).sum(axis=1)
        return votes / k

    def to_arrays(self) -> Dict[str, np.ndarray]:
        return {
            "X": self.X,
            "y": self.y,
            "n_classes": np.array([self.n_classes], dtype=np.int64),
            "neighbor_count": np.array([self.neighbor_count], dtype=np.int64),
        }

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "NearestNeighbors":
        return cls(
            arrays["X"],
            arrays["y"],
            int(arrays["n_classes"][0]),
            int(arrays["neighbor_count"][0]),
        )
