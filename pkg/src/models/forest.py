"""Random forest of CART trees grown on bootstrap samples."""

from typing import Dict, List

import numpy as np

from ..solvers.cart import CartParams, DecisionTree, cart_build
from .base import ForestParams


def resolve_max_features(setting, d: int) -> int:
    """Number of candidate features per split."""
    if setting == "sqrt":
        return max(1, int(np.sqrt(d)))
    if setting == "all":
        return d
    return max(1, min(int(setting), d))


class RandomForest:
    """Bagged gini trees; scores are mean leaf distributions (vote fractions)."""

    def __init__(self, trees: List[DecisionTree], n_classes: int):
        self.trees = trees
        self.n_classes = n_classes

    @classmethod
    def fit(
        cls,
        X: np.ndarray,
        y: np.ndarray,
        n_classes: int,
        params: ForestParams,
        seed: int,
    ) -> "RandomForest":
        """Grow ``tree_count`` trees.

        Args:
            X: Binary training matrix
            y: Class indices
            n_classes: Number of classes
            params: Forest hyperparameters
            seed: RNG seed; each tree gets an independent child stream

        Returns:
            Fitted forest
        """
        cart = CartParams(
            max_depth=params.max_depth,
            min_leaf=params.min_samples_leaf,
            min_split=params.min_samples_split,
            max_features=resolve_max_features(params.max_features, X.shape[1]),
        )
        streams = np.random.SeedSequence(seed).spawn(params.tree_count)
        trees = []
        n = X.shape[0]
        for stream in streams:
            rng = np.random.default_rng(stream)
            rows = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
            trees.append(cart_build(X[rows], y[rows], params=cart, n_classes=n_classes, rng=rng))
        return cls(trees, n_classes)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def to_arrays(self) -> Dict[str, np.ndarray]:
        """Concatenate node arrays of all trees with per-tree offsets."""
        parts = [tree.to_arrays() for tree in self.trees]
        sizes = np.array([p["feature"].shape[0] for p in parts], dtype=np.int64)
        arrays = {
            name: np.concatenate([p[name] for p in parts]) for name in parts[0]
        }
        arrays["tree_sizes"] = sizes
        arrays["n_classes"] = np.array([self.n_classes], dtype=np.int64)
        return arrays

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "RandomForest":
        bounds = np.concatenate([[0], np.cumsum(arrays["tree_sizes"])])
        trees = []
        for start, stop in zip(bounds[:-1], bounds[1:]):
            trees.append(
                DecisionTree.from_arrays(
                    {
                        name: arrays[name][start:stop]
                        for name in ("feature", "left", "right", "value", "n_node_samples")
                    }
                )
            )
        return cls(trees, int(arrays["n_classes"][0]))
