"""CART decision-tree induction on binary features (gini criterion)."""

from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from ..utils.errors import SolverError


@dataclass(frozen=True)
class CartParams:
    """Growth limits for one tree.

    ``max_features`` is the number of non-constant candidate features drawn
    per split (None means every feature), as used by random forests.
    """

    max_depth: Optional[int] = None
    min_leaf: int = 1
    min_split: int = 2
    max_features: Optional[int] = None
    criterion: Literal["gini"] = "gini"

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise SolverError("max_depth must be nonnegative")
        if self.min_leaf < 1 or self.min_split < 2:
            raise SolverError("min_leaf must be >= 1 and min_split >= 2")
        if self.max_features is not None and self.max_features < 1:
            raise SolverError("max_features must be >= 1")
        if self.criterion != "gini":
            raise SolverError(f"unsupported criterion '{self.criterion}'")


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Array-backed binary tree.

    Internal node ``i`` tests ``feature[i]``: bit 0 goes to ``left[i]``,
    bit 1 to ``right[i]``. Leaves have ``feature == -1``; ``value`` holds the
    weighted class distribution of every node.
    """

    feature: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_node_samples: np.ndarray

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    @property
    def n_classes(self) -> int:
        return self.value.shape[1]

    @property
    def depth(self) -> int:
        """Length of the longest root-to-leaf path."""
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        X = np.atleast_2d(X)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            features = self.feature[node]
            internal = np.flatnonzero(features >= 0)
            if internal.size == 0:
                return node
            current = node[internal]
            bits = X[internal, features[internal]]
            node[internal] = np.where(bits == 1, self.right[current], self.left[current])

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Leaf class distributions for the rows of ``X``."""
        return self.value[self.apply(X)]

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Majority class of the reached leaves (lowest index on ties)."""
        return np.argmax(self.predict_proba(X), axis=1)

    def path(self, x: np.ndarray) -> List[int]:
        """Node indices on the root-to-leaf path of ``x``."""
        node, nodes = 0, [0]
        while self.feature[node] >= 0:
            node = self.right[node] if x[self.feature[node]] == 1 else self.left[node]
            nodes.append(int(node))
        return nodes

    def to_arrays(self) -> Dict[str, np.ndarray]:
        return {
            "feature": self.feature,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "n_node_samples": self.n_node_samples,
        }

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "DecisionTree":
        return cls(
            feature=np.asarray(arrays["feature"], dtype=np.int64),
            left=np.asarray(arrays["left"], dtype=np.int64),
            right=np.asarray(arrays["right"], dtype=np.int64),
            value=np.asarray(arrays["value"], dtype=np.float64),
            n_node_samples=np.asarray(arrays["n_node_samples"], dtype=np.int64),
        )


def _gini(class_weights: np.ndarray, totals: np.ndarray) -> np.ndarray:
    safe = np.where(totals > 0, totals, 1.0)
    proportions = class_weights / safe[..., None]
    return np.where(totals > 0, 1.0 - (proportions**2).sum(axis=-1), 0.0)


def _best_split(
    X: np.ndarray,
    onehot: np.ndarray,
    params: CartParams,
    rng: Optional[np.random.Generator],
) -> Optional[int]:
    """Feature with the largest gini gain, lowest index on ties; None if no valid split."""
    m = X.shape[0]
    ones = X.sum(axis=0)
    nonconstant = (ones > 0) & (ones < m)

    if params.max_features is not None and rng is not None:
        order = rng.permutation(X.shape[1])
        candidates = np.sort(order[nonconstant[order]][: params.max_features])
    else:
        candidates = np.flatnonzero(nonconstant)

    counts_right = ones[candidates]
    valid = (counts_right >= params.min_leaf) & (m - counts_right >= params.min_leaf)
    if not valid.any():
        return None
    candidates = candidates[valid]

    class_total = onehot.sum(axis=0)
    right = X[:, candidates].T.astype(np.float64) @ onehot
    left = class_total[None, :] - right
    n_right = right.sum(axis=1)
    n_left = left.sum(axis=1)
    total = class_total.sum()

    parent = _gini(class_total[None, :], np.array([total]))[0]
    children = (n_left * _gini(left, n_left) + n_right * _gini(right, n_right)) / total
    gain = parent - children
    best = np.flatnonzero(gain >= gain.max() - 1e-12)[0]
    return int(candidates[best])


def cart_build(
    samples: np.ndarray,
    labels: np.ndarray,
    weights: Optional[np.ndarray] = None,
    params: Optional[CartParams] = None,
    n_classes: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> DecisionTree:
    """Grow a classification tree with greedy gini splits.

    A node becomes a leaf when it is pure, reaches ``max_depth``, holds fewer
    than ``min_split`` samples, or no split leaves ``min_leaf`` samples on
    both sides. Zero-gain splits are allowed so parity-like targets still fit.

    Args:
        samples: Binary matrix (n, d)
        labels: Class indices (n,)
        weights: Optional nonnegative sample weights
        params: Growth limits
        n_classes: Number of classes (defaults to max label + 1)
        rng: Generator for per-split feature subsampling

    Returns:
        Fitted tree
    """
    X = np.asarray(samples, dtype=np.uint8)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise SolverError("cart_build needs a nonempty 2-D sample matrix")
    if y.shape != (X.shape[0],):
        raise SolverError("labels must have one entry per sample")
    w = np.ones(X.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != y.shape or (w < 0).any() or not np.isfinite(w).all():
        raise SolverError("weights must be finite, nonnegative and one per sample")
    params = params or CartParams()
    n_classes = int(n_classes if n_classes is not None else y.max() + 1)

    onehot_all = np.zeros((X.shape[0], n_classes))
    onehot_all[np.arange(X.shape[0]), y] = w

    feature: List[int] = []
    left: List[int] = []
    right: List[int] = []
    value: List[np.ndarray] = []
    sizes: List[int] = []

    def new_node(indices: np.ndarray) -> int:
        dist = onehot_all[indices].sum(axis=0)
        total = dist.sum()
        feature.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(dist / total if total > 0 else np.full(n_classes, 1.0 / n_classes))
        sizes.append(int(indices.size))
        return len(feature) - 1

    root = new_node(np.arange(X.shape[0]))
    stack: List[Tuple[int, np.ndarray, int]] = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, indices, depth = stack.pop()
        if (value[node] > 0).sum() <= 1:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        if indices.size < params.min_split:
            continue

        split = _best_split(X[indices], onehot_all[indices], params, rng)
        if split is None:
            continue

        goes_right = X[indices, split] == 1
        left_node = new_node(indices[~goes_right])
        right_node = new_node(indices[goes_right])
        feature[node], left[node], right[node] = split, left_node, right_node
        # Right pushed first so the left subtree is numbered first
        stack.append((right_node, indices[goes_right], depth + 1))
        stack.append((left_node, indices[~goes_right], depth + 1))

    return DecisionTree(
        feature=np.array(feature, dtype=np.int64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.vstack(value),
        n_node_samples=np.array(sizes, dtype=np.int64),
    )


def cart_path_predicates(tree: DecisionTree, x: np.ndarray) -> List[Tuple[int, int]]:
    """Split conditions on ``x``'s root-to-leaf path as (feature, required bit).

    Conditions come in path order; a feature tested twice keeps only its
    deepest condition.
    """
    if tree.node_count == 0:
        raise SolverError("tree has no nodes")
    conditions: Dict[int, int] = {}
    for node in tree.path(x)[:-1]:
        f = int(tree.feature[node])
        conditions.pop(f, None)
        conditions[f] = int(x[f])
    return list(conditions.items())
