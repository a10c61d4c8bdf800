"""Multilayer perceptron trained by plain mini-batch gradient descent."""

from typing import Dict, List

import numpy as np
from scipy.special import expit, softmax

from .base import MlpParams

ACTIVATIONS = {
    "relu": (lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(np.float64)),
    "tanh": (np.tanh, lambda z, a: 1.0 - a**2),
    "logistic": (expit, lambda z, a: a * (1.0 - a)),
}


class MultilayerPerceptron:
    """Fully connected network with a softmax output and cross-entropy loss."""

    def __init__(self, weights: List[np.ndarray], biases: List[np.ndarray], activation: str):
        self.weights = weights
        self.biases = biases
        self.activation = activation
        self.n_classes = weights[-1].shape[1]

    def _forward(self, X: np.ndarray):
        act, _ = ACTIVATIONS[self.activation]
        pre, post = [], [X]
        h = X
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            z = h @ W + b
            h = act(z)
            pre.append(z)
            post.append(h)
        logits = h @ self.weights[-1] + self.biases[-1]
        return pre, post, softmax(logits, axis=1)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self._forward(np.asarray(X, dtype=np.float64))[2]

    @classmethod
    def fit(
        cls, X: np.ndarray, y: np.ndarray, n_classes: int, params: MlpParams, seed: int
    ) -> "MultilayerPerceptron":
        """Train for ``max_iterations`` epochs of shuffled mini-batches.

        Args:
            X: Binary training matrix
            y: Class indices
            n_classes: Number of classes
            params: MLP hyperparameters
            seed: RNG seed for initialization and shuffling

        Returns:
            Trained network
        """
        rng = np.random.default_rng(seed)
        X = np.asarray(X, dtype=np.float64)
        n, d = X.shape
        sizes = [d] + [params.neurons_per_layer] * params.hidden_layers + [n_classes]
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            # He initialization for relu, Glorot otherwise
            scale = np.sqrt(2.0 / fan_in) if params.activation == "relu" else np.sqrt(1.0 / fan_in)
            weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        net = cls(weights, biases, params.activation)
        _, derivative = ACTIVATIONS[params.activation]

        targets = np.zeros((n, n_classes))
        targets[np.arange(n), y] = 1.0
        batch = min(params.batch_size, n)
        for _ in range(params.max_iterations):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                rows = order[start : start + batch]
                pre, post, proba = net._forward(X[rows])
                delta = (proba - targets[rows]) / rows.size
                for layer in range(len(weights) - 1, -1, -1):
                    grad_W = post[layer].T @ delta
                    grad_b = delta.sum(axis=0)
                    if layer > 0:
                        delta = (delta @ weights[layer].T) * derivative(pre[layer - 1], post[layer])
                    weights[layer] -= params.learning_rate * grad_W
                    biases[layer] -= params.learning_rate * grad_b
        return net

    def to_arrays(self) -> Dict[str, np.ndarray]:
        arrays: Dict[str, np.ndarray] = {}
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"W{i}"] = W
            arrays[f"b{i}"] = b
        arrays["activation"] = np.array([self.activation])
        return arrays

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "MultilayerPerceptron":
        layers = sum(1 for name in arrays if name.startswith("W"))
        return cls(
            [np.asarray(arrays[f"W{i}"], dtype=np.float64) for i in range(layers)],
            [np.asarray(arrays[f"b{i}"], dtype=np.float64) for i in range(layers)],
            str(arrays["activation"][0]),
        )
