"""Random bit-flip perturbations around a sample."""

from typing import Union

import numpy as np

from ..data.dataset import as_feature_vector
from ..utils.errors import ExplainerError
from .base import PerturbationSet

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

# Redraw rounds for perturbations that came out identical to x.
REDRAW_ROUNDS = 100


def perturb(
    x: np.ndarray, t: int, flip_prob: float, seed: SeedLike, sample_id: str = ""
) -> PerturbationSet:
    """Draw t vectors by flipping each bit of x independently with ``flip_prob``.

    x itself is excluded: rows equal to x are redrawn, and a row still equal
    after the redraw rounds gets one uniformly chosen bit flipped.

    Args:
        x: Binary feature vector
        t: Number of perturbations
        flip_prob: Per-bit flip probability in (0, 1)
        seed: Seed or generator
        sample_id: Id of the perturbed sample

    Returns:
        Unlabeled perturbation set
    """
    if t < 1:
        raise ExplainerError(f"t must be >= 1, got {t}")
    if not 0.0 < flip_prob < 1.0:
        raise ExplainerError(f"flip_prob must lie in (0, 1), got {flip_prob}")
    x = as_feature_vector(x)
    rng = np.random.default_rng(seed)
    d = x.shape[0]

    flips = rng.random((t, d)) < flip_prob
    for _ in range(REDRAW_ROUNDS):
        same = ~flips.any(axis=1)
        if not same.any():
            break
        flips[same] = rng.random((int(same.sum()), d)) < flip_prob
    same = np.flatnonzero(~flips.any(axis=1))
    if same.size:
        flips[same, rng.integers(0, d, size=same.size)] = True

    vectors = np.where(flips, 1 - x[None, :], x[None, :]).astype(np.uint8)
    return PerturbationSet(base_sample_id=sample_id, vectors=vectors)


def cosine_distance(x: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Cosine distance from x to every row of Z; an all-zero vector is at distance 1
    from anything but another all-zero vector."""
    x = np.asarray(x, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    norms = np.linalg.norm(Z, axis=1) * np.linalg.norm(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        similarity = np.where(norms > 0, (Z @ x) / norms, 0.0)
    both_zero = (np.linalg.norm(Z, axis=1) == 0) & (np.linalg.norm(x) == 0)
    return np.where(both_zero, 0.0, np.clip(1.0 - similarity, 0.0, 2.0))


def one_vs_rest_target(model, Z: np.ndarray, label: int, use_votes: bool) -> np.ndarray:
    """Numeric f(z) for surrogate fitting.

    Vote fractions for the explained label when requested and the model
    exposes them, otherwise the 0/1 indicator of agreeing with ``label``.
    """
    if use_votes and model.exposes_votes:
        return model.predict_proba(Z)[:, label].astype(np.float64)
    return (model.predict_batch(Z) == label).astype(np.float64)
