"""Local sparse linear surrogate over random perturbations."""

import numpy as np
from loguru import logger

from ..solvers.regression import RegressionProblem, lasso_cd
from .base import ExplainerKind, Explanation, LimeParams, weighted_items
from .perturbation import SeedLike, cosine_distance, one_vs_rest_target, perturb


def proximity_weights(x: np.ndarray, Z: np.ndarray, params: LimeParams) -> np.ndarray:
    """Sample weights from cosine distance to x."""
    dist = cosine_distance(x, Z)
    if params.proximity == "cosine":
        return 1.0 - np.clip(dist, 0.0, 1.0)
    return np.exp(-(dist**2) / params.kernel_width**2)


def explain_lime(
    model, x: np.ndarray, params: LimeParams, seed: SeedLike, sample_id: str = ""
) -> Explanation:
    """Lasso surrogate weighted by proximity to x.

    The design holds x plus t perturbations; the target is the one-vs-rest
    score of x's predicted label.
    """
    x = np.asarray(x, dtype=np.uint8)
    label = model.predict(x)
    pset = perturb(x, params.t, params.flip_prob, seed, sample_id)
    Z = np.vstack([x[None, :], pset.vectors])
    y = one_vs_rest_target(model, Z, label, use_votes=True)
    weights = proximity_weights(x, Z, params)

    common = dict(
        approach=ExplainerKind.LIME,
        model_id=model.model_id,
        sample_id=sample_id,
        predicted_label=label,
    )
    if np.ptp(y) == 0:
        logger.warning(f"LIME target is constant around {sample_id or 'sample'}; empty explanation")
        return Explanation(**common, flags=("degenerate",))

    fit = lasso_cd(RegressionProblem(X=Z, y=y, weights=weights), params.lam, max_iter=params.max_iter)
    items = weighted_items(fit.coef)
    flags = () if items else ("degenerate",)
    return Explanation(**common, items=items, flags=flags, notes={"intercept": fit.intercept})
