"""Mixture-regression surrogate: explain with the component that owns x."""

import numpy as np
from loguru import logger

from ..solvers.mixture import em_mixture_regression
from ..solvers.regression import RegressionProblem
from .base import ExplainerKind, Explanation, LemnaParams, weighted_items
from .perturbation import SeedLike, one_vs_rest_target, perturb


def _integer_seed(seed: SeedLike) -> int:
    return int(np.random.default_rng(seed).integers(0, 2**31 - 1))


def explain_lemna(
    model, x: np.ndarray, params: LemnaParams, seed: SeedLike, sample_id: str = ""
) -> Explanation:
    """Fit M linear regressions by EM on the label-match indicator.

    Items are the coefficients of the component with the largest
    responsibility for (x, 1). A fit that loses components is redone with a
    single component and flagged ``em_fallback``.
    """
    x = np.asarray(x, dtype=np.uint8)
    label = model.predict(x)
    rng = np.random.default_rng(seed)
    pset = perturb(x, params.t, params.flip_prob, rng, sample_id)
    Z = np.vstack([x[None, :], pset.vectors])
    y = one_vs_rest_target(model, Z, label, use_votes=False)

    common = dict(
        approach=ExplainerKind.LEMNA,
        model_id=model.model_id,
        sample_id=sample_id,
        predicted_label=label,
    )
    if np.ptp(y) == 0:
        logger.warning(f"LEMNA target is constant around {sample_id or 'sample'}; empty explanation")
        return Explanation(**common, flags=("degenerate",))

    problem = RegressionProblem.unweighted(Z, y)
    fit_args = dict(
        tol=params.tol,
        max_iter=params.max_iter,
        seed=_integer_seed(rng),
        n_init=params.n_init,
        ridge=params.ridge,
        l1=params.l1,
    )
    mixture = em_mixture_regression(problem, M=params.M, **fit_args)
    flags: tuple = ()
    if mixture.collapsed:
        logger.warning(
            f"EM lost components {mixture.collapsed} for {sample_id or 'sample'}; "
            "falling back to one component"
        )
        mixture = em_mixture_regression(problem, M=1, **fit_args)
        flags = ("em_fallback",)

    component = int(np.argmax(mixture.responsibilities(x[None, :], np.array([1.0]))[0]))
    items = weighted_items(mixture.betas[component])
    if not items:
        flags = flags + ("degenerate",)
    return Explanation(
        **common,
        items=items,
        flags=flags,
        notes={
            "component": float(component),
            "theta": float(mixture.theta[component]),
            "log_likelihood": float(mixture.log_likelihood[-1]),
        },
    )
