"""Kernel SHAP and exact Shapley values by enumeration."""

from itertools import combinations
from math import factorial
from typing import Optional

import numpy as np
from scipy.special import comb

from ..solvers.regression import RegressionProblem, weighted_least_squares
from ..utils.errors import ExplainerError
from .base import ExplainerKind, Explanation, ShapParams, weighted_items
from .perturbation import SeedLike

EXACT_MAX_FEATURES = 20
# Full enumeration is used only up to this many varying features.
ENUMERATION_MAX_FEATURES = 30


def shapley_kernel(m: int, size: np.ndarray) -> np.ndarray:
    """Kernel weight (m-1) / (C(m,s) s (m-s)) of coalitions of the given sizes."""
    size = np.asarray(size, dtype=np.float64)
    return (m - 1) / (comb(m, size) * size * (m - size))


def _score(model, X: np.ndarray, label: int) -> np.ndarray:
    return model.predict_proba(X)[:, label].astype(np.float64)


def _enumerate_coalitions(m: int):
    masks = []
    weights = []
    for s in range(1, m):
        w = float(shapley_kernel(m, np.array([s]))[0])
        for chosen in combinations(range(m), s):
            z = np.zeros(m, dtype=np.uint8)
            z[list(chosen)] = 1
            masks.append(z)
            weights.append(w)
    return np.array(masks), np.array(weights)


def _sample_coalitions(m: int, count: int, rng: np.random.Generator):
    """Paired sampling: sizes drawn proportional to total kernel mass, each
    subset followed by its complement; every draw carries unit weight."""
    sizes = np.arange(1, m)
    mass = 1.0 / (sizes * (m - sizes))
    mass /= mass.sum()
    pairs = (count + 1) // 2
    drawn = rng.choice(sizes, size=pairs, p=mass)
    masks = np.zeros((2 * pairs, m), dtype=np.uint8)
    for i, s in enumerate(drawn):
        chosen = rng.choice(m, size=s, replace=False)
        masks[2 * i, chosen] = 1
        masks[2 * i + 1] = 1 - masks[2 * i]
    masks = masks[:count]
    return masks, np.ones(masks.shape[0])


def kernel_shap_values(
    model, x: np.ndarray, reference: np.ndarray, coalition_count: int, rng: np.random.Generator,
    ridge: float = 0.0, label: Optional[int] = None,
) -> np.ndarray:
    """Kernel SHAP attributions for ``label`` (default: x's predicted label).

    Features where x equals the reference are null players and get 0.
    The efficiency constraint is enforced by eliminating the last varying
    feature before the weighted least-squares solve.
    """
    x = np.asarray(x, dtype=np.uint8)
    reference = np.asarray(reference, dtype=np.uint8)
    label = model.predict(x) if label is None else label
    d = x.shape[0]
    varying = np.flatnonzero(x != reference)
    m = varying.size
    phi = np.zeros(d)
    if m == 0:
        return phi

    f_x, f_ref = _score(model, np.vstack([x, reference]), label)
    delta = f_x - f_ref
    if m == 1:
        phi[varying[0]] = delta
        return phi

    full = (2**m - 2) if m <= ENUMERATION_MAX_FEATURES else None
    if full is not None and coalition_count >= full:
        masks, weights = _enumerate_coalitions(m)
    else:
        if coalition_count < m + 2:
            raise ExplainerError(
                f"{coalition_count} coalitions under-determine {m} attributions; need at least {m + 2}"
            )
        masks, weights = _sample_coalitions(m, coalition_count, rng)

    masked = np.tile(reference, (masks.shape[0], 1))
    masked[:, varying] = np.where(masks == 1, x[varying][None, :], reference[varying][None, :])
    y = _score(model, masked, label) - f_ref

    # sum(phi) = delta: substitute phi_last = delta - sum(others)
    last = masks[:, -1].astype(np.float64)
    design = masks[:, :-1].astype(np.float64) - last[:, None]
    target = y - last * delta
    fit = weighted_least_squares(
        RegressionProblem(X=design, y=target, weights=weights), ridge=ridge, fit_intercept=False
    )
    phi[varying[:-1]] = fit.coef
    phi[varying[-1]] = delta - fit.coef.sum()
    return phi


def explain_shap(
    model, x: np.ndarray, params: ShapParams, seed: SeedLike, sample_id: str = ""
) -> Explanation:
    """Kernel SHAP explanation against the configured reference vector."""
    x = np.asarray(x, dtype=np.uint8)
    label = model.predict(x)
    reference = params.reference_vector(x.shape[0])
    rng = np.random.default_rng(seed)
    phi = kernel_shap_values(model, x, reference, params.coalition_count, rng, params.ridge, label)
    items = weighted_items(phi)
    return Explanation(
        approach=ExplainerKind.SHAP,
        model_id=model.model_id,
        sample_id=sample_id,
        predicted_label=label,
        items=items,
        flags=() if items else ("degenerate",),
        notes={"attribution_sum": float(phi.sum())},
    )


def exact_shapley(
    model, x: np.ndarray, reference: np.ndarray, label: Optional[int] = None
) -> np.ndarray:
    """Exact Shapley values of the masked-input game by full subset enumeration.

    Args:
        model: Model with ``predict_proba``
        x: Explained vector
        reference: Values used for absent features
        label: Class whose score is attributed (default: x's predicted label)

    Returns:
        Per-feature Shapley values
    """
    x = np.asarray(x, dtype=np.uint8)
    reference = np.asarray(reference, dtype=np.uint8)
    d = x.shape[0]
    if d > EXACT_MAX_FEATURES:
        raise ExplainerError(f"exact Shapley enumeration supports d <= {EXACT_MAX_FEATURES}, got {d}")
    label = model.predict(x) if label is None else label

    codes = np.arange(2**d, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(d)[None, :]) & 1).astype(np.uint8)
    values = _score(model, np.where(bits == 1, x[None, :], reference[None, :]), label)
    sizes = bits.sum(axis=1)
    coef = np.array([factorial(s) * factorial(d - s - 1) / factorial(d) for s in range(d)])

    phi = np.zeros(d)
    for j in range(d):
        without = codes[bits[:, j] == 0]
        gain = values[without | (1 << j)] - values[without]
        phi[j] = float(coef[sizes[without]] @ gain)
    return phi
