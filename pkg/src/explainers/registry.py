"""Dispatch from explainer kind to implementation."""

import dataclasses
import time
import zlib
from typing import Any, Callable, Dict, Mapping, Optional, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..utils.errors import ConfigError
from .anchor import explain_anchor
from .base import PARAMS_BY_KIND, ExplainerKind, ExplainerParams, Explanation
from .lemna import explain_lemna
from .lime import explain_lime
from .lore import explain_lore
from .shap import explain_shap

EXPLAINERS: Dict[ExplainerKind, Callable[..., Explanation]] = {
    ExplainerKind.LIME: explain_lime,
    ExplainerKind.SHAP: explain_shap,
    ExplainerKind.LEMNA: explain_lemna,
    ExplainerKind.ANCHOR: explain_anchor,
    ExplainerKind.LORE: explain_lore,
}


def make_params(
    kind: Union[ExplainerKind, str], raw: Optional[Mapping[str, Any]] = None
) -> ExplainerParams:
    """Validated parameters for one explainer kind."""
    kind = ExplainerKind(kind)
    try:
        return PARAMS_BY_KIND[kind].model_validate(dict(raw or {}))
    except ValidationError as e:
        raise ConfigError(
            [f"{kind.value}.{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        ) from e


def explain(
    kind: Union[ExplainerKind, str],
    model,
    x: np.ndarray,
    params: Optional[ExplainerParams] = None,
    seed: int = 0,
    sample_id: str = "",
) -> Explanation:
    """Explain one sample with one approach, recording wall-clock time.

    Args:
        kind: Explainer kind
        model: Black-box model
        x: Feature vector
        params: Parameters for ``kind`` (defaults when omitted)
        seed: Integer seed for this sample
        sample_id: Id recorded on the explanation

    Returns:
        Explanation with elapsed seconds, seed and params hash filled in
    """
    kind = ExplainerKind(kind)
    params = params if params is not None else make_params(kind)
    if not isinstance(params, PARAMS_BY_KIND[kind]):
        raise ConfigError(f"{type(params).__name__} given for explainer {kind.value}")

    started = time.perf_counter()
    explanation = EXPLAINERS[kind](model, x, params, seed, sample_id)
    elapsed = time.perf_counter() - started

    logger.debug(
        f"{kind.value} explained {sample_id or 'sample'} with {len(explanation.items)} items "
        f"in {elapsed:.3f}s"
    )
    return dataclasses.replace(
        explanation, elapsed=elapsed, seed=seed, params_hash=params.fingerprint()
    )


def sample_seed(seed: int, sample_id: str, model_id: str = "") -> int:
    """Per-(model, sample) integer seed, independent of evaluation order.

    Family members get different seeds for the same sample, so each draws
    its own perturbations and stability includes the surrogate's variance.
    """
    sequence = np.random.SeedSequence(
        [seed, zlib.crc32(sample_id.encode("utf-8")), zlib.crc32(model_id.encode("utf-8"))]
    )
    return int(sequence.generate_state(1)[0])
