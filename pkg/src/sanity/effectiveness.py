"""Effectiveness: does removing the explained features change the prediction?"""

from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from loguru import logger

from ..explainers.base import Constraint, Explanation
from ..utils.errors import MetricError
from ..utils.metrics import metrics_exporter
from .series import MetricSeries
from .stability import ExplanationsById, check_ks


def mutate(x: np.ndarray, e: Explanation, k: int) -> np.ndarray:
    """Copy of x contradicting e's top-k items.

    Weighted items flip the bit, ``equals_one`` items set it to 0 and
    ``equals_zero`` items set it to 1.
    """
    mutated = np.array(x, dtype=np.uint8, copy=True)
    if e.is_empty:
        return mutated
    for item in e.top_k(k):
        if item.constraint is Constraint.WEIGHTED:
            mutated[item.feature] = 1 - mutated[item.feature]
        elif item.constraint is Constraint.EQUALS_ONE:
            mutated[item.feature] = 0
        else:
            mutated[item.feature] = 1
    return mutated


def effectiveness(
    model,
    samples: Mapping[str, np.ndarray],
    explanations: ExplanationsById,
    k_values: Sequence[int],
    approach: str = "",
) -> MetricSeries:
    """Fraction of samples whose prediction changes after mutation.

    Args:
        model: The model the explanations were produced against
        samples: sample_id -> feature vector
        explanations: sample_id -> explanation
        k_values: Top-k sizes
        approach: Explainer tag recorded on the series

    Returns:
        Per-k mean of the 0/1 flip indicator
    """
    ks = check_ks(k_values)
    scored, skipped, X, E = _collect(model, samples, explanations)
    if not scored:
        raise MetricError(f"effectiveness of {approach}: every sample was skipped")

    original = model.predict_batch(X)
    values: Dict[int, float] = {}
    per_sample: Dict[int, Dict[str, float]] = {}
    for k in ks:
        mutated = np.vstack([mutate(x, e, k) for x, e in zip(X, E)])
        flipped = (model.predict_batch(mutated) != original).astype(np.float64)
        values[k] = float(flipped.mean())
        per_sample[k] = dict(zip(scored, flipped.tolist()))

    return MetricSeries(
        metric="effectiveness",
        approach=approach,
        values=values,
        per_sample=per_sample,
        n_samples=len(scored),
        n_skipped=len(skipped),
        skipped=skipped,
    )


def effective_feature_weights(
    model,
    samples: Mapping[str, np.ndarray],
    explanations: ExplanationsById,
    k: int,
) -> Dict[int, float]:
    """Share of scored samples whose minimal flipping prefix holds each feature.

    For a sample whose full top-k mutation changes the prediction, the
    minimal prefix is the shortest leading run of items whose mutation
    already does; its features count as effective.
    """
    scored, _, X, E = _collect(model, samples, explanations, record=False)
    if not scored:
        raise MetricError("effective-feature weights: every sample was skipped")
    original = model.predict_batch(X)
    counts: Dict[int, int] = {}
    for x, e, label in zip(X, E, original):
        items = e.top_k(k)
        prefixes = np.vstack([mutate(x, e, p) for p in range(1, len(items) + 1)])
        changed = np.flatnonzero(model.predict_batch(prefixes) != label)
        if changed.size == 0 or changed[-1] != len(items) - 1:
            continue
        for item in items[: int(changed[0]) + 1]:
            counts[item.feature] = counts.get(item.feature, 0) + 1
    weights = {f: c / len(scored) for f, c in counts.items()}
    return dict(sorted(weights.items(), key=lambda fw: (-fw[1], fw[0])))


def _collect(
    model, samples: Mapping[str, np.ndarray], explanations: ExplanationsById, record: bool = True
) -> Tuple[List[str], List[str], np.ndarray, List[Explanation]]:
    scored: List[str] = []
    skipped: List[str] = []
    rows = []
    chosen: List[Explanation] = []
    for sid in sorted(explanations):
        e = explanations[sid]
        if e.model_id != model.model_id:
            raise MetricError(
                f"explanation of {sid} was produced for model {e.model_id}, not {model.model_id}"
            )
        if e.is_empty or sid not in samples:
            skipped.append(sid)
            continue
        scored.append(sid)
        rows.append(np.asarray(samples[sid], dtype=np.uint8))
        chosen.append(e)
    if record and skipped:
        metrics_exporter.record_skipped("effectiveness", len(skipped))
        logger.warning(f"effectiveness: skipped {len(skipped)} of {len(explanations)} samples")
    X = np.vstack(rows) if rows else np.zeros((0, model.n_features), dtype=np.uint8)
    return scored, skipped, X, chosen
