"""Stability across a family of similar models."""

from itertools import combinations
from typing import List, Mapping, Sequence

import numpy as np
from loguru import logger

from ..explainers.base import Explanation
from ..utils.errors import MetricError
from ..utils.metrics import metrics_exporter
from .series import MetricSeries
from .similarity import RankTable

ExplanationsById = Mapping[str, Explanation]


def check_ks(k_values: Sequence[int]) -> List[int]:
    ks = sorted({int(k) for k in k_values})
    if not ks or ks[0] < 1:
        raise MetricError(f"k values must be >= 1, got {list(k_values)}")
    return ks


def group_dice_series(
    metric: str, approach: str, groups: Sequence[ExplanationsById], k_values: Sequence[int]
) -> MetricSeries:
    """Mean pairwise dice within each sample's group, averaged over samples.

    A sample is skipped when any group member lacks its explanation or has
    an empty one.
    """
    ks = check_ks(k_values)
    sample_ids = sorted(set().union(*(g.keys() for g in groups)))
    scored: List[str] = []
    skipped: List[str] = []
    rows: List[Explanation] = []
    for sid in sample_ids:
        members = [g.get(sid) for g in groups]
        if any(e is None or e.is_empty for e in members):
            skipped.append(sid)
            continue
        scored.append(sid)
        rows.extend(members)  # type: ignore[arg-type]

    metrics_exporter.record_skipped(metric, len(skipped))
    if not scored:
        raise MetricError(f"{metric} of {approach}: every one of {len(sample_ids)} samples was skipped")
    if skipped:
        logger.warning(f"{metric} of {approach}: skipped {len(skipped)} of {len(sample_ids)} samples")

    alpha = len(groups)
    table = RankTable(rows)
    pairs = list(combinations(range(alpha), 2))
    per_sample = np.zeros((len(scored), len(ks)))
    for s in range(len(scored)):
        base = s * alpha
        total = np.zeros(len(ks))
        for a, b in pairs:
            total += table.dice(base + a, np.array([base + b]), np.array(ks))[0]
        per_sample[s] = total / len(pairs)

    return MetricSeries(
        metric=metric,
        approach=approach,
        values={k: float(per_sample[:, j].mean()) for j, k in enumerate(ks)},
        per_sample={k: dict(zip(scored, per_sample[:, j].tolist())) for j, k in enumerate(ks)},
        n_samples=len(scored),
        n_skipped=len(skipped),
        skipped=skipped,
    )


def stability(
    family_explanations: Sequence[ExplanationsById], k_values: Sequence[int], approach: str = ""
) -> MetricSeries:
    """Stability of one approach across α similar models.

    Args:
        family_explanations: One mapping sample_id -> explanation per family member
        k_values: Top-k sizes to evaluate
        approach: Explainer tag recorded on the series

    Returns:
        Per-k mean over samples of the mean pairwise dice over model pairs
    """
    if len(family_explanations) < 2:
        raise MetricError(f"stability needs at least two models, got {len(family_explanations)}")
    return group_dice_series("stability", approach, family_explanations, k_values)
