"""Robustness: same-label explanations alike, different-label ones apart."""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..utils.errors import MetricError
from ..utils.metrics import metrics_exporter
from .series import ClassRobustness, MetricSeries, RobustnessBreakdown
from .similarity import RankTable
from .stability import ExplanationsById, check_ks


def _cap(pool: np.ndarray, cap: int, rng: np.random.Generator) -> np.ndarray:
    if pool.size <= cap:
        return pool
    return np.sort(rng.choice(pool, size=cap, replace=False))


def robustness(
    explanations: ExplanationsById,
    k_values: Sequence[int],
    neighbor_cap: int = 200,
    seed: int = 0,
    approach: str = "",
    label_names: Optional[Sequence[str]] = None,
) -> Tuple[MetricSeries, Dict[int, RobustnessBreakdown]]:
    """Robustness of one approach on one model's test samples.

    For each sample, avgS is its mean dice with same-predicted-label samples
    (itself excluded) and avgD with different-label samples; each pool is
    subsampled to ``neighbor_cap`` when larger. rob = avgS - avgD, averaged
    over samples. Samples with an empty explanation, or with an empty pool,
    are skipped; empty explanations never enter a pool.

    Args:
        explanations: sample_id -> explanation under a single model
        k_values: Top-k sizes
        neighbor_cap: Largest pool size per sample
        seed: Seed for pool subsampling
        approach: Explainer tag recorded on the series
        label_names: Class names for the breakdown

    Returns:
        The series and a per-class breakdown for every k
    """
    ks = check_ks(k_values)
    if neighbor_cap < 1:
        raise MetricError(f"neighbor_cap must be >= 1, got {neighbor_cap}")
    model_ids = {e.model_id for e in explanations.values()}
    if len(model_ids) > 1:
        raise MetricError(f"robustness needs explanations from one model, got {sorted(model_ids)}")

    sample_ids = sorted(explanations)
    usable = [sid for sid in sample_ids if not explanations[sid].is_empty]
    table = RankTable([explanations[sid] for sid in usable])
    labels = np.array([explanations[sid].predicted_label for sid in usable], dtype=np.int64)
    ks_array = np.array(ks)

    scored: List[int] = []
    avg_same: List[np.ndarray] = []
    avg_diff: List[np.ndarray] = []
    skipped = [sid for sid in sample_ids if explanations[sid].is_empty]
    for i, sid in enumerate(usable):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        same = np.flatnonzero(labels == labels[i])
        same = same[same != i]
        diff = np.flatnonzero(labels != labels[i])
        if same.size == 0 or diff.size == 0:
            skipped.append(sid)
            continue
        same = _cap(same, neighbor_cap, rng)
        diff = _cap(diff, neighbor_cap, rng)
        scored.append(i)
        avg_same.append(table.dice(i, same, ks_array).mean(axis=0))
        avg_diff.append(table.dice(i, diff, ks_array).mean(axis=0))

    metrics_exporter.record_skipped("robustness", len(skipped))
    if not scored:
        raise MetricError(
            f"robustness of {approach}: every one of {len(sample_ids)} samples was skipped "
            "(a single predicted label leaves no different-label pool)"
        )
    if skipped:
        logger.warning(f"robustness of {approach}: skipped {len(skipped)} of {len(sample_ids)} samples")

    S = np.vstack(avg_same)
    D = np.vstack(avg_diff)
    R = S - D
    scored_ids = [usable[i] for i in scored]
    scored_labels = labels[scored]
    series = MetricSeries(
        metric="robustness",
        approach=approach,
        values={k: float(R[:, j].mean()) for j, k in enumerate(ks)},
        per_sample={k: dict(zip(scored_ids, R[:, j].tolist())) for j, k in enumerate(ks)},
        n_samples=len(scored),
        n_skipped=len(skipped),
        skipped=sorted(skipped),
    )

    breakdowns: Dict[int, RobustnessBreakdown] = {}
    for j, k in enumerate(ks):
        classes = []
        for label in np.unique(scored_labels):
            rows = scored_labels == label
            name = label_names[label] if label_names is not None else str(label)
            classes.append(
                ClassRobustness(
                    label=int(label),
                    name=name,
                    n=int(rows.sum()),
                    same=float(S[rows, j].mean()),
                    different=float(D[rows, j].mean()),
                )
            )
        breakdowns[k] = RobustnessBreakdown(approach=approach, k=k, classes=classes)
    return series, breakdowns
