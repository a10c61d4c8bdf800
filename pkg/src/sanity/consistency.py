"""Agreement between different approaches on the same model."""

from typing import Mapping, Sequence

from ..utils.errors import MetricError
from .series import MetricSeries
from .stability import ExplanationsById, group_dice_series


def consistency(
    per_approach: Mapping[str, ExplanationsById], k_values: Sequence[int]
) -> MetricSeries:
    """Mean pairwise dice among approaches per sample, averaged over samples."""
    if len(per_approach) < 2:
        raise MetricError(f"consistency needs at least two approaches, got {len(per_approach)}")
    names = sorted(per_approach)
    return group_dice_series(
        "consistency", "+".join(names), [per_approach[n] for n in names], k_values
    )
