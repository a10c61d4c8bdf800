"""Sanity metrics computed from cached explanations."""

from .consistency import consistency
from .effectiveness import effective_feature_weights, effectiveness, mutate
from .robustness import robustness
from .series import METRICS, ClassRobustness, MetricSeries, RobustnessBreakdown
from .similarity import RankTable, dice_similarity
from .stability import stability

__all__ = [
    "consistency",
    "effective_feature_weights",
    "effectiveness",
    "mutate",
    "robustness",
    "METRICS",
    "ClassRobustness",
    "MetricSeries",
    "RobustnessBreakdown",
    "RankTable",
    "dice_similarity",
    "stability",
]
