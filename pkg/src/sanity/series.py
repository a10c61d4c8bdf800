"""Metric result records."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

METRICS = ("stability", "robustness", "effectiveness", "consistency")


@dataclass
class MetricSeries:
    """One metric's dataset values for every requested k.

    ``per_sample[k]`` maps sample ids to the per-sample term; skipped
    samples are absent and counted in ``n_skipped``.
    """

    metric: str
    approach: str
    values: Dict[int, float] = field(default_factory=dict)
    per_sample: Dict[int, Dict[str, float]] = field(default_factory=dict)
    n_samples: int = 0
    n_skipped: int = 0
    skipped: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric '{self.metric}'")

    @property
    def ks(self) -> List[int]:
        return sorted(self.values)

    def value(self, k: int) -> Optional[float]:
        return self.values.get(k)

    def to_rows(self, dataset: str, classifier: str) -> List[Dict[str, Any]]:
        """Rows in the metrics.csv layout."""
        return [
            {
                "metric": self.metric,
                "approach": self.approach,
                "dataset": dataset,
                "classifier": classifier,
                "k": k,
                "value": self.values[k],
                "n_samples": self.n_samples,
                "n_skipped": self.n_skipped,
            }
            for k in self.ks
        ]


@dataclass
class ClassRobustness:
    """Mean same-label and different-label similarity of one predicted class."""

    label: int
    name: str
    n: int
    same: float
    different: float

    @property
    def rob(self) -> float:
        return self.same - self.different

    def to_dict(self) -> Dict[str, Any]:
        return {
            "class": self.name,
            "n": self.n,
            "S": self.same,
            "D": self.different,
            "rob": self.rob,
        }


@dataclass
class RobustnessBreakdown:
    """Per-class robustness table of one approach at one k."""

    approach: str
    k: int
    classes: List[ClassRobustness] = field(default_factory=list)

    def for_label(self, label: int) -> Optional[ClassRobustness]:
        return next((c for c in self.classes if c.label == label), None)
