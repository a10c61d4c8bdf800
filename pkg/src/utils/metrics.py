"""Prometheus run telemetry for the benchmark harness."""

from pathlib import Path
from typing import Union

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Gauge,
    Histogram,
    write_to_textfile,
)

registry = CollectorRegistry()

explanations_generated = Counter(
    "xbench_explanations_total",
    "Total number of explanations generated",
    ["approach"],
    registry=registry,
)

degenerate_explanations = Counter(
    "xbench_degenerate_explanations_total",
    "Explanations flagged degenerate, non-anchored or fallback",
    ["approach", "flag"],
    registry=registry,
)

explanation_seconds = Histogram(
    "xbench_explanation_seconds",
    "Wall-clock seconds per explanation",
    ["approach"],
    buckets=[0.001, 0.01, 0.05, 0.1, 0.5, 1, 5, 10, 60, 300],
    registry=registry,
)

skipped_samples = Counter(
    "xbench_skipped_samples_total",
    "Samples skipped by a metric fold",
    ["metric"],
    registry=registry,
)

models_trained = Gauge(
    "xbench_models_trained", "Number of classifier models trained in this run", registry=registry
)


class MetricsExporter:
    """Record and export run telemetry."""

    @staticmethod
    def record_explanation(approach: str, elapsed: float, flags=()):
        """Record one finished explanation.

        Args:
            approach: Explainer tag
            elapsed: Wall-clock seconds spent
            flags: Quality flags carried by the explanation
        """
        explanations_generated.labels(approach=approach).inc()
        explanation_seconds.labels(approach=approach).observe(elapsed)
        for flag in flags:
            degenerate_explanations.labels(approach=approach, flag=flag).inc()

    @staticmethod
    def record_skipped(metric: str, count: int):
        """Record samples skipped by a metric."""
        if count > 0:
            skipped_samples.labels(metric=metric).inc(count)

    @staticmethod
    def set_models_trained(count: int):
        """Set the number of trained models."""
        models_trained.set(count)

    @staticmethod
    def write_textfile(path: Union[str, Path]):
        """Write metrics in Prometheus text format to a file."""
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_to_textfile(str(path), registry)


# Global metrics exporter
metrics_exporter = MetricsExporter()
