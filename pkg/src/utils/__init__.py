"""Utils package for common utilities."""

from .errors import (
    BenchmarkError,
    CacheError,
    ConfigError,
    DatasetError,
    DatasetLoadError,
    DimensionMismatchError,
    ExplainerError,
    FingerprintMismatchError,
    MetricError,
    ModelError,
    ModelFormatError,
    SingularSystemError,
    SolverError,
    SplitError,
)
from .logging import setup_logging
from .metrics import MetricsExporter, metrics_exporter

__all__ = [
    "BenchmarkError",
    "CacheError",
    "ConfigError",
    "DatasetError",
    "DatasetLoadError",
    "DimensionMismatchError",
    "ExplainerError",
    "FingerprintMismatchError",
    "MetricError",
    "ModelError",
    "ModelFormatError",
    "SingularSystemError",
    "SolverError",
    "SplitError",
    "setup_logging",
    "MetricsExporter",
    "metrics_exporter",
]
