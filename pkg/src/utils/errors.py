"""Exception hierarchy for the benchmark."""

from typing import Iterable, List, Optional


class BenchmarkError(Exception):
    """Base class for every error raised by the benchmark."""

    #: CLI exit code for this error family.
    exit_code = 2


class ConfigError(BenchmarkError):
    """Invalid configuration; carries every violation found."""

    exit_code = 1

    def __init__(self, violations: Iterable[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations: List[str] = list(violations)
        super().__init__("; ".join(self.violations))


class DatasetError(BenchmarkError):
    """Invalid dataset contents or shape."""

    exit_code = 1


class DatasetLoadError(DatasetError):
    """A dataset file could not be parsed."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class SplitError(DatasetError):
    """A train/test split is degenerate."""


class ModelError(BenchmarkError):
    """Training or querying a classifier failed."""


class DimensionMismatchError(ModelError):
    """Input length does not match the model's feature dictionary."""

    exit_code = 1


class ModelFormatError(ModelError):
    """A model file is corrupt, truncated or of another format version."""

    exit_code = 1


class FingerprintMismatchError(ModelError):
    """A model was trained on another feature dictionary than the dataset's."""

    exit_code = 1


class SolverError(BenchmarkError):
    """A numerical routine received invalid input."""


class SingularSystemError(SolverError):
    """Normal equations are singular."""


class ExplainerError(BenchmarkError):
    """An explainer could not run with the given inputs."""


class MetricError(BenchmarkError):
    """A metric could not be computed."""

    exit_code = 1


class CacheError(BenchmarkError):
    """The explanation cache is missing entries or is unreadable."""

    exit_code = 1
