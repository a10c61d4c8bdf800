"""Configuration management for benchmark experiments."""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from .data.synthetic import SyntheticSpec, planted_rule_spec
from .explainers.base import ExplainerKind, parse_kinds
from .explainers.registry import make_params
from .models.base import TrainConfig
from .models.training import FamilyVariation
from .utils.errors import ConfigError

COMMANDS = ("synth", "train", "explain", "metrics", "bench")


class DatasetSection(BaseModel):
    """Where samples come from: exactly one of csv, synthetic or synthetic_spec."""

    model_config = ConfigDict(extra="forbid")

    name: str = "planted"
    csv: Optional[str] = None
    sidecar: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    synthetic_spec: Optional[str] = None

    def sources(self) -> List[str]:
        return [s for s in ("csv", "synthetic", "synthetic_spec") if getattr(self, s) is not None]


class SplitSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    policy: Literal["per_class", "random"] = "per_class"
    train_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    seed: Optional[int] = None


class FamilySection(BaseModel):
    """Similar-model family: a base classifier and the knob that varies."""

    model_config = ConfigDict(extra="forbid")

    base: str = "rf"
    variation: FamilyVariation = Field(
        default_factory=lambda: FamilyVariation(rf_tree_counts=[98, 99, 100, 101])
    )


class ExplainerSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kinds: List[str] = Field(default_factory=lambda: [k.value for k in ExplainerKind])
    params: Dict[str, Dict[str, Any]] = Field(default_factory=dict)


def _default_classifiers() -> Dict[str, TrainConfig]:
    return {"rf": TrainConfig(algorithm="random_forest", hyperparams={"tree_count": 100})}


class ExperimentConfig(BaseSettings):
    """One benchmark experiment."""

    model_config = SettingsConfigDict(
        env_prefix="XBENCH_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    # Data
    dataset: DatasetSection = Field(default_factory=DatasetSection)
    split: SplitSection = Field(default_factory=SplitSection)

    # Models
    classifiers: Dict[str, TrainConfig] = Field(default_factory=_default_classifiers)
    family: FamilySection = Field(default_factory=FamilySection)
    base_model: str = Field(default="rf", description="Classifier scored for robustness/effectiveness")

    # Explainers and metrics
    explainers: ExplainerSection = Field(default_factory=ExplainerSection)
    k_min: int = Field(default=1, ge=1)
    k_max: int = Field(default=20, ge=1)
    effective_k: int = Field(default=5, ge=1)
    neighbor_cap: int = Field(default=200, ge=1)
    max_explain_samples: Optional[int] = Field(default=None, ge=1)
    cross_classifier: bool = True

    # Run
    seed: int = 0
    jobs: int = Field(default=1, ge=-1, description="Worker processes; -1 means one per CPU")
    output_dir: str = "out"
    bench_samples: int = Field(default=20, ge=0)

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None
    log_rotation: str = "100 MB"

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # Environment variables override values from the config file
        return env_settings, dotenv_settings, init_settings, file_secret_settings

    @property
    def k_values(self) -> List[int]:
        return list(range(self.k_min, self.k_max + 1))

    @property
    def explainer_kinds(self) -> List[ExplainerKind]:
        return parse_kinds(self.explainers.kinds)

    @property
    def split_seed(self) -> int:
        return self.split.seed if self.split.seed is not None else self.seed

    def synthetic_spec(self) -> Optional[SyntheticSpec]:
        """The inline or file-based synthetic spec, if any."""
        if self.dataset.synthetic is not None:
            return self.dataset.synthetic
        if self.dataset.synthetic_spec is not None:
            return SyntheticSpec.from_file(self.dataset.synthetic_spec)
        return None

    def explainer_params(self, kind: ExplainerKind):
        return make_params(kind, self.explainers.params.get(kind.value))

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with CLI overrides applied (None values are ignored)."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=updates)

    def validate_for(self, command: str, d: Optional[int] = None):
        """Check everything ``command`` needs, raising one error listing every problem.

        Args:
            command: CLI subcommand
            d: Feature count of the loaded dataset, when known
        """
        problems: List[str] = []
        if command not in COMMANDS:
            problems.append(f"unknown command '{command}'")

        sources = self.dataset.sources()
        if len(sources) != 1:
            problems.append(
                f"dataset needs exactly one of csv, synthetic, synthetic_spec (got {sources or 'none'})"
            )
        for label, path in (
            ("dataset.csv", self.dataset.csv),
            ("dataset.sidecar", self.dataset.sidecar),
            ("dataset.synthetic_spec", self.dataset.synthetic_spec),
        ):
            if path is not None and not Path(path).exists():
                problems.append(f"{label}: file not found: {path}")

        if command != "synth":
            if not self.classifiers:
                problems.append("at least one classifier is required")
            if self.base_model not in self.classifiers:
                problems.append(f"base_model '{self.base_model}' is not a configured classifier")
            if self.family.base not in self.classifiers:
                problems.append(f"family.base '{self.family.base}' is not a configured classifier")
            else:
                try:
                    self.family.variation.configs(self.classifiers[self.family.base])
                except ConfigError as e:
                    problems.extend(e.violations)

        if command in ("explain", "metrics", "bench"):
            if not self.explainers.kinds:
                problems.append("at least one explainer is required")
            try:
                for kind in self.explainer_kinds:
                    self.explainer_params(kind)
            except ConfigError as e:
                problems.extend(e.violations)
            if self.k_min > self.k_max:
                problems.append(f"k_min {self.k_min} exceeds k_max {self.k_max}")
            if d is not None and self.k_max > d:
                problems.append(f"k_max {self.k_max} exceeds the feature count {d}")
            if d is not None and self.effective_k > d:
                problems.append(f"effective_k {self.effective_k} exceeds the feature count {d}")
        if self.jobs == 0:
            problems.append("jobs must be >= 1 or -1")
        if command == "bench" and self.bench_samples < 1:
            problems.append("bench_samples must be >= 1")

        if problems:
            raise ConfigError(problems)


def _validation_problems(e: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()]


def load_config(config_path: Optional[str] = "config.yaml") -> ExperimentConfig:
    """Load an experiment from a YAML (or JSON) file and environment variables.

    Args:
        config_path: Path to the configuration file; None uses defaults only

    Returns:
        ExperimentConfig with loaded settings
    """
    raw: Dict[str, Any] = {}
    if config_path is not None:
        config_file = Path(config_path)
        if not config_file.exists():
            raise ConfigError(f"config file not found: {config_path}")
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {config_path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{config_path} must contain a mapping at the top level")

    try:
        return ExperimentConfig(**raw)
    except ValidationError as e:
        raise ConfigError(_validation_problems(e)) from e


def planted_rule_config(**overrides: Any) -> ExperimentConfig:
    """The default planted-rule experiment (d=50, n=4000, rule size 2)."""
    cfg = ExperimentConfig(dataset=DatasetSection(name="planted", synthetic=planted_rule_spec()))
    return cfg.model_copy(update=overrides)
