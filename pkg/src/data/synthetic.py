"""Planted-rule synthetic datasets with a known labeling oracle."""

from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..utils.errors import ConfigError
from .dataset import FeatureDictionary, LabeledDataset

# One planted conjunction: (feature index, required bit) pairs.
Conjunction = List[Tuple[int, int]]


class SyntheticSpec(BaseModel):
    """Recipe for a planted-rule dataset.

    ``rule_sets[c]`` is the conjunction that defines class ``c``. At most one
    class may have an empty conjunction; it is the default class, taken by
    every vector that satisfies no other class's rule.
    """

    model_config = ConfigDict(extra="forbid")

    d: int = Field(ge=1)
    n: int = Field(ge=1)
    rule_sets: List[Conjunction] = Field(min_length=2)
    noise_rate: float = Field(default=0.0, ge=0.0, lt=0.5)
    seed: int = 0
    class_names: Optional[List[str]] = None
    feature_prefix: str = "f"

    @model_validator(mode="after")
    def _check_rules(self) -> "SyntheticSpec":
        problems = []
        empty = [c for c, rule in enumerate(self.rule_sets) if not rule]
        if len(empty) > 1:
            problems.append(f"classes {empty} all have empty conjunctions")

        for c, rule in enumerate(self.rule_sets):
            required = {}
            for feature, bit in rule:
                if not 0 <= feature < self.d:
                    problems.append(f"class {c}: feature index {feature} outside [0, {self.d})")
                if bit not in (0, 1):
                    problems.append(f"class {c}: required bit {bit} is not 0 or 1")
                if feature in required and required[feature] != bit:
                    problems.append(f"class {c}: feature {feature} required both 0 and 1")
                required[feature] = bit

        # Two rules must never be satisfiable by the same vector only because
        # one implies the other: then exactly-one satisfaction is impossible.
        normalized = [dict(rule) for rule in self.rule_sets]
        for a, rule_a in enumerate(normalized):
            for b, rule_b in enumerate(normalized):
                if a == b or not rule_a or not rule_b:
                    continue
                if all(rule_a.get(f) == v for f, v in rule_b.items()):
                    problems.append(f"class {a}'s rule implies class {b}'s rule")

        if self.class_names is not None:
            if len(self.class_names) != len(self.rule_sets):
                problems.append("class_names must have one entry per rule set")
            elif len(set(self.class_names)) != len(self.class_names):
                problems.append("class_names must be distinct")

        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def labels(self) -> List[str]:
        """Class names, defaulting to class_0, class_1, ..."""
        return self.class_names or [f"class_{c}" for c in range(len(self.rule_sets))]

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SyntheticSpec":
        """Load a spec from a JSON (or YAML) file, listing every violation."""
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read synthetic spec {path}: {e}") from e
        return cls.parse(raw)

    @classmethod
    def parse(cls, raw: dict) -> "SyntheticSpec":
        """Validate a raw mapping, converting errors into ConfigError."""
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(
                [f"{'.'.join(str(p) for p in err['loc']) or 'spec'}: {err['msg']}" for err in e.errors()]
            ) from e


def planted_label(spec: SyntheticSpec, bits: np.ndarray) -> int:
    """Noise-free oracle label of one vector under the planted rules."""
    default = None
    for c, rule in enumerate(spec.rule_sets):
        if not rule:
            default = c
        elif all(bits[f] == v for f, v in rule):
            return c
    if default is None:
        raise ValueError("vector satisfies no planted rule and no default class exists")
    return default


def _break_rule(bits: np.ndarray, rule: Conjunction, keep: dict, rng: np.random.Generator) -> bool:
    """Flip one feature of ``rule`` not pinned by ``keep``; False if impossible."""
    free = [f for f, _ in rule if f not in keep]
    if not free:
        return False
    feature = free[int(rng.integers(len(free)))]
    bits[feature] = 1 - bits[feature]
    return True


def generate_synthetic(spec: SyntheticSpec) -> LabeledDataset:
    """Generate a planted-rule dataset.

    Every bit is drawn Bernoulli(0.5); then the sample's class rule is
    forced and every other class's rule is broken, so exactly one rule
    (or the default) holds. Labels flip to a uniform other class with
    probability ``noise_rate``.

    Args:
        spec: Validated synthetic spec

    Returns:
        Dataset, byte-identical for identical specs
    """
    rng = np.random.default_rng(spec.seed)
    n_classes = len(spec.rule_sets)
    samples = rng.integers(0, 2, size=(spec.n, spec.d), dtype=np.uint8)
    classes = rng.integers(0, n_classes, size=spec.n)
    rules = [dict(rule) for rule in spec.rule_sets]

    for i in range(spec.n):
        c = int(classes[i])
        for feature, bit in rules[c].items():
            samples[i, feature] = bit
        # Breaking one rule can re-satisfy another, so repeat until stable
        for _ in range(4 * n_classes):
            violated = [
                (other, rule)
                for other, rule in enumerate(spec.rule_sets)
                if other != c and rule and all(samples[i, f] == v for f, v in rule)
            ]
            if not violated:
                break
            for other, rule in violated:
                if not _break_rule(samples[i], rule, rules[c], rng):
                    raise ConfigError(f"class {c}'s rule cannot exclude class {other}'s rule")
        else:
            raise ConfigError(f"sample {i}: planted rules could not be made exclusive")

    labels = classes.astype(np.int64)
    if spec.noise_rate > 0:
        flip = rng.random(spec.n) < spec.noise_rate
        shift = rng.integers(1, n_classes, size=spec.n)
        labels = np.where(flip, (labels + shift) % n_classes, labels)

    dataset = LabeledDataset(
        dictionary=FeatureDictionary.synthetic(spec.d, prefix=spec.feature_prefix),
        samples=samples,
        labels=labels,
        label_names=tuple(spec.labels),
        sample_ids=tuple(f"s{i:06d}" for i in range(spec.n)),
    )
    logger.info(f"Generated synthetic dataset: {dataset.summary()}")
    return dataset


def planted_rule_spec(
    d: int = 50, n: int = 4000, rule_size: int = 2, noise_rate: float = 0.0, seed: int = 0
) -> SyntheticSpec:
    """Binary benign/malicious spec: malicious iff the first ``rule_size`` features are 1."""
    return SyntheticSpec(
        d=d,
        n=n,
        rule_sets=[[], [(j, 1) for j in range(rule_size)]],
        noise_rate=noise_rate,
        seed=seed,
        class_names=["benign", "malicious"],
    )
