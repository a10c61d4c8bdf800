"""Explanation records and explainer parameters."""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.errors import ConfigError, ExplainerError


class ExplainerKind(str, Enum):
    """The five explanation approaches."""

    LIME = "lime"
    ANCHOR = "anchor"
    LORE = "lore"
    SHAP = "shap"
    LEMNA = "lemna"

    @property
    def is_rule_based(self) -> bool:
        return self in (ExplainerKind.ANCHOR, ExplainerKind.LORE)


class Constraint(str, Enum):
    """How an explanation item constrains its feature."""

    EQUALS_ONE = "equals_one"
    EQUALS_ZERO = "equals_zero"
    WEIGHTED = "weighted"

    @classmethod
    def for_bit(cls, bit: int) -> "Constraint":
        return cls.EQUALS_ONE if int(bit) == 1 else cls.EQUALS_ZERO


@dataclass(frozen=True)
class ExplanationItem:
    """One feature of an explanation with its weight or rule score."""

    feature: int
    constraint: Constraint
    weight: float

    def __post_init__(self):
        if self.feature < 0:
            raise ExplainerError(f"negative feature index {self.feature}")
        if not np.isfinite(self.weight):
            raise ExplainerError(f"feature {self.feature} has non-finite weight")
        if self.constraint is not Constraint.WEIGHTED and self.weight < 0:
            raise ExplainerError(f"rule item for feature {self.feature} has negative score")

    def to_dict(self) -> Dict[str, Any]:
        return {"feature": self.feature, "constraint": self.constraint.value, "weight": self.weight}

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExplanationItem":
        return cls(
            feature=int(raw["feature"]),
            constraint=Constraint(raw["constraint"]),
            weight=float(raw["weight"]),
        )


def weighted_items(coef: np.ndarray, features: Optional[Sequence[int]] = None) -> Tuple[ExplanationItem, ...]:
    """Items from surrogate coefficients.

    Exactly-zero coefficients are dropped; the rest are ordered by |weight|
    descending, then feature index ascending.

    Args:
        coef: Coefficients
        features: Feature index of each coefficient (defaults to position)
    """
    coef = np.asarray(coef, dtype=np.float64)
    index = np.arange(coef.size) if features is None else np.asarray(features, dtype=np.int64)
    keep = coef != 0.0
    coef, index = coef[keep], index[keep]
    order = np.lexsort((index, -np.abs(coef)))
    return tuple(
        ExplanationItem(int(index[i]), Constraint.WEIGHTED, float(coef[i])) for i in order
    )


def rule_items(predicates: Sequence[Tuple[int, int]], scores: Sequence[float]) -> Tuple[ExplanationItem, ...]:
    """Items of a conjunctive rule, kept in predicate order."""
    return tuple(
        ExplanationItem(int(f), Constraint.for_bit(bit), float(s))
        for (f, bit), s in zip(predicates, scores)
    )


@dataclass(frozen=True)
class Explanation:
    """Ranked explanation e_i(g) of one sample under one model."""

    approach: ExplainerKind
    model_id: str
    sample_id: str
    predicted_label: int
    items: Tuple[ExplanationItem, ...] = ()
    elapsed: float = 0.0
    flags: Tuple[str, ...] = ()
    seed: int = 0
    params_hash: str = ""
    notes: Dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "approach", ExplainerKind(self.approach))
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "flags", tuple(self.flags))
        features = [item.feature for item in self.items]
        if len(set(features)) != len(features):
            raise ExplainerError(f"explanation of {self.sample_id} repeats a feature")
        weighted = [i for i in self.items if i.constraint is Constraint.WEIGHTED]
        keys = [(-abs(i.weight), i.feature) for i in weighted]
        if keys != sorted(keys):
            raise ExplainerError(f"weighted items of {self.sample_id} are not ranked")

    @property
    def is_empty(self) -> bool:
        return not self.items

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags

    def top_k(self, k: int) -> Tuple[ExplanationItem, ...]:
        """First k items; a shorter rule is used whole."""
        if k < 1:
            raise ExplainerError(f"k must be >= 1, got {k}")
        return self.items[:k]

    def top_features(self, k: int) -> frozenset:
        """Feature indices of the top-k items."""
        return frozenset(item.feature for item in self.top_k(k))

    def to_dict(self) -> Dict[str, Any]:
        """Cache record."""
        return {
            "sample_id": self.sample_id,
            "approach": self.approach.value,
            "model_id": self.model_id,
            "predicted_label": self.predicted_label,
            "items": [item.to_dict() for item in self.items],
            "elapsed_s": self.elapsed,
            "seed": self.seed,
            "params_hash": self.params_hash,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "Explanation":
        return cls(
            approach=ExplainerKind(raw["approach"]),
            model_id=str(raw["model_id"]),
            sample_id=str(raw["sample_id"]),
            predicted_label=int(raw["predicted_label"]),
            items=tuple(ExplanationItem.from_dict(item) for item in raw["items"]),
            elapsed=float(raw.get("elapsed_s", 0.0)),
            flags=tuple(raw.get("flags", ())),
            seed=int(raw.get("seed", 0)),
            params_hash=str(raw.get("params_hash", "")),
        )


@dataclass(frozen=True, eq=False)
class PerturbationSet:
    """Perturbations D(x) of one sample, optionally labeled by one model."""

    base_sample_id: str
    vectors: np.ndarray
    labels: Optional[np.ndarray] = None
    model_id: Optional[str] = None

    @property
    def t(self) -> int:
        return self.vectors.shape[0]

    def labeled(self, model) -> "PerturbationSet":
        """Copy labeled by ``model``'s predictions."""
        return PerturbationSet(
            base_sample_id=self.base_sample_id,
            vectors=self.vectors,
            labels=model.predict_batch(self.vectors),
            model_id=model.model_id,
        )


class ExplainerParams(BaseModel):
    """Common base: frozen, strict, hashable into the cache key."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    def fingerprint(self) -> str:
        """Short stable hash of the parameter values."""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


class LimeParams(ExplainerParams):
    t: int = Field(default=1000, ge=10)
    flip_prob: float = Field(default=0.1, gt=0.0, lt=1.0)
    kernel_width: float = Field(default=0.25, gt=0.0)
    lam: float = Field(default=1e-3, ge=0.0)
    proximity: Literal["exponential", "cosine"] = "exponential"
    max_iter: int = Field(default=1000, ge=1)


class ShapParams(ExplainerParams):
    coalition_count: int = Field(default=2048, ge=1)
    reference: Optional[List[int]] = None
    ridge: float = Field(default=0.0, ge=0.0)

    def reference_vector(self, d: int) -> np.ndarray:
        """Masking reference, all zeros unless configured."""
        if self.reference is None:
            return np.zeros(d, dtype=np.uint8)
        if len(self.reference) != d or any(b not in (0, 1) for b in self.reference):
            raise ExplainerError(f"reference must be a binary vector of length {d}")
        return np.asarray(self.reference, dtype=np.uint8)


class LemnaParams(ExplainerParams):
    t: int = Field(default=1000, ge=10)
    flip_prob: float = Field(default=0.1, gt=0.0, lt=1.0)
    M: int = Field(default=3, ge=1)
    tol: float = Field(default=1e-6, gt=0.0)
    max_iter: int = Field(default=200, ge=1)
    n_init: int = Field(default=3, ge=1)
    ridge: float = Field(default=1e-6, ge=0.0)
    l1: float = Field(default=0.0, ge=0.0)


class AnchorParams(ExplainerParams):
    precision_threshold: float = Field(default=0.95, gt=0.0, lt=1.0)
    delta: float = Field(default=0.05, gt=0.0, lt=1.0)
    beam_width: int = Field(default=2, ge=1)
    batch_size: int = Field(default=100, ge=1)
    max_samples_per_candidate: int = Field(default=1000, ge=1)
    coverage_samples: int = Field(default=1000, ge=1)
    max_anchor_size: Optional[int] = Field(default=10, ge=1)
    resample_prob: float = Field(default=1.0, gt=0.0, le=1.0)


class LoreParams(ExplainerParams):
    population_size: int = Field(default=100, ge=2)
    generations: int = Field(default=20, ge=1)
    crossover_rate: float = Field(default=0.5, ge=0.0, le=1.0)
    mutation_rate: float = Field(default=0.2, ge=0.0, le=1.0)
    bit_flip_prob: float = Field(default=0.1, gt=0.0, lt=1.0)
    tournament_size: int = Field(default=3, ge=1)
    max_depth: Optional[int] = Field(default=None, ge=1)
    min_leaf: int = Field(default=1, ge=1)


PARAMS_BY_KIND = {
    ExplainerKind.LIME: LimeParams,
    ExplainerKind.SHAP: ShapParams,
    ExplainerKind.LEMNA: LemnaParams,
    ExplainerKind.ANCHOR: AnchorParams,
    ExplainerKind.LORE: LoreParams,
}


def parse_kinds(names: Iterable[str]) -> List[ExplainerKind]:
    """Explainer tags to kinds, rejecting unknown names."""
    kinds, unknown = [], []
    for name in names:
        try:
            kinds.append(ExplainerKind(str(name).lower()))
        except ValueError:
            unknown.append(str(name))
    if unknown:
        valid = ", ".join(k.value for k in ExplainerKind)
        raise ConfigError([f"unknown explainer '{u}' (expected one of: {valid})" for u in unknown])
    return kinds
