"""The five explanation approaches and their shared records."""

from .anchor import explain_anchor, rule_precision
from .base import (
    PARAMS_BY_KIND,
    AnchorParams,
    Constraint,
    ExplainerKind,
    ExplainerParams,
    Explanation,
    ExplanationItem,
    LemnaParams,
    LimeParams,
    LoreParams,
    PerturbationSet,
    ShapParams,
    parse_kinds,
    rule_items,
    weighted_items,
)
from .cache import ExplanationCache
from .lemna import explain_lemna
from .lime import explain_lime
from .lore import explain_lore, lore_fitness
from .perturbation import perturb
from .registry import EXPLAINERS, explain, make_params, sample_seed
from .shap import exact_shapley, explain_shap, kernel_shap_values

__all__ = [
    "PARAMS_BY_KIND",
    "AnchorParams",
    "Constraint",
    "ExplainerKind",
    "ExplainerParams",
    "Explanation",
    "ExplanationItem",
    "LemnaParams",
    "LimeParams",
    "LoreParams",
    "PerturbationSet",
    "ShapParams",
    "parse_kinds",
    "rule_items",
    "weighted_items",
    "ExplanationCache",
    "EXPLAINERS",
    "explain",
    "make_params",
    "sample_seed",
    "explain_anchor",
    "rule_precision",
    "explain_lemna",
    "explain_lime",
    "explain_lore",
    "lore_fitness",
    "perturb",
    "exact_shapley",
    "explain_shap",
    "kernel_shap_values",
]
