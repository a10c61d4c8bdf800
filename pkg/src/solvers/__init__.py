"""Numerical routines shared by the explainers."""

from .cart import CartParams, DecisionTree, cart_build, cart_path_predicates
from .mixture import MixtureRegressionModel, em_mixture_regression
from .regression import (
    LinearFit,
    RegressionProblem,
    lasso_cd,
    lasso_objective,
    weighted_least_squares,
)

__all__ = [
    "CartParams",
    "DecisionTree",
    "cart_build",
    "cart_path_predicates",
    "MixtureRegressionModel",
    "em_mixture_regression",
    "LinearFit",
    "RegressionProblem",
    "lasso_cd",
    "lasso_objective",
    "weighted_least_squares",
]
