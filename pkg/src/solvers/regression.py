"""Weighted linear surrogate fitting: lasso by coordinate descent and WLS."""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import linalg

from ..utils.errors import SingularSystemError, SolverError


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """Design matrix, targets and nonnegative sample weights."""

    X: np.ndarray
    y: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if X.ndim != 2:
            raise SolverError(f"design matrix must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],) or w.shape != (X.shape[0],):
            raise SolverError(
                f"inconsistent dimensions: X {X.shape}, y {y.shape}, weights {w.shape}"
            )
        if not (np.isfinite(X).all() and np.isfinite(y).all() and np.isfinite(w).all()):
            raise SolverError("regression inputs must be finite")
        if (w < 0).any() or not (w > 0).any():
            raise SolverError("weights must be nonnegative and not all zero")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "weights", w)

    @classmethod
    def unweighted(cls, X: np.ndarray, y: np.ndarray) -> "RegressionProblem":
        """Problem with unit weights."""
        return cls(X=X, y=y, weights=np.ones(np.asarray(X).shape[0]))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def reweighted(self, weights: np.ndarray) -> "RegressionProblem":
        """Same design and targets with new weights."""
        return RegressionProblem(X=self.X, y=self.y, weights=weights)

    def centered(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
        """Normalized weights and weighted-mean-centered design and targets."""
        w = self.weights / self.weights.sum()
        x_mean = w @ self.X
        y_mean = float(w @ self.y)
        return w, self.X - x_mean, self.y - y_mean, x_mean, y_mean


@dataclass
class LinearFit:
    """Linear model ``y ~ intercept + X @ coef``."""

    coef: np.ndarray
    intercept: float
    n_iter: int = 0
    converged: bool = True
    objective_history: List[float] = field(default_factory=list)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predictions for the rows of ``X``."""
        return np.asarray(X, dtype=np.float64) @ self.coef + self.intercept


def lasso_objective(problem: RegressionProblem, fit: LinearFit, lam: float) -> float:
    """Weighted lasso objective: 1/2 sum(w_i r_i^2) / sum(w) + lam * |coef|_1."""
    w = problem.weights / problem.weights.sum()
    residual = problem.y - fit.predict(problem.X)
    return 0.5 * float(w @ residual**2) + lam * float(np.abs(fit.coef).sum())


def lasso_cd(
    problem: RegressionProblem,
    lam: float,
    tol: float = 1e-6,
    max_iter: int = 1000,
    track_objective: bool = False,
) -> LinearFit:
    """Weighted lasso by cyclic coordinate descent.

    The intercept is fitted and never penalized: coordinates run on the
    weighted-mean-centered problem and the intercept is recovered at the
    end. With ``lam == 0`` this converges to weighted least squares.

    Args:
        problem: Regression problem
        lam: L1 penalty, nonnegative
        tol: Stop when the largest coefficient change in a sweep is below this
        max_iter: Maximum number of sweeps
        track_objective: Record the objective after every sweep

    Returns:
        Fitted coefficients and intercept
    """
    if lam < 0:
        raise SolverError(f"lambda must be nonnegative, got {lam}")
    if tol <= 0:
        raise SolverError(f"tol must be positive, got {tol}")

    w, Xc, yc, x_mean, y_mean = problem.centered()
    p = problem.p
    coef = np.zeros(p)
    residual = yc.copy()
    # Weighted squared column norms; zero-variance columns stay at zero
    col_norm = w @ (Xc**2)
    active = col_norm > 1e-14

    history: List[float] = []
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        max_change = 0.0
        for j in np.flatnonzero(active):
            old = coef[j]
            xj = Xc[:, j]
            rho = float((w * xj) @ residual) + col_norm[j] * old
            new = np.sign(rho) * max(abs(rho) - lam, 0.0) / col_norm[j]
            if new != old:
                residual -= xj * (new - old)
                coef[j] = new
                max_change = max(max_change, abs(new - old))
        if track_objective:
            history.append(0.5 * float(w @ residual**2) + lam * float(np.abs(coef).sum()))
        if max_change < tol:
            converged = True
            break

    intercept = y_mean - float(x_mean @ coef)
    return LinearFit(
        coef=coef, intercept=intercept, n_iter=n_iter, converged=converged, objective_history=history
    )


def weighted_least_squares(
    problem: RegressionProblem, ridge: float = 0.0, fit_intercept: bool = True
) -> LinearFit:
    """Solve the weighted normal equations with optional ridge stabilization.

    Args:
        problem: Regression problem
        ridge: Nonnegative ridge added to the Gram diagonal (never to the intercept)
        fit_intercept: Fit an unpenalized intercept

    Returns:
        Fitted coefficients and intercept

    Raises:
        SingularSystemError: If the system is rank deficient and ridge is 0
    """
    if ridge < 0:
        raise SolverError(f"ridge must be nonnegative, got {ridge}")

    if fit_intercept:
        w, Xc, yc, x_mean, y_mean = problem.centered()
    else:
        w = problem.weights / problem.weights.sum()
        Xc, yc = problem.X, problem.y
        x_mean, y_mean = np.zeros(problem.p), 0.0

    gram = Xc.T @ (w[:, None] * Xc)
    rhs = Xc.T @ (w * yc)
    if ridge > 0:
        gram = gram + ridge * np.eye(problem.p)
    elif np.linalg.matrix_rank(gram) < problem.p:
        raise SingularSystemError(
            "weighted normal equations are singular; use ridge > 0 to stabilize"
        )

    try:
        coef = linalg.solve(gram, rhs, assume_a="sym")
    except linalg.LinAlgError as e:
        raise SingularSystemError(f"{e}; use ridge > 0 to stabilize") from e

    intercept = y_mean - float(x_mean @ coef) if fit_intercept else 0.0
    return LinearFit(coef=np.asarray(coef, dtype=np.float64), intercept=intercept)
