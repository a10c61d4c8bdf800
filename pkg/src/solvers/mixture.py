"""EM for mixtures of linear regressions."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger
from scipy.special import logsumexp

from ..utils.errors import SolverError
from .regression import RegressionProblem, lasso_cd, weighted_least_squares

# Responsibility mass below which a component counts as collapsed.
COLLAPSE_MASS = 1e-6


@dataclass
class MixtureRegressionModel:
    """Weighted sum of M linear models with Gaussian noise."""

    theta: np.ndarray
    betas: np.ndarray
    intercepts: np.ndarray
    sigmas: np.ndarray
    log_likelihood: List[float] = field(default_factory=list)
    n_iter: int = 0
    reseeded: List[int] = field(default_factory=list)
    collapsed: List[int] = field(default_factory=list)

    def __post_init__(self):
        if abs(float(self.theta.sum()) - 1.0) > 1e-9:
            raise SolverError(f"mixture weights sum to {self.theta.sum()}, not 1")
        if (self.sigmas <= 0).any():
            raise SolverError("mixture noise scales must be positive")

    @property
    def M(self) -> int:
        return self.theta.shape[0]

    @property
    def effective_components(self) -> int:
        """Components that kept responsibility mass."""
        return int((self.theta > COLLAPSE_MASS).sum())

    def component_log_density(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """log(theta_j) + log N(y | X beta_j + b_j, sigma_j^2), shape (n, M)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        mean = X @ self.betas.T + self.intercepts[None, :]
        residual = y[:, None] - mean
        with np.errstate(divide="ignore"):
            log_theta = np.log(self.theta)
        return (
            log_theta[None, :]
            - 0.5 * np.log(2 * np.pi * self.sigmas**2)[None, :]
            - 0.5 * (residual / self.sigmas[None, :]) ** 2
        )

    def responsibilities(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Posterior component probabilities for each row."""
        log_density = self.component_log_density(X, y)
        return np.exp(log_density - logsumexp(log_density, axis=1, keepdims=True))

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Mixture mean prediction."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return (X @ self.betas.T + self.intercepts[None, :]) @ self.theta


def _m_step(
    problem: RegressionProblem,
    resp: np.ndarray,
    ridge: float,
    l1: float,
    sigma_floor: float,
):
    n, M = resp.shape
    w = problem.weights
    mass = (w[:, None] * resp).sum(axis=0)
    theta = mass / mass.sum()
    betas = np.zeros((M, problem.p))
    intercepts = np.zeros(M)
    sigmas = np.full(M, sigma_floor)
    for j in range(M):
        if theta[j] <= COLLAPSE_MASS:
            continue
        component = problem.reweighted(w * resp[:, j])
        if l1 > 0:
            fit = lasso_cd(component, l1, tol=1e-8, max_iter=500)
        else:
            fit = weighted_least_squares(component, ridge=ridge)
        betas[j], intercepts[j] = fit.coef, fit.intercept
        residual = problem.y - fit.predict(problem.X)
        variance = float(component.weights @ residual**2) / float(component.weights.sum())
        sigmas[j] = max(np.sqrt(variance), sigma_floor)
    return theta, betas, intercepts, sigmas


def _fit_once(
    problem: RegressionProblem,
    M: int,
    tol: float,
    max_iter: int,
    rng: np.random.Generator,
    ridge: float,
    l1: float,
    sigma_floor: float,
) -> MixtureRegressionModel:
    n = problem.n
    resp = np.zeros((n, M))
    resp[np.arange(n), rng.integers(0, M, size=n)] = 1.0

    history: List[float] = []
    reseeded: List[int] = []
    collapsed: List[int] = []
    model: Optional[MixtureRegressionModel] = None
    for iteration in range(1, max_iter + 1):
        theta, betas, intercepts, sigmas = _m_step(problem, resp, ridge, l1, sigma_floor)

        fresh = [j for j in range(M) if theta[j] <= COLLAPSE_MASS and j not in reseeded]
        if fresh and M > 1:
            # Re-seed each collapsed component once with a random share of the data
            for j in fresh:
                chosen = rng.random(n) < 1.0 / M
                resp[chosen] = 0.0
                resp[chosen, j] = 1.0
                reseeded.append(j)
                logger.debug(f"EM component {j} collapsed; re-seeded")
            theta, betas, intercepts, sigmas = _m_step(problem, resp, ridge, l1, sigma_floor)
            history.clear()
        collapsed = [j for j in range(M) if theta[j] <= COLLAPSE_MASS]

        theta = np.where(theta <= COLLAPSE_MASS, 0.0, theta)
        theta = theta / theta.sum()
        model = MixtureRegressionModel(
            theta=theta, betas=betas, intercepts=intercepts, sigmas=sigmas
        )
        log_density = model.component_log_density(problem.X, problem.y)
        ll = float(problem.weights @ logsumexp(log_density, axis=1))
        resp = np.exp(log_density - logsumexp(log_density, axis=1, keepdims=True))

        gain = ll - history[-1] if history else np.inf
        history.append(ll)
        model.n_iter = iteration
        if gain < tol:
            break

    assert model is not None
    model.log_likelihood = history
    model.reseeded = reseeded
    model.collapsed = collapsed
    return model


def em_mixture_regression(
    problem: RegressionProblem,
    M: int = 3,
    tol: float = 1e-6,
    max_iter: int = 200,
    seed: int = 0,
    n_init: int = 1,
    ridge: float = 1e-6,
    l1: float = 0.0,
    sigma_floor: float = 1e-3,
) -> MixtureRegressionModel:
    """Fit a mixture of M linear regressions by expectation maximization.

    Each start draws a seeded random hard assignment of rows to components;
    the M-step solves one weighted least-squares (or lasso, when ``l1 > 0``)
    problem per component and the E-step uses Gaussian residual
    likelihoods. A component that loses all responsibility is re-seeded once;
    if it collapses again it is dropped and fitting continues with fewer
    effective components. With several starts the highest final
    log-likelihood wins.

    Args:
        problem: Weighted regression problem
        M: Number of components
        tol: Stop when the log-likelihood gain falls below this
        max_iter: Iteration cap per start
        seed: RNG seed
        n_init: Number of random starts
        ridge: Ridge stabilization of each component fit
        l1: Optional L1 penalty inside the M-step
        sigma_floor: Lower bound on component noise scales

    Returns:
        Fitted mixture
    """
    if M < 1:
        raise SolverError(f"M must be >= 1, got {M}")
    if n_init < 1:
        raise SolverError(f"n_init must be >= 1, got {n_init}")
    if sigma_floor <= 0:
        raise SolverError("sigma_floor must be positive")

    rng = np.random.default_rng(seed)
    best: Optional[MixtureRegressionModel] = None
    for start in range(n_init):
        model = _fit_once(problem, M, tol, max_iter, rng, ridge, l1, sigma_floor)
        logger.debug(
            f"EM start {start}: ll={model.log_likelihood[-1]:.4f} after {model.n_iter} iterations"
        )
        if best is None or model.log_likelihood[-1] > best.log_likelihood[-1]:
            best = model
    assert best is not None
    return best
