"""Unit tests for the surrogate solvers."""

import numpy as np
import pytest

from src.solvers import (
    CartParams,
    RegressionProblem,
    cart_build,
    cart_path_predicates,
    em_mixture_regression,
    lasso_cd,
    lasso_objective,
    weighted_least_squares,
)
from src.utils.errors import SingularSystemError, SolverError


def create_linear_problem(n=200, p=5, seed=0, noise=0.01):
    """Random design with known coefficients and random positive weights."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    coef = np.arange(1, p + 1, dtype=np.float64)
    y = X @ coef + 0.5 + noise * rng.normal(size=n)
    weights = rng.uniform(0.1, 1.0, size=n)
    return RegressionProblem(X=X, y=y, weights=weights), coef


class TestRegressionProblem:
    """Test input validation."""

    def test_shape_mismatch(self):
        """Test inconsistent dimensions are rejected."""
        with pytest.raises(SolverError, match="inconsistent"):
            RegressionProblem(X=np.zeros((3, 2)), y=np.zeros(2), weights=np.ones(3))

    def test_negative_weights(self):
        """Test weights must be nonnegative and not all zero."""
        with pytest.raises(SolverError):
            RegressionProblem(X=np.zeros((2, 1)), y=np.zeros(2), weights=np.array([1.0, -1.0]))
        with pytest.raises(SolverError):
            RegressionProblem(X=np.zeros((2, 1)), y=np.zeros(2), weights=np.zeros(2))

    def test_non_finite(self):
        """Test NaN inputs are rejected."""
        with pytest.raises(SolverError, match="finite"):
            RegressionProblem(X=np.array([[np.nan]]), y=np.zeros(1), weights=np.ones(1))


class TestWeightedLeastSquares:
    """Test the weighted normal-equation solver."""

    def test_recovers_coefficients(self):
        """Test WLS recovers the generating coefficients."""
        problem, coef = create_linear_problem()
        fit = weighted_least_squares(problem)
        assert np.allclose(fit.coef, coef, atol=0.01)
        assert fit.intercept == pytest.approx(0.5, abs=0.01)

    def test_identity_design(self):
        """Test an identity design with a baseline row fits targets exactly."""
        X = np.vstack([np.zeros(3), np.eye(3)])
        y = np.array([1.0, 3.0, -1.0, 5.0])
        fit = weighted_least_squares(RegressionProblem.unweighted(X, y))
        assert np.allclose(fit.coef, [2.0, -2.0, 4.0])
        assert fit.intercept == pytest.approx(1.0)

    def test_singular_without_ridge(self):
        """Test duplicated columns raise unless ridge is set."""
        X = np.column_stack([np.arange(5.0), np.arange(5.0)])
        problem = RegressionProblem.unweighted(X, np.arange(5.0))
        with pytest.raises(SingularSystemError, match="ridge"):
            weighted_least_squares(problem)
        fit = weighted_least_squares(problem, ridge=1e-6)
        assert fit.coef.sum() == pytest.approx(1.0, abs=1e-4)

    def test_no_intercept(self):
        """Test fit_intercept=False leaves the intercept at zero."""
        X = np.array([[1.0], [2.0], [3.0]])
        fit = weighted_least_squares(RegressionProblem.unweighted(X, 2 * X[:, 0]), fit_intercept=False)
        assert fit.intercept == 0.0
        assert fit.coef[0] == pytest.approx(2.0)


class TestLasso:
    """Test coordinate-descent lasso."""

    def test_zero_penalty_matches_wls(self):
        """Test lasso with lambda 0 converges to weighted least squares."""
        problem, _ = create_linear_problem(seed=1)
        lasso = lasso_cd(problem, 0.0, tol=1e-10, max_iter=5000)
        wls = weighted_least_squares(problem)
        assert np.allclose(lasso.coef, wls.coef, atol=1e-6)
        assert lasso.intercept == pytest.approx(wls.intercept, abs=1e-6)

    def test_large_penalty_zeroes_everything(self):
        """Test a large lambda gives all-zero coefficients and the weighted mean intercept."""
        problem, _ = create_linear_problem(seed=2)
        fit = lasso_cd(problem, 1e6)
        assert not fit.coef.any()
        expected = float(problem.weights @ problem.y / problem.weights.sum())
        assert fit.intercept == pytest.approx(expected)

    def test_objective_never_increases(self):
        """Test each sweep does not increase the lasso objective."""
        problem, _ = create_linear_problem(seed=3, noise=1.0)
        fit = lasso_cd(problem, 0.3, tol=1e-12, max_iter=50, track_objective=True)
        history = np.array(fit.objective_history)
        assert (np.diff(history) <= 1e-12).all()
        assert lasso_objective(problem, fit, 0.3) == pytest.approx(history[-1])

    def test_sparsity_grows_with_penalty(self):
        """Test stronger penalties select fewer features."""
        problem, _ = create_linear_problem(seed=4, noise=0.5)
        counts = [int(np.count_nonzero(lasso_cd(problem, lam).coef)) for lam in (0.0, 1.0, 3.0, 10.0)]
        assert counts == sorted(counts, reverse=True)
        assert counts[0] == 5 and counts[-1] == 0

    def test_constant_column_stays_zero(self):
        """Test a zero-variance column gets no coefficient."""
        rng = np.random.default_rng(0)
        X = np.column_stack([rng.normal(size=50), np.ones(50)])
        fit = lasso_cd(RegressionProblem.unweighted(X, X[:, 0]), 0.0)
        assert fit.coef[1] == 0.0

    def test_negative_penalty(self):
        """Test lambda must be nonnegative."""
        problem, _ = create_linear_problem()
        with pytest.raises(SolverError):
            lasso_cd(problem, -1.0)


class TestCart:
    """Test CART induction."""

    def test_pure_node_is_leaf(self):
        """Test a single-class sample set gives one leaf."""
        tree = cart_build(np.array([[0, 1], [1, 1]]), np.array([1, 1]), n_classes=2)
        assert tree.node_count == 1
        assert np.array_equal(tree.predict(np.array([[0, 0]])), [1])

    def test_xor_is_fitted(self):
        """Test zero-gain splits let the tree fit parity."""
        X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
        y = np.array([0, 1, 1, 0])
        tree = cart_build(X, y)
        assert np.array_equal(tree.predict(X), y)
        assert tree.depth == 2

    def test_max_depth(self):
        """Test max_depth bounds the tree."""
        X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
        tree = cart_build(X, np.array([0, 1, 1, 0]), params=CartParams(max_depth=1))
        assert tree.depth <= 1

    def test_min_leaf(self):
        """Test no leaf is smaller than min_leaf."""
        rng = np.random.default_rng(0)
        X = rng.integers(0, 2, size=(60, 6))
        y = rng.integers(0, 2, size=60)
        tree = cart_build(X, y, params=CartParams(min_leaf=5))
        leaves = tree.feature == -1
        assert (tree.n_node_samples[leaves] >= 5).all()

    def test_path_predicates(self):
        """Test path predicates list x's own bits on tested features."""
        X = np.array([[0, 0, 1], [0, 1, 1], [1, 0, 0], [1, 1, 0]])
        y = np.array([0, 0, 0, 1])
        tree = cart_build(X, y)
        x = np.array([1, 1, 0])
        predicates = cart_path_predicates(tree, x)
        assert {f for f, _ in predicates} <= {0, 1, 2}
        assert all(bit == x[f] for f, bit in predicates)
        assert tree.predict(x[None, :])[0] == 1

    def test_weights_shift_majority(self):
        """Test sample weights decide the leaf distribution."""
        X = np.array([[0], [0]])
        y = np.array([0, 1])
        tree = cart_build(X, y, weights=np.array([1.0, 3.0]))
        assert np.allclose(tree.value[0], [0.25, 0.75])

    def test_round_trip_arrays(self):
        """Test a tree rebuilt from its arrays predicts identically."""
        rng = np.random.default_rng(1)
        X = rng.integers(0, 2, size=(80, 5))
        y = X[:, 0] & X[:, 3]
        tree = cart_build(X, y)
        rebuilt = type(tree).from_arrays(tree.to_arrays())
        assert np.array_equal(rebuilt.predict(X), tree.predict(X))


class TestMixtureRegression:
    """Test EM for mixtures of linear regressions."""

    def test_log_likelihood_monotone(self):
        """Test EM never decreases the log-likelihood."""
        rng = np.random.default_rng(0)
        X = rng.normal(size=(300, 2))
        y = np.where(rng.random(300) < 0.5, X @ [2.0, -1.0], X @ [-2.0, 1.0]) + 0.1 * rng.normal(size=300)
        model = em_mixture_regression(RegressionProblem.unweighted(X, y), M=2, ridge=0.0, seed=1)
        history = np.array(model.log_likelihood)
        assert (np.diff(history) >= -1e-8).all()

    def test_recovers_two_regimes(self):
        """Test two well separated lines are recovered with several starts."""
        rng = np.random.default_rng(5)
        X = rng.normal(size=(400, 1))
        regime = rng.random(400) < 0.5
        y = np.where(regime, 3.0 * X[:, 0], -3.0 * X[:, 0]) + 0.05 * rng.normal(size=400)
        model = em_mixture_regression(RegressionProblem.unweighted(X, y), M=2, n_init=5, seed=0)
        slopes = sorted(model.betas[:, 0])
        assert slopes[0] == pytest.approx(-3.0, abs=0.2)
        assert slopes[1] == pytest.approx(3.0, abs=0.2)
        assert model.theta.sum() == pytest.approx(1.0)

    def test_single_component_is_wls(self):
        """Test M=1 reduces to least squares."""
        problem, coef = create_linear_problem(seed=6)
        unweighted = RegressionProblem.unweighted(problem.X, problem.y)
        model = em_mixture_regression(unweighted, M=1, ridge=0.0)
        assert np.allclose(model.betas[0], coef, atol=0.01)
        assert model.effective_components == 1

    def test_deterministic(self):
        """Test identical seeds give identical fits."""
        problem, _ = create_linear_problem(seed=7, noise=1.0)
        a = em_mixture_regression(problem, M=3, seed=4)
        b = em_mixture_regression(problem, M=3, seed=4)
        assert np.array_equal(a.betas, b.betas)
        assert a.log_likelihood == b.log_likelihood

    def test_responsibilities_sum_to_one(self):
        """Test posterior component probabilities are normalized."""
        problem, _ = create_linear_problem(seed=8, noise=1.0)
        model = em_mixture_regression(problem, M=3, seed=0)
        resp = model.responsibilities(problem.X, problem.y)
        assert np.allclose(resp.sum(axis=1), 1.0)

    def test_invalid_component_count(self):
        """Test M must be positive."""
        problem, _ = create_linear_problem()
        with pytest.raises(SolverError):
            em_mixture_regression(problem, M=0)
