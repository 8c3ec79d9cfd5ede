import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dalasso.errors import NumericError, ParameterError
from dalasso.linalg import (
    DesignMatrix,
    PrecisionGaussian,
    build_scaled_design,
    sample_precision_gaussian,
    sigma_max,
)


class TestScaledDesign:
    def test_identity_at_lambda_one(self):
        X = DesignMatrix(np.array([[1.0, 2.0, 4.0]]))
        np.testing.assert_array_equal(build_scaled_design(X, 1.0).rows, [[1.0, 2.0, 4.0]])

    def test_halves_covariates(self):
        X = DesignMatrix(np.array([[1.0, 2.0, 4.0]]))
        np.testing.assert_array_equal(build_scaled_design(X, 2.0).rows, [[1.0, 1.0, 2.0]])

    @pytest.mark.parametrize("lam", [0.3, 1.0, 17.0])
    def test_zero_covariate(self, lam):
        X = DesignMatrix(np.array([[1.0, 0.0]]))
        np.testing.assert_array_equal(build_scaled_design(X, lam).rows, [[1.0, 0.0]])

    @pytest.mark.parametrize("lam", [0.0, -1.0, np.nan])
    def test_rejects_nonpositive_lambda(self, lam):
        with pytest.raises(ParameterError):
            build_scaled_design(DesignMatrix(np.array([[1.0, 1.0]])), lam)

    def test_design_requires_intercept(self):
        with pytest.raises(ParameterError):
            DesignMatrix(np.array([[0.5, 1.0]]))


class TestSigmaMax:
    def test_identity(self):
        assert sigma_max(np.eye(2)) == pytest.approx(1.0, rel=1e-12)

    def test_two_by_two(self):
        # lambda^2 - 10 lambda + 9 = (lambda - 1)(lambda - 9)
        assert sigma_max(np.array([[5.0, 4.0], [4.0, 5.0]])) == pytest.approx(9.0, rel=1e-10)

    def test_zero(self):
        assert sigma_max(np.zeros((3, 3))) == 0.0

    def test_start_in_null_space_restarts(self):
        M = np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert sigma_max(M) == pytest.approx(2.0, rel=1e-9)

    def test_rejects_asymmetric(self):
        with pytest.raises(ParameterError):
            sigma_max(np.array([[1.0, 2.0], [0.0, 1.0]]))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**31))
    def test_matches_eigvalsh(self, k, seed):
        A = np.random.default_rng(seed).standard_normal((k + 3, k))
        M = A.T @ A
        assert sigma_max(M) == pytest.approx(np.linalg.eigvalsh(M)[-1], rel=1e-8)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**31))
    def test_permutation_invariant(self, k, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((k + 2, k))
        M = A.T @ A
        perm = rng.permutation(k)
        assert sigma_max(M[np.ix_(perm, perm)]) == pytest.approx(sigma_max(M), rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 30), st.integers(1, 5), st.floats(1.0, 50.0), st.integers(0, 2**31))
    def test_weyl_bound(self, n, p, lam, seed):
        x = np.random.default_rng(seed).standard_normal((n, p))
        X = DesignMatrix.from_covariates(x)
        top = sigma_max(X.gram())
        assert sigma_max(build_scaled_design(X, lam).gram()) <= top * (1 + 1e-8)


class TestPrecisionGaussian:
    def test_standard_normal(self):
        g = PrecisionGaussian(np.eye(2), np.zeros(2))
        rng = np.random.default_rng(0)
        draws = np.array([sample_precision_gaussian(g, rng) for _ in range(200_000)])
        np.testing.assert_allclose(draws.mean(0), 0.0, atol=4e-3 * 2.5)
        np.testing.assert_allclose(np.cov(draws.T), np.eye(2), atol=1e-2)

    def test_mean_by_hand(self):
        # [[2,1],[1,2]] m = (1,1)  =>  m = (1/3, 1/3)
        g = PrecisionGaussian(np.array([[2.0, 1.0], [1.0, 2.0]]), np.ones(2))
        np.testing.assert_allclose(g.mean(), [1 / 3, 1 / 3], rtol=1e-14)
        rng = np.random.default_rng(1)
        draws = np.array([sample_precision_gaussian(g, rng) for _ in range(100_000)])
        se = np.sqrt(np.diag(np.linalg.inv(g.precision)) / draws.shape[0])
        assert np.all(np.abs(draws.mean(0) - 1 / 3) < 4 * se)

    def test_deterministic(self):
        g = PrecisionGaussian(np.array([[2.0, 1.0], [1.0, 2.0]]), np.ones(2))
        a = sample_precision_gaussian(g, np.random.default_rng(5))
        b = sample_precision_gaussian(g, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_covariance_three_by_three(self):
        Q = np.array([[3.0, 0.5, 0.2], [0.5, 2.0, -0.3], [0.2, -0.3, 1.5]])
        g = PrecisionGaussian(Q, np.array([0.2, -0.1, 0.4]))
        rng = np.random.default_rng(2)
        draws = np.array([sample_precision_gaussian(g, rng) for _ in range(200_000)])
        cov = np.linalg.inv(Q)
        emp = np.cov(draws.T)
        big = np.abs(cov) > 0.05
        np.testing.assert_allclose(emp[big], cov[big], rtol=0.05)

    def test_not_positive_definite(self):
        g = PrecisionGaussian(np.array([[1.0, 2.0], [2.0, 1.0]]), np.zeros(2))
        with pytest.raises(NumericError) as info:
            sample_precision_gaussian(g, np.random.default_rng(0))
        assert info.value.min_pivot == pytest.approx(-3.0)

    def test_rejects_asymmetric(self):
        with pytest.raises(ParameterError):
            PrecisionGaussian(np.array([[1.0, 0.1], [0.0, 1.0]]), np.zeros(2))
