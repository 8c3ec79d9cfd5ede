import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from conftest import KIND_LIST, make_dataset
from dalasso.errors import ParameterError
from dalasso.linalg import DesignMatrix
from dalasso.models import (
    Dataset,
    HyperParams,
    LatentVector,
    conditional_gaussian,
    draw_latent,
    neg_log_likelihood,
    smoothness_certificate,
)
from dalasso.synthetic import generate_synthetic


def random_dataset(kind, seed, n=None, p=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 25))
    p = p or int(rng.integers(1, 5))
    lam = float(rng.uniform(0.3, 3.0))
    theta = float(rng.uniform(0.3, 2.0))
    gamma = float(rng.uniform(0.3, 3.0))
    x = rng.normal(size=(n, p)) * rng.uniform(0.2, 3.0)
    y = rng.normal(size=n) * 2 if kind == "hetero_gaussian" else (rng.random(n) < 0.5).astype(float)
    return make_dataset(kind, y, x, lam, theta, gamma)


class TestTypes:
    def test_binary_responses_enforced(self):
        with pytest.raises(ParameterError):
            make_dataset("probit", [0.5], [[1.0]])

    def test_hetero_requires_gamma(self):
        with pytest.raises(ParameterError):
            Dataset("hetero_gaussian", np.zeros(1), DesignMatrix.from_covariates([[1.0]]),
                    HyperParams(1.0, 1.0))

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            make_dataset("logistic", [0.0, 1.0], [[1.0]])

    @pytest.mark.parametrize("lam,theta,gamma", [(0.0, 1.0, None), (1.0, -1.0, None), (1.0, 1.0, 0.0)])
    def test_hyper_positive(self, lam, theta, gamma):
        with pytest.raises(ParameterError):
            HyperParams(lam, theta, gamma)

    @pytest.mark.parametrize("kind", ["logistic", "hetero_gaussian"])
    def test_positive_latents_enforced(self, kind):
        with pytest.raises(ParameterError):
            LatentVector(kind, np.array([1.0, 0.0]))


class TestNegLogLikelihood:
    @pytest.mark.parametrize("kind", ["probit", "logistic"])
    def test_at_zero(self, kind):
        d = generate_synthetic(kind, 13, 2, 1.0, 0.0, seed=0)
        assert neg_log_likelihood(d, 0.0, np.zeros(2)) == pytest.approx(13 * math.log(2), rel=1e-14)

    def test_hetero_fixture(self):
        d = make_dataset("hetero_gaussian", [1.0], [[0.3]], gamma=2.0)
        assert neg_log_likelihood(d, 0.0, np.zeros(1)) == pytest.approx(2.0, rel=1e-15)

    def test_probit_tail_finite(self):
        d = make_dataset("probit", [1.0, 0.0], [[1.0], [-1.0]])
        v = neg_log_likelihood(d, 0.0, np.array([-38.0]))
        # -log Phi(-38) ~ 38^2/2 + log(38 sqrt(2 pi))
        assert np.isfinite(v)
        assert v == pytest.approx(2 * (-stats.norm.logcdf(-38.0)), rel=1e-12)

    def test_matches_direct_formula(self, kind):
        d = random_dataset(kind, 11)
        rng = np.random.default_rng(0)
        a, b = rng.normal(), rng.normal(size=d.p)
        eta = a + d.X.covariates @ b
        if kind == "probit":
            ref = -np.sum(np.where(d.y == 1, stats.norm.logcdf(eta), stats.norm.logsf(eta)))
        elif kind == "logistic":
            ref = -np.sum(d.y * eta - np.log1p(np.exp(eta)))
        else:
            g = d.hyper.gamma
            ref = -np.sum(stats.laplace(loc=eta, scale=1 / g).logpdf(d.y))
        assert neg_log_likelihood(d, a, b) == pytest.approx(ref, rel=1e-12)

    def test_broadcast(self, kind):
        d = random_dataset(kind, 12)
        rng = np.random.default_rng(1)
        a, B = rng.normal(size=6), rng.normal(size=(6, d.p))
        batch = neg_log_likelihood(d, a, B)
        single = [neg_log_likelihood(d, a[i], B[i]) for i in range(6)]
        np.testing.assert_allclose(batch, single, rtol=1e-14)

    def test_dimension_mismatch(self, kind):
        d = random_dataset(kind, 13, p=2)
        with pytest.raises(ParameterError):
            neg_log_likelihood(d, 0.0, np.zeros(3))

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(KIND_LIST), st.integers(0, 2**31))
    def test_convex_midpoint(self, kind, seed):
        d = random_dataset(kind, seed)
        rng = np.random.default_rng(seed + 1)
        u, v = rng.normal(size=(2, d.p + 1)) * 3
        m = 0.5 * (u + v)
        lhs = neg_log_likelihood(d, m[0], m[1:])
        rhs = 0.5 * (neg_log_likelihood(d, u[0], u[1:]) + neg_log_likelihood(d, v[0], v[1:]))
        assert lhs <= rhs + 1e-9


class TestCertificate:
    def test_probit_symmetric_cancels(self):
        d = make_dataset("probit", [1.0, 0.0], [[1.0], [1.0]])
        np.testing.assert_array_equal(smoothness_certificate(d).eta, [0.0, 0.0])

    def test_logistic_eta(self):
        d = make_dataset("logistic", np.ones(4), np.zeros((4, 1)))
        np.testing.assert_allclose(smoothness_certificate(d).eta, [-2.0, 0.0])

    def test_probit_eta_scaling(self):
        d = make_dataset("probit", [1.0, 1.0], [[2.0], [4.0]], lam=2.0)
        c = math.sqrt(2 / math.pi)
        np.testing.assert_allclose(smoothness_certificate(d).eta, [-2 * c, -3 * c], rtol=1e-15)

    def test_hetero_ell0(self):
        d = make_dataset("hetero_gaussian", [1.0, -1.0], [[0.1], [0.2]], gamma=2.0)
        cert = smoothness_certificate(d)
        assert cert.ell0 == pytest.approx(6.0, rel=1e-15)
        assert cert.logC == 0.0
        np.testing.assert_array_equal(cert.eta, [0.0, 0.0])

    def test_L_per_model(self):
        x = np.array([[1.0], [-1.0], [0.0]])
        sig = np.linalg.eigvalsh(DesignMatrix.from_covariates(x).gram())[-1]
        for kind, factor in (("probit", 1.0), ("logistic", 0.25), ("hetero_gaussian", 3.0)):
            y = [1.0, 0.0, 1.0]
            d = make_dataset(kind, y, x, gamma=3.0)
            assert smoothness_certificate(d).L == pytest.approx(factor * sig, rel=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_majorization(self, kind, seed):
        d = random_dataset(kind, 100 + seed)
        cert = smoothness_certificate(d)
        lam = d.hyper.lam
        rng = np.random.default_rng(seed)
        v = rng.normal(size=(1000, d.p + 1))
        v *= (10 * rng.random(1000) ** (1 / (d.p + 1)) / np.linalg.norm(v, axis=1))[:, None]
        a, b = v[:, 0], v[:, 1:] / lam
        ell = neg_log_likelihood(d, a, b)
        bound = cert.ell0 + v @ cert.eta + 0.5 * cert.L * (v**2).sum(axis=1)
        assert np.all(ell <= bound + 1e-8)
        assert np.all(np.exp(-ell) <= np.exp(cert.logC) + 1e-12)


class TestDrawLatent:
    def test_probit_signs(self):
        d = generate_synthetic("probit", 40, 2, 1.0, 0.0, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(50):
            z = draw_latent(d, rng.normal() * 3, rng.normal(size=2) * 3, rng).z
            assert np.all((z >= 0) == (d.y == 1))

    def test_logistic_at_zero(self):
        d = make_dataset("logistic", np.ones(1000), np.zeros((1000, 1)))
        rng = np.random.default_rng(1)
        z = np.concatenate([draw_latent(d, 0.0, [0.0], rng).z for _ in range(1000)])
        assert abs(z.mean() / 0.25 - 1) < 0.01

    def test_hetero_mean(self):
        d = make_dataset("hetero_gaussian", np.full(1000, 2.0), np.zeros((1000, 1)), gamma=2.0)
        rng = np.random.default_rng(2)
        z = np.concatenate([draw_latent(d, 0.0, [0.0], rng).z for _ in range(1000)])
        assert abs(z.mean() - 1.0) < 0.01

    def test_hetero_zero_residual(self):
        d = make_dataset("hetero_gaussian", np.zeros(200_000), np.zeros((200_000, 1)), gamma=1.5)
        z = draw_latent(d, 0.0, [0.0], np.random.default_rng(3)).z
        assert np.all(np.isfinite(z)) and np.all(z > 0)
        assert stats.kstest(1.5**2 / z, stats.chi2(1).cdf).statistic < 0.005


class TestConditionalGaussian:
    def test_probit_fixture(self):
        d = make_dataset("probit", [1.0], [[1.0]])
        g = conditional_gaussian(d, LatentVector("probit", np.array([1.0])), [1.0])
        np.testing.assert_array_equal(g.precision, [[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_array_equal(g.linear_term, [1.0, 1.0])
        np.testing.assert_allclose(g.mean(), [1 / 3, 1 / 3], rtol=1e-14)

    def test_logistic_fixture(self):
        d = make_dataset("logistic", [1.0], [[1.0]])
        g = conditional_gaussian(d, LatentVector("logistic", np.array([1.0])), [1.0])
        np.testing.assert_array_equal(g.linear_term, [0.5, 0.5])

    def test_hetero_fixture(self):
        d = make_dataset("hetero_gaussian", [1.0], [[0.0]])
        g = conditional_gaussian(d, LatentVector("hetero_gaussian", np.array([4.0])), [1.0])
        np.testing.assert_array_equal(g.precision, [[5.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(g.linear_term, [4.0, 0.0])

    def test_matches_dense_algebra(self, kind):
        d = random_dataset(kind, 21, n=15, p=3)
        rng = np.random.default_rng(4)
        z = rng.uniform(0.1, 2.0, size=15)
        if kind == "probit":
            z = np.where(d.y == 1, z, -z)
        xi = rng.uniform(0.1, 3.0, size=3)
        X, y, th2 = d.X.rows, d.y, d.hyper.theta**2
        D = np.diag(np.concatenate([[th2], xi]))
        if kind == "probit":
            Q, b = X.T @ X + D, X.T @ z
        elif kind == "logistic":
            Q, b = X.T @ (z[:, None] * X) + D, X.T @ (y - 0.5)
        else:
            Q, b = X.T @ (z[:, None] * X) + D, X.T @ (z * y)
        g = conditional_gaussian(d, LatentVector(kind, z), xi)
        np.testing.assert_allclose(g.precision, Q, rtol=1e-13)
        np.testing.assert_allclose(g.linear_term, b, rtol=1e-13, atol=1e-14)

    def test_nonpositive_xi(self):
        d = make_dataset("probit", [1.0], [[1.0]])
        with pytest.raises(ParameterError):
            conditional_gaussian(d, LatentVector("probit", np.array([1.0])), [0.0])


class TestHeteroAugmentation:
    """Laplace(r; gamma) as a normal scale mixture with latent precision z.

    The mixing law puts Exp(gamma^2 / 2) on the variance 1/z; the conditional
    of z given r is then InvGaussian(gamma/|r|, gamma^2).
    """

    @staticmethod
    def prior(z, g):
        return 0.5 * g * g * z**-2 * np.exp(-0.5 * g * g / z)

    @staticmethod
    def normal(r, z):
        return np.sqrt(z / (2 * np.pi)) * np.exp(-0.5 * z * r * r)

    @staticmethod
    def conditional(z, r, g):
        """Density of InvGaussian(g/|r|, g^2) at z."""
        mu = g / abs(r)
        return g / np.sqrt(2 * np.pi * z**3) * np.exp(-g * g * (z - mu) ** 2 / (2 * mu * mu * z))

    @pytest.mark.parametrize("r,g", [(0.7, 1.0), (-2.0, 2.0), (0.05, 0.5)])
    def test_mixture_reproduces_laplace(self, r, g):
        laplace = 0.5 * g * np.exp(-g * abs(r))
        val, _ = integrate.quad(lambda t: self.prior(np.exp(t), g) * self.normal(r, np.exp(t))
                                * np.exp(t), -60, 60, epsabs=1e-13, limit=400)
        assert val == pytest.approx(laplace, abs=1e-6)
        # Bayes: prior * normal / conditional is constant in z and equals the likelihood
        for z in (0.3, 1.0, 5.0):
            ratio = self.prior(z, g) * self.normal(r, z) / self.conditional(z, r, g)
            assert ratio == pytest.approx(laplace, rel=1e-10)

    def test_draws_follow_conditional(self):
        g, r = 1.3, 0.8
        d = make_dataset("hetero_gaussian", np.full(100_000, r), np.zeros((100_000, 1)), gamma=g)
        z = draw_latent(d, 0.0, [0.0], np.random.default_rng(5)).z
        mu = g / r
        ref = stats.invgauss(mu / g**2, scale=g**2)
        assert stats.kstest(z, ref.cdf).statistic < 0.006
