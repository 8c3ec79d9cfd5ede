"""Likelihood models for the data augmentation sampler.

Three models share one interface: probit (Albert-Chib truncated normal
latents), logistic (Polya-Gamma latents) and the heteroskedastic Gaussian
model whose marginal likelihood has Laplace errors (inverse-Gaussian
precision latents). Every model carries a single intercept, so the design
has rows ``(1, x_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import log_ndtr

from .distributions import inv_gaussian_draw, pg1_draw, truncated_normal_draw
from .errors import ParameterError
from .linalg import DesignMatrix, PrecisionGaussian, build_scaled_design, sigma_max

PROBIT = "probit"
LOGISTIC = "logistic"
HETERO = "hetero_gaussian"
KINDS = (PROBIT, LOGISTIC, HETERO)
KIND_CODES = {PROBIT: 0, LOGISTIC: 1, HETERO: 2}

_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class HyperParams:
    lam: float
    theta: float
    gamma: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ParameterError(f"lambda must be positive, got {self.lam!r}")
        if not (np.isfinite(self.theta) and self.theta > 0):
            raise ParameterError(f"theta must be positive, got {self.theta!r}")
        if self.gamma is not None and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ParameterError(f"gamma must be positive when given, got {self.gamma!r}")


@dataclass(frozen=True)
class Dataset:
    kind: str
    y: np.ndarray
    X: DesignMatrix
    hyper: HyperParams
    truth: dict | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if y.ndim != 1 or y.shape[0] != self.X.n:
            raise ParameterError(f"y has shape {y.shape}, expected ({self.X.n},)")
        if not np.all(np.isfinite(y)):
            raise ParameterError("y contains non-finite entries")
        if self.kind in (PROBIT, LOGISTIC) and not np.all((y == 0.0) | (y == 1.0)):
            raise ParameterError(f"{self.kind} responses must be 0 or 1")
        if self.kind == HETERO and self.hyper.gamma is None:
            raise ParameterError("hetero_gaussian model requires gamma")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def p(self) -> int:
        return self.X.p

    @property
    def kind_code(self) -> int:
        return KIND_CODES[self.kind]

    @property
    def gamma_or_nan(self) -> float:
        return float("nan") if self.hyper.gamma is None else float(self.hyper.gamma)


@dataclass(frozen=True)
class LatentVector:
    """Per-observation latent draws; meaning depends on ``kind``.

    probit: signed latent normals; logistic: PG(1, .) draws;
    hetero_gaussian: observation precisions.
    """

    kind: str
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if self.kind in (LOGISTIC, HETERO) and not np.all(z > 0):
            raise ParameterError(f"{self.kind} latents must be strictly positive")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class SmoothnessCertificate:
    """Quadratic majorant of the negative log-likelihood in (alpha, lam*beta).

    ell(a, b) <= ell0 + eta . (a, lam b) + (L/2)(a^2 + lam^2 |b|^2), and
    the likelihood is bounded above by exp(logC).
    """

    ell0: float
    eta: np.ndarray
    L: float
    logC: float

    def __post_init__(self):
        if not self.L >= 0:
            raise ParameterError(f"L must be nonnegative, got {self.L!r}")


def _linear_predictor(data: Dataset, alpha, beta):
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape[-1] != data.p:
        raise ParameterError(f"beta has trailing size {beta.shape[-1]}, expected p={data.p}")
    x = data.X.covariates
    # (..., n)
    return alpha[..., None] + beta @ x.T


def neg_log_likelihood(data: Dataset, alpha, beta):
    """-log f(y | alpha, beta); broadcasts over leading dimensions.

    ``alpha`` of shape ``(m,)`` with ``beta`` of shape ``(m, p)`` evaluates
    ``m`` points at once.
    """
    eta = _linear_predictor(data, alpha, beta)
    y = data.y
    if data.kind == PROBIT:
        ll = np.where(y == 1.0, log_ndtr(eta), log_ndtr(-eta))
        out = -ll.sum(axis=-1)
    elif data.kind == LOGISTIC:
        out = (np.logaddexp(0.0, eta) - y * eta).sum(axis=-1)
    else:
        g = data.hyper.gamma
        out = -data.n * math.log(g / 2.0) + g * np.abs(y - eta).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def grad_neg_log_likelihood_at_zero(data: Dataset) -> np.ndarray:
    """Gradient of ell at (alpha, beta) = 0 in the unscaled coordinates.

    Only defined for the smooth (binary response) models.
    """
    s = 2.0 * data.y - 1.0
    if data.kind == PROBIT:
        w = -_SQRT_2_OVER_PI * s
    elif data.kind == LOGISTIC:
        w = -0.5 * s
    else:
        raise ParameterError("hetero_gaussian likelihood is not differentiable at every point")
    return data.X.rows.T @ w


# ---------------------------------------------------------------------------
# jitted kernels shared by the chain driver
# ---------------------------------------------------------------------------


@njit(cache=True)
def latent_fill(rng, kind, X, y, ab, gamma, z):
    n, k = X.shape
    for i in range(n):
        eta = 0.0
        for j in range(k):
            eta += X[i, j] * ab[j]
        if kind == 0:
            z[i] = truncated_normal_draw(rng, eta, y[i] == 1.0)
        elif kind == 1:
            z[i] = pg1_draw(rng, abs(eta))
        else:
            r = abs(y[i] - eta)
            mu = gamma / r if r > 0.0 else np.inf
            z[i] = inv_gaussian_draw(rng, mu, gamma * gamma)


@njit(cache=True)
def conditional_fill(kind, X, y, z, xi, theta, Q, b):
    """Precision ``Q`` and linear term ``b`` of the (alpha, beta) conditional."""
    n, k = X.shape
    for r in range(k):
        b[r] = 0.0
        for c in range(k):
            Q[r, c] = 0.0
    for i in range(n):
        if kind == 0:
            w = 1.0
            t = z[i]
        elif kind == 1:
            w = z[i]
            t = y[i] - 0.5
        else:
            w = z[i]
            t = z[i] * y[i]
        for r in range(k):
            xr = X[i, r]
            b[r] += xr * t
            wx = w * xr
            for c in range(r + 1):
                Q[r, c] += wx * X[i, c]
    for r in range(k):
        for c in range(r):
            Q[c, r] = Q[r, c]
    Q[0, 0] += theta * theta
    for j in range(k - 1):
        Q[j + 1, j + 1] += xi[j]


def draw_latent(data: Dataset, alpha: float, beta, rng: np.random.Generator) -> LatentVector:
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    if beta.shape[0] != data.p:
        raise ParameterError(f"beta has length {beta.shape[0]}, expected p={data.p}")
    ab = np.concatenate([[float(alpha)], beta])
    z = np.empty(data.n)
    latent_fill(rng, data.kind_code, data.X.rows, data.y, ab, data.gamma_or_nan, z)
    return LatentVector(data.kind, z)


def conditional_gaussian(data: Dataset, z: LatentVector, xi) -> PrecisionGaussian:
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    if xi.shape != (data.p,):
        raise ParameterError(f"xi has shape {xi.shape}, expected ({data.p},)")
    if not np.all(xi > 0) or not np.all(np.isfinite(xi)):
        raise ParameterError("xi entries must be positive and finite")
    zz = np.ascontiguousarray(z.z if isinstance(z, LatentVector) else z, dtype=np.float64)
    if zz.shape != (data.n,):
        raise ParameterError(f"z has shape {zz.shape}, expected ({data.n},)")
    k = data.p + 1
    Q = np.empty((k, k))
    b = np.empty(k)
    conditional_fill(data.kind_code, data.X.rows, data.y, zz, xi, data.hyper.theta, Q, b)
    return PrecisionGaussian(Q, b)


def scaled_sigma_max(data: Dataset) -> float:
    """sigma_max(X_lam^T X_lam) for the dataset's lambda."""
    return sigma_max(build_scaled_design(data.X, data.hyper.lam).gram())


def smoothness_certificate(data: Dataset, sig: float | None = None) -> SmoothnessCertificate:
    lam = data.hyper.lam
    if sig is None:
        sig = scaled_sigma_max(data)
    n = data.n
    if data.kind == HETERO:
        g = data.hyper.gamma
        ell0 = -n * math.log(g / 2.0) + g * (float(np.abs(data.y).sum()) + n / 2.0)
        return SmoothnessCertificate(ell0, np.zeros(data.p + 1), g * sig, n * math.log(g / 2.0))
    eta = grad_neg_log_likelihood_at_zero(data)
    eta[1:] /= lam
    L = sig if data.kind == PROBIT else sig / 4.0
    return SmoothnessCertificate(n * math.log(2.0), eta, L, 0.0)
