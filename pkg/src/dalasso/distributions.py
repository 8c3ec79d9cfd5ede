"""Exact samplers for the augmentation distributions, plus TV/KL utilities.

All samplers take a caller-owned :class:`numpy.random.Generator`; the jitted
kernels advance that generator's state directly, so a fixed seed gives a
fixed draw sequence regardless of whether the scalar or array entry point
is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ._special import log_ndtr, ndtr, ndtri
from .errors import ParameterError

# Kept-side probability below which the truncated normal switches from
# inversion to exponential-proposal rejection.
TRUNCNORM_REJECTION_SWITCH = 1e-2

# Truncation point of the alternating-series PG(1, c) sampler.
_PG_TRUNC = 0.64
_PI = math.pi
_PI2 = math.pi * math.pi


# ---------------------------------------------------------------------------
# inverse Gaussian and its Levy limit
# ---------------------------------------------------------------------------


@njit(cache=True)
def levy_draw(rng, shape):
    """Levy law with density proportional to u^{-3/2} exp(-shape / (2u))."""
    while True:
        z = rng.standard_normal()
        if z != 0.0:
            return shape / (z * z)


@njit(cache=True)
def inv_gaussian_draw(rng, mu, shape):
    """InvGaussian(mu, shape) by the transform-with-root-selection method.

    The smaller root is evaluated as ``mu / (1 + w + sqrt(w (w + 2)))`` which
    avoids the cancellation of the textbook form when ``mu * v >> shape``.
    ``mu = inf`` routes to :func:`levy_draw`.
    """
    if not (mu < np.inf):
        return levy_draw(rng, shape)
    v = rng.standard_normal()
    v *= v
    w = mu * v / (2.0 * shape)
    x = mu / (1.0 + w + math.sqrt(w * (w + 2.0)))
    if x <= 0.0:
        # w overflowed; the larger root is the only representable one
        x = shape / v
    u = rng.random()
    if u * (mu + x) <= mu:
        return x
    return mu * (mu / x)


@njit(cache=True)
def inv_gaussian_fill(rng, mu, shape, out):
    for i in range(out.shape[0]):
        out[i] = inv_gaussian_draw(rng, mu[i], shape)


@dataclass(frozen=True)
class InvGaussianParams:
    """Mean ``mu`` (``inf`` for the Levy limit) and shape."""

    mu: float
    shape: float

    def __post_init__(self):
        if not (self.shape > 0 and np.isfinite(self.shape)):
            raise ParameterError(f"shape must be positive and finite, got {self.shape!r}")
        if not (self.mu > 0):
            raise ParameterError(f"mu must be positive or +inf, got {self.mu!r}")

    @classmethod
    def from_tilt(cls, c: float, b: float) -> "InvGaussianParams":
        """InvGaussian(c/|b|, c^2); ``b = 0`` gives the Levy limit."""
        if not c > 0:
            raise ParameterError(f"c must be positive, got {c!r}")
        mu = c / abs(b) if b != 0 else math.inf
        return cls(mu, c * c)


def sample_inv_gaussian(params: InvGaussianParams, rng: np.random.Generator, size=None):
    if size is None:
        return inv_gaussian_draw(rng, float(params.mu), float(params.shape))
    out = np.empty(int(np.prod(size)))
    inv_gaussian_fill(rng, np.full(out.shape[0], float(params.mu)), float(params.shape), out)
    return out.reshape(size)


def inv_gaussian_logpdf(u, b, c):
    """Log density of InvGaussian(c/|b|, c^2) in the tilted form used by the DA update."""
    u = np.asarray(u, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            math.log(c)
            - 0.5 * math.log(2 * math.pi)
            + c * abs(b)
            - 1.5 * np.log(u)
            - 0.5 * b * b * u
            - 0.5 * c * c / u
        )
    return np.where(u > 0, out, -np.inf)


def inv_gaussian_kl(b: float, b_prime: float, c: float) -> float:
    """KL(h(., b) || h(., b')) for the tilted inverse-Gaussian family.

    Requires ``|b| >= |b'|``; the closed form uses ``E[U] = c/|b|``.
    """
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c!r}")
    ab, abp = abs(b), abs(b_prime)
    if ab < abp:
        raise ParameterError(
            f"|b| = {ab} < |b'| = {abp}; swap the arguments (KL direction requires |b| >= |b'|)"
        )
    if ab == abp:
        return 0.0
    return c * (ab - abp) - c * (b * b - b_prime * b_prime) / (2.0 * ab)


def inv_gaussian_product_tv_bound(s1, s2, c: float) -> float:
    """Upper bound sqrt(2c) q^{1/4} ||s1 - s2||^{1/2} on the product-law TV."""
    s1 = np.atleast_1d(np.asarray(s1, dtype=np.float64))
    s2 = np.atleast_1d(np.asarray(s2, dtype=np.float64))
    if s1.shape != s2.shape or s1.ndim != 1:
        raise ParameterError(f"length mismatch: {s1.shape} vs {s2.shape}")
    if not c > 0:
        raise ParameterError(f"c must be positive, got {c!r}")
    q = s1.shape[0]
    return math.sqrt(2.0 * c) * q**0.25 * math.sqrt(float(np.linalg.norm(s1 - s2)))


# ---------------------------------------------------------------------------
# one-sided unit-variance truncated normal
# ---------------------------------------------------------------------------


@njit(cache=True)
def std_normal_upper_tail_draw(rng, a):
    """N(0, 1) conditioned on ``T >= a``."""
    q = ndtr(-a)
    if q >= TRUNCNORM_REJECTION_SWITCH:
        u = 1.0 - rng.random()
        t = -ndtri(u * q)
        return t if t >= a else a
    rate = 0.5 * (a + math.sqrt(a * a + 4.0))
    while True:
        x = a + rng.standard_exponential() / rate
        d = x - rate
        if rng.random() <= math.exp(-0.5 * d * d):
            return x


@njit(cache=True)
def truncated_normal_draw(rng, mean, nonnegative):
    """Unit-variance normal with the given mean restricted to [0, inf) or (-inf, 0)."""
    while True:
        if nonnegative:
            z = mean + std_normal_upper_tail_draw(rng, -mean)
            if z >= 0.0:
                return z
        else:
            z = mean - std_normal_upper_tail_draw(rng, mean)
            if z < 0.0:
                return z


_SIDES = ("nonnegative", "negative")


@dataclass(frozen=True)
class TruncatedNormalParams:
    mean: float
    side: str

    def __post_init__(self):
        if self.side not in _SIDES:
            raise ParameterError(f"side must be one of {_SIDES}, got {self.side!r}")
        if not np.isfinite(self.mean):
            raise ParameterError("mean must be finite")


def sample_truncated_normal(params: TruncatedNormalParams, rng: np.random.Generator, size=None):
    nonneg = params.side == "nonnegative"
    if size is None:
        return truncated_normal_draw(rng, float(params.mean), nonneg)
    out = np.empty(int(np.prod(size)))
    _truncnorm_fill(rng, float(params.mean), nonneg, out)
    return out.reshape(size)


@njit(cache=True)
def _truncnorm_fill(rng, mean, nonneg, out):
    for i in range(out.shape[0]):
        out[i] = truncated_normal_draw(rng, mean, nonneg)


# ---------------------------------------------------------------------------
# Polya-Gamma PG(1, c)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _pg_series_coef(n, x):
    k = n + 0.5
    if x > _PG_TRUNC:
        return _PI * k * math.exp(-0.5 * k * k * _PI2 * x)
    return (2.0 / (_PI * x)) ** 1.5 * _PI * k * math.exp(-2.0 * k * k / x)


@njit(cache=True)
def _pg_exp_mass(z):
    """Probability of the exponential branch of the J*(1, z) proposal."""
    t = _PG_TRUNC
    fz = 0.125 * _PI2 + 0.5 * z * z
    rt = math.sqrt(1.0 / t)
    b = rt * (t * z - 1.0)
    a = -rt * (t * z + 1.0)
    x0 = math.log(fz) + fz * t
    xb = x0 - z + log_ndtr(b)
    xa = x0 + z + log_ndtr(a)
    qdivp = 4.0 / _PI * (math.exp(xb) + math.exp(xa))
    return 1.0 / (1.0 + qdivp)


@njit(cache=True)
def _pg_truncated_ig(rng, z):
    """InvGaussian(1/z, 1) restricted to (0, t)."""
    t = _PG_TRUNC
    if z * t < 1.0:
        # mu = 1/z > t: Levy proposal on (0, t), tilted by exp(-z^2 x / 2)
        while True:
            e1 = rng.standard_exponential()
            e2 = rng.standard_exponential()
            while e1 * e1 > 2.0 * e2 / t:
                e1 = rng.standard_exponential()
                e2 = rng.standard_exponential()
            x = 1.0 + e1 * t
            x = t / (x * x)
            if rng.random() <= math.exp(-0.5 * z * z * x):
                return x
    mu = 1.0 / z
    while True:
        x = inv_gaussian_draw(rng, mu, 1.0)
        if x < t:
            return x


@njit(cache=True)
def pg1_draw(rng, c):
    """Exact PG(1, c) draw by the alternating-series rejection method.

    Samples J*(1, |c|/2) from an exponential / truncated inverse-Gaussian
    mixture proposal and accepts by squeezing the Jacobi series; returns
    one quarter of the accepted J* value.
    """
    z = 0.5 * abs(c)
    fz = 0.125 * _PI2 + 0.5 * z * z
    p_exp = _pg_exp_mass(z)
    while True:
        if rng.random() < p_exp:
            x = _PG_TRUNC + rng.standard_exponential() / fz
        else:
            x = _pg_truncated_ig(rng, z)
        s = _pg_series_coef(0, x)
        y = rng.random() * s
        n = 0
        while True:
            n += 1
            if n % 2 == 1:
                s -= _pg_series_coef(n, x)
                if y <= s:
                    return 0.25 * x
            else:
                s += _pg_series_coef(n, x)
                if y > s:
                    break


@njit(cache=True)
def pg1_fill(rng, c, out):
    for i in range(out.shape[0]):
        out[i] = pg1_draw(rng, c[i])


def sample_polya_gamma_1(c: float, rng: np.random.Generator, size=None):
    if not c >= 0:
        raise ParameterError(f"c must be nonnegative, got {c!r}")
    if size is None:
        return pg1_draw(rng, float(c))
    out = np.empty(int(np.prod(size)))
    pg1_fill(rng, np.full(out.shape[0], float(c)), out)
    return out.reshape(size)


def pg1_mean(c: float) -> float:
    """E[PG(1, c)] = tanh(c/2) / (2c), with the c -> 0 limit 1/4."""
    c = abs(c)
    if c < 1e-4:
        return 0.25 - c * c / 48.0
    return math.tanh(0.5 * c) / (2.0 * c)


# ---------------------------------------------------------------------------
# simple draws used by data generation
# ---------------------------------------------------------------------------


def sample_exponential(rate: float, rng: np.random.Generator, size=None):
    if not rate > 0:
        raise ParameterError(f"rate must be positive, got {rate!r}")
    return rng.exponential(1.0 / rate, size=size)


def sample_laplace(rate: float, rng: np.random.Generator, size=None):
    """Laplace with density proportional to exp(-rate |u|)."""
    if not rate > 0:
        raise ParameterError(f"rate must be positive, got {rate!r}")
    return rng.laplace(0.0, 1.0 / rate, size=size)


# ---------------------------------------------------------------------------
# total variation
# ---------------------------------------------------------------------------


def discrete_tv(p1, p2) -> float:
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if p1.shape != p2.shape:
        raise ParameterError(f"binning mismatch: {p1.shape} vs {p2.shape}")
    for name, h in (("p1", p1), ("p2", p2)):
        if abs(h.sum() - 1.0) > 1e-9 or np.any(h < 0):
            raise ParameterError(f"{name} is not a probability histogram (sum {h.sum()!r})")
    return float(min(1.0, 0.5 * np.abs(p1 - p2).sum()))
