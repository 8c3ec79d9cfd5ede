"""Non-asymptotic convergence certificates for the DA chain.

Everything here is closed-form arithmetic on ``sigma_max(X_lam^T X_lam)``
and the dataset's hyperparameters. The isoperimetric constant carries an
unspecified universal factor ``c1``; every certified number is conditional
on the value supplied for it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError
from .models import HETERO, LOGISTIC, PROBIT, Dataset, SmoothnessCertificate, smoothness_certificate
from .models import scaled_sigma_max

EPSILON = 0.5
_GOLDEN = math.sqrt(5.0) - 1.0
_LOG_4_OVER_GOLDEN = math.log(4.0 / _GOLDEN)


@dataclass(frozen=True)
class WarmStart:
    eta: np.ndarray
    L: float
    VL_diag: np.ndarray

    def __post_init__(self):
        if not np.all(self.VL_diag > 0):
            raise ParameterError("V_L diagonal must be positive")


@dataclass(frozen=True)
class BoundReport:
    sigma_max_scaled: float
    delta: float
    epsilon: float
    D: float
    iso_lower: float
    gap_lower: float
    rho: float
    log_warmness: float
    t_mix: int
    c1: float
    M: float
    M_prime: float
    M_double_prime: float

    def to_dict(self) -> dict:
        """Flat mapping with lower-case snake_case keys."""
        return {k.lower(): v for k, v in asdict(self).items()}


def coupling_constants(data: Dataset, sig: float | None = None) -> tuple[float, float]:
    """Close-coupling radius ``delta`` and overlap ``epsilon``."""
    if sig is None:
        sig = scaled_sigma_max(data)
    cap = 1.0 / (32.0 * math.sqrt(data.p))
    if data.kind == PROBIT:
        first = 1.0 / (2.0 * math.sqrt(sig)) if sig > 0 else math.inf
    elif data.kind == LOGISTIC:
        first = 1.0 / math.sqrt(sig) if sig > 0 else math.inf
    else:
        denom = 32.0 * data.hyper.gamma * math.sqrt(data.n * sig)
        first = 1.0 / denom if denom > 0 else math.inf
    return min(first, cap), EPSILON


def density_ratio_from_certificate(cert: SmoothnessCertificate, theta: float, p: int) -> float:
    """log sup of posterior / reference-product density, from a quadratic majorant.

    The intercept block has dimension one, so its log-determinant term has
    coefficient 1/2.
    """
    L = cert.L
    tail = max(_LOG_4_OVER_GOLDEN, math.log(2.0 * math.sqrt(L) / _GOLDEN) if L > 0 else -math.inf)
    return cert.logC + cert.ell0 + 0.5 * math.log((L + theta * theta) / (theta * theta)) + p * tail


def density_ratio_D(data: Dataset, sig: float | None = None) -> float:
    cert = smoothness_certificate(data, sig)
    return density_ratio_from_certificate(cert, data.hyper.theta, data.p)


def density_ratio_closed_form(data: Dataset, sig: float | None = None) -> float:
    """Per-model closed form of D; kept as an independent cross-check."""
    if sig is None:
        sig = scaled_sigma_max(data)
    n, p, th2 = data.n, data.p, data.hyper.theta**2

    def tail(arg):
        return max(_LOG_4_OVER_GOLDEN, math.log(arg / _GOLDEN) if arg > 0 else -math.inf)

    if data.kind == PROBIT:
        return n * math.log(2) + 0.5 * math.log((sig + th2) / th2) + p * tail(2 * math.sqrt(sig))
    if data.kind == LOGISTIC:
        return n * math.log(2) + 0.5 * math.log((sig / 4 + th2) / th2) + p * tail(math.sqrt(sig))
    g = data.hyper.gamma
    return (
        g * (float(np.abs(data.y).sum()) + n / 2)
        + 0.5 * math.log((g * sig + th2) / th2)
        + p * tail(2 * math.sqrt(g * sig))
    )


def contraction_rho(delta: float, epsilon: float, D: float, theta: float, c1: float = 1.0):
    """Returns ``(iso_lower, gap_lower, rho)`` with ``rho = 1 - gap_lower``."""
    if not (delta > 0 and epsilon > 0 and c1 > 0):
        raise ParameterError("delta, epsilon and c1 must be positive")
    if not D >= 0:
        raise ParameterError(f"D must be nonnegative, got {D!r}")
    iso = c1 * min(1.0, theta) / (D + 1.0)
    gap = epsilon * epsilon / 32.0 * min(1.0, delta * delta * iso * iso / 4.0)
    return iso, gap, 1.0 - gap


def warm_start(data: Dataset, sig: float | None = None) -> WarmStart:
    cert = smoothness_certificate(data, sig)
    th2 = data.hyper.theta**2
    VL = np.concatenate([[1.0 / (cert.L + th2)], np.full(data.p, 1.0 / (cert.L + 1.0))])
    return WarmStart(cert.eta.copy(), cert.L, VL)


def sample_warm_start(ws: WarmStart, lam: float, rng: np.random.Generator):
    """Draw (alpha, beta) with (alpha, lam*beta) ~ N(-V_L eta, V_L)."""
    mean = -ws.VL_diag * ws.eta
    v = mean + np.sqrt(ws.VL_diag) * rng.standard_normal(ws.VL_diag.shape[0])
    return float(v[0]), v[1:] / lam


def warm_start_logpdf(ws: WarmStart, lam: float, alpha, beta):
    """log omega_{eta, L}(alpha, beta), broadcasting over leading axes."""
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    v = np.concatenate([alpha[..., None], lam * beta], axis=-1)
    mean = -ws.VL_diag * ws.eta
    quad = ((v - mean) ** 2 / ws.VL_diag).sum(axis=-1)
    p = beta.shape[-1]
    return (
        -0.5 * np.log(2 * math.pi * ws.VL_diag).sum()
        + p * math.log(lam)
        - 0.5 * quad
    )


def log_warmness_from_certificate(cert: SmoothnessCertificate, theta: float, p: int) -> float:
    """Upper bound on log sup omega / posterior for the warm start built from ``cert``."""
    L = cert.L
    VL = np.concatenate([[1.0 / (L + theta * theta)], np.full(p, 1.0 / (L + 1.0))])
    eta = np.asarray(cert.eta)
    return (
        0.5 * math.log(L / (theta * theta) + 1.0)
        + 0.5 * p * math.log(L + 1.0)
        - 0.5 * float(eta @ (VL * eta))
        + cert.logC
        + p * math.log(2.0)
        + cert.ell0
        + 0.5 * p
    )


def log_warmness_bound(data: Dataset, sig: float | None = None) -> float:
    cert = smoothness_certificate(data, sig)
    return log_warmness_from_certificate(cert, data.hyper.theta, data.p)


def log_warmness_probit_closed_form(data: Dataset, sig: float | None = None) -> float:
    """Probit warmness display with the eta term dropped; a cross-check only."""
    if sig is None:
        sig = scaled_sigma_max(data)
    n, p, th2 = data.n, data.p, data.hyper.theta**2
    return (
        0.5 * math.log(sig / th2 + 1)
        + 0.5 * p * math.log(sig + 1)
        + p * math.log(2)
        + n * math.log(2)
        + 0.5 * p
    )


def mixing_time_budget(log_warmness: float, rho: float, eps_bar: float) -> int:
    """ceil((log C~ - log eps_bar) / (-log rho)), at least 1."""
    if not 0 < rho < 1:
        raise ParameterError(f"rho must lie in (0, 1), got {rho!r}")
    if not 0 < eps_bar < 1:
        raise ParameterError(f"eps_bar must lie in (0, 1), got {eps_bar!r}")
    t = math.ceil((log_warmness - math.log(eps_bar)) / (-math.log(rho)))
    return max(1, int(t))


def mixing_time_from_gap(log_warmness: float, gap: float, eps_bar: float) -> int:
    """Same budget written in terms of ``gap = 1 - rho``.

    ``-log(rho)`` is evaluated as ``-log1p(-gap)``, which stays accurate when
    the gap is below machine epsilon and ``1 - gap`` rounds to 1.
    """
    if not 0 < gap <= 1:
        raise ParameterError(f"gap must lie in (0, 1], got {gap!r}")
    if not 0 < eps_bar < 1:
        raise ParameterError(f"eps_bar must lie in (0, 1), got {eps_bar!r}")
    if gap == 1:
        return 1
    t = math.ceil((log_warmness - math.log(eps_bar)) / (-math.log1p(-gap)))
    return max(1, int(t))


def full_report(data: Dataset, c1: float = 1.0, eps_bar: float = 0.01) -> BoundReport:
    sig = scaled_sigma_max(data)
    delta, eps = coupling_constants(data, sig)
    D = density_ratio_D(data, sig)
    iso, gap, rho = contraction_rho(delta, eps, D, data.hyper.theta, c1)
    lw = log_warmness_bound(data, sig)
    t_mix = mixing_time_from_gap(lw, gap, eps_bar)
    th2 = data.hyper.theta**2
    return BoundReport(
        sigma_max_scaled=sig,
        delta=delta,
        epsilon=eps,
        D=D,
        iso_lower=iso,
        gap_lower=gap,
        rho=rho,
        log_warmness=lw,
        t_mix=t_mix,
        c1=float(c1),
        M=(1.0 / th2 + 1.0) * sig,
        M_prime=sig + 1.0,
        M_double_prime=sig / th2 + 1.0,
    )
