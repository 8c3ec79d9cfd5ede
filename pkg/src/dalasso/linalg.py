"""Design matrices, the top eigenvalue, and precision-form Gaussian draws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NumericError, ParameterError

SYMMETRY_RTOL = 1e-10
POWER_RTOL = 1e-10
POWER_MAX_ITER = 100_000


@dataclass(frozen=True)
class DesignMatrix:
    """Intercept-augmented design: row ``i`` is ``(1, x_i)``."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 2:
            raise ParameterError(
                f"design must be n x (1+p) with n >= 1, p >= 1; got shape {rows.shape}"
            )
        if not np.all(rows[:, 0] == 1.0):
            raise ParameterError("first design column must be exactly 1")
        if not np.all(np.isfinite(rows)):
            raise ParameterError("design contains non-finite entries")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_covariates(cls, x) -> "DesignMatrix":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        return cls(np.column_stack([np.ones(x.shape[0]), x]))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1] - 1

    @property
    def covariates(self) -> np.ndarray:
        return self.rows[:, 1:]

    def gram(self) -> np.ndarray:
        return self.rows.T @ self.rows


@dataclass(frozen=True)
class ScaledDesign:
    """Design with covariate columns divided by ``lam``."""

    rows: np.ndarray
    lam: float

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1] - 1

    def gram(self) -> np.ndarray:
        return self.rows.T @ self.rows


def build_scaled_design(X: DesignMatrix, lam: float) -> ScaledDesign:
    if not (np.isfinite(lam) and lam > 0):
        raise ParameterError(f"lambda must be positive, got {lam!r}")
    rows = X.rows.copy()
    rows[:, 1:] /= lam
    rows.setflags(write=False)
    return ScaledDesign(rows, float(lam))


def _check_symmetric(M: np.ndarray, what: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParameterError(f"{what} must be square, got shape {M.shape}")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise ParameterError(f"{what} is not symmetric to relative tolerance {SYMMETRY_RTOL}")
    return 0.5 * (M + M.T)


def _power_iterate(M, v, rtol, max_iter):
    lam_old = np.nan
    for it in range(max_iter):
        w = M @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0, False, it
        lam = float(v @ w)
        v = w / nrm
        if it > 0 and abs(lam - lam_old) <= rtol * abs(lam):
            return lam, True, it
        lam_old = lam
    return lam_old, False, max_iter


def sigma_max(M, rtol: float = POWER_RTOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Starts from the normalized all-ones vector. If the iterate collapses
    (the start is in the null space) or fails to converge, the iteration is
    restarted from a fixed-seed random vector and the larger Rayleigh
    quotient is kept.
    """
    M = _check_symmetric(M)
    k = M.shape[0]
    if k == 0 or not np.any(M):
        return 0.0
    v0 = np.full(k, 1.0 / np.sqrt(k))
    lam, converged, _ = _power_iterate(M, v0, rtol, max_iter)
    if not converged:
        v1 = np.random.default_rng(0x5EED).standard_normal(k)
        v1 /= np.linalg.norm(v1)
        lam2, _, _ = _power_iterate(M, v1, rtol, max_iter)
        lam = max(lam, lam2) if np.isfinite(lam) else lam2
    return max(float(lam), 0.0)


@dataclass(frozen=True)
class PrecisionGaussian:
    """N(m, Q^{-1}) with ``Q m = linear_term``; ``precision`` is ``Q``."""

    precision: np.ndarray
    linear_term: np.ndarray

    def __post_init__(self):
        Q = _check_symmetric(self.precision, "precision")
        b = np.ascontiguousarray(self.linear_term, dtype=np.float64)
        if b.shape != (Q.shape[0],):
            raise ParameterError(
                f"linear term has shape {b.shape}, expected ({Q.shape[0]},)"
            )
        object.__setattr__(self, "precision", np.ascontiguousarray(Q))
        object.__setattr__(self, "linear_term", b)

    @property
    def dim(self) -> int:
        return self.linear_term.shape[0]

    def mean(self) -> np.ndarray:
        L, ok, piv = cholesky_lower(self.precision)
        if not ok:
            raise NumericError(f"precision is not positive definite (pivot {piv:.3e})", piv)
        return _chol_solve(L, self.linear_term)

    def covariance(self) -> np.ndarray:
        return np.linalg.inv(self.precision)


@njit(cache=True)
def cholesky_into(Q, L):
    """Lower Cholesky factor of ``Q`` written into ``L``.

    Returns ``(ok, min_pivot)``; on failure ``min_pivot`` is the first
    non-positive pivot encountered.
    """
    k = Q.shape[0]
    min_piv = np.inf
    for j in range(k):
        s = Q[j, j]
        for m in range(j):
            s -= L[j, m] * L[j, m]
        if s < min_piv:
            min_piv = s
        if not (s > 0.0):
            return False, s
        d = np.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, k):
            t = Q[i, j]
            for m in range(j):
                t -= L[i, m] * L[j, m]
            L[i, j] = t / d
        for i in range(j):
            L[i, j] = 0.0
    return True, min_piv


def cholesky_lower(Q):
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    L = np.zeros_like(Q)
    ok, piv = cholesky_into(Q, L)
    return L, ok, piv


@njit(cache=True)
def forward_solve(L, b, out):
    k = L.shape[0]
    for i in range(k):
        s = b[i]
        for m in range(i):
            s -= L[i, m] * out[m]
        out[i] = s / L[i, i]


@njit(cache=True)
def back_solve_t(L, b, out):
    """Solve ``L^T x = b`` for lower-triangular ``L``."""
    k = L.shape[0]
    for i in range(k - 1, -1, -1):
        s = b[i]
        for m in range(i + 1, k):
            s -= L[m, i] * out[m]
        out[i] = s / L[i, i]


def _chol_solve(L, b):
    w = np.empty_like(b)
    x = np.empty_like(b)
    forward_solve(L, b, w)
    back_solve_t(L, w, x)
    return x


@njit(cache=True)
def precision_gaussian_draw(rng, Q, b, L, work, out):
    """Draw from N(Q^{-1} b, Q^{-1}) into ``out``.

    ``L`` and ``work`` are caller-provided scratch of matching shapes.
    Consumes ``len(b)`` standard normals after a successful factorization.
    """
    ok, piv = cholesky_into(Q, L)
    if not ok:
        return False, piv
    k = b.shape[0]
    forward_solve(L, b, work)
    for i in range(k):
        work[i] += rng.standard_normal()
    back_solve_t(L, work, out)
    return True, piv


def sample_precision_gaussian(g: PrecisionGaussian, rng: np.random.Generator) -> np.ndarray:
    """One draw ``m + L^{-T} u`` where ``Q = L L^T`` and ``u ~ N(0, I)``."""
    k = g.dim
    L = np.zeros((k, k))
    work = np.empty(k)
    out = np.empty(k)
    ok, piv = precision_gaussian_draw(rng, g.precision, g.linear_term, L, work, out)
    if not ok:
        raise NumericError(
            f"Cholesky factorization failed; minimum diagonal pivot {piv:.6e}", piv
        )
    return out
