"""Brute-force quadrature of the two-dimensional (p = 1) posterior.

The grid is ground truth for the sampler tests: the unnormalized log
posterior is evaluated on a uniform ``resolution x resolution`` lattice whose
bounds are grown outward from the posterior mode until the density on every
edge has fallen below ``EDGE_RATIO`` times the peak, then normalized with the
trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import GridBoundsError, ParameterError
from .models import Dataset, neg_log_likelihood

EDGE_RATIO = 1e-12
MAX_N = 100
CD_MAX_ITER = 200
CD_TOL = 1e-10


def log_posterior_unnormalized(data: Dataset, alpha, beta):
    """log f(y | alpha, beta) - theta^2 alpha^2 / 2 - lam |beta|_1."""
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    h = data.hyper
    return (
        -neg_log_likelihood(data, alpha, beta)
        - 0.5 * h.theta**2 * alpha**2
        - h.lam * np.abs(beta).sum(axis=-1)
    )


def posterior_mode(data: Dataset, max_iter: int = CD_MAX_ITER, tol: float = CD_TOL) -> np.ndarray:
    """Minimizer of the penalized objective by cyclic coordinate descent."""
    k = data.p + 1
    x = np.zeros(k)

    def objective(v):
        return -float(log_posterior_unnormalized(data, v[0], v[1:]))

    for _ in range(max_iter):
        x_old = x.copy()
        for j in range(k):
            def f(t, j=j):
                v = x.copy()
                v[j] = t
                return objective(v)

            res = minimize_scalar(f, bracket=(x[j] - 1.0, x[j] + 1.0), method="brent",
                                  options={"xtol": 1e-12})
            if f(res.x) <= f(x[j]):
                x[j] = res.x
        if np.max(np.abs(x - x_old)) <= tol * max(1.0, np.max(np.abs(x))):
            break
    return x


@dataclass(frozen=True)
class OracleGrid:
    alpha_nodes: np.ndarray
    beta_nodes: np.ndarray
    log_density: np.ndarray  # normalized, indexed [alpha, beta]
    cell_mass: np.ndarray
    mode: np.ndarray

    @property
    def resolution(self) -> int:
        return self.alpha_nodes.shape[0]

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        a, b = self.alpha_nodes, self.beta_nodes
        return (float(a[0]), float(a[-1])), (float(b[0]), float(b[-1]))

    def nodes(self, axis: int) -> np.ndarray:
        return self.alpha_nodes if axis == 0 else self.beta_nodes

    def marginal_density(self, axis: int) -> np.ndarray:
        """Marginal density at the nodes of ``axis`` (0 = alpha, 1 = beta)."""
        other = self.nodes(1 - axis)
        w = _trapezoid_weights(other)
        dens = np.exp(self.log_density)
        return dens @ w if axis == 0 else w @ dens

    def marginal_cdf(self, axis: int, x) -> np.ndarray:
        nodes = self.nodes(axis)
        f = self.marginal_density(axis)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(nodes))])
        cdf /= cdf[-1]
        return np.interp(x, nodes, cdf, left=0.0, right=1.0)

    def bin_edges(self, axis: int, bins: int) -> np.ndarray:
        nodes = self.nodes(axis)
        return np.linspace(nodes[0], nodes[-1], bins + 1)

    def bin_masses(self, axis: int, bins: int) -> np.ndarray:
        c = self.marginal_cdf(axis, self.bin_edges(axis, bins))
        m = np.diff(c)
        return m / m.sum()

    def mean(self) -> np.ndarray:
        A, B = np.meshgrid(self.alpha_nodes, self.beta_nodes, indexing="ij")
        return np.array([(A * self.cell_mass).sum(), (B * self.cell_mass).sum()])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Approximate exact draws: pick a grid cell by mass, jitter within it."""
        flat = self.cell_mass.ravel()
        idx = rng.choice(flat.size, size=size, p=flat)
        ia, ib = np.unravel_index(idx, self.cell_mass.shape)
        ha = self.alpha_nodes[1] - self.alpha_nodes[0]
        hb = self.beta_nodes[1] - self.beta_nodes[0]
        a = self.alpha_nodes[ia] + ha * (rng.random(size) - 0.5)
        b = self.beta_nodes[ib] + hb * (rng.random(size) - 0.5)
        (alo, ahi), (blo, bhi) = self.bounds
        return np.column_stack([np.clip(a, alo, ahi), np.clip(b, blo, bhi)])


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    h = nodes[1] - nodes[0]
    w = np.full(nodes.shape[0], h)
    w[0] = w[-1] = 0.5 * h
    return w


def _edge_max(data, a_lo, a_hi, b_lo, b_hi, res):
    """Max unnormalized log density along each edge: (a_lo, a_hi, b_lo, b_hi)."""
    a = np.linspace(a_lo, a_hi, res)
    b = np.linspace(b_lo, b_hi, res)
    out = []
    for fixed_a in (a_lo, a_hi):
        out.append(np.max(log_posterior_unnormalized(data, np.full(res, fixed_a), b[:, None])))
    for fixed_b in (b_lo, b_hi):
        out.append(np.max(log_posterior_unnormalized(data, a, np.full((res, 1), fixed_b))))
    return np.array(out)


def _auto_bounds(data: Dataset, mode: np.ndarray, peak: float, res: int):
    cut = peak + math.log(EDGE_RATIO)
    widths = np.full(4, 0.5)  # a_lo, a_hi, b_lo, b_hi distances from the mode
    for _ in range(400):
        lo_hi = (mode[0] - widths[0], mode[0] + widths[1], mode[1] - widths[2], mode[1] + widths[3])
        edges = _edge_max(data, *lo_hi, res)
        grow = edges >= cut
        if not grow.any():
            return lo_hi
        widths[grow] *= 1.25
    raise GridBoundsError("could not bracket posterior mass within 400 expansions")


def quadrature_oracle(data: Dataset, resolution: int = 400, bounds=None) -> OracleGrid:
    """Normalized posterior on a uniform grid (p = 1 only).

    ``bounds`` may be given as ``((a_lo, a_hi), (b_lo, b_hi))``; otherwise it
    is detected automatically. Raises :class:`GridBoundsError` when the edge
    density exceeds ``EDGE_RATIO`` times the peak.
    """
    if data.p != 1:
        raise ParameterError(f"quadrature oracle supports p = 1 only, got p = {data.p}")
    if data.n > MAX_N:
        raise ParameterError(f"quadrature oracle supports n <= {MAX_N}, got n = {data.n}")
    if resolution < 10:
        raise ParameterError("resolution must be at least 10")
    mode = posterior_mode(data)
    peak = float(log_posterior_unnormalized(data, mode[0], mode[1:]))
    if bounds is None:
        a_lo, a_hi, b_lo, b_hi = _auto_bounds(data, mode, peak, resolution)
    else:
        (a_lo, a_hi), (b_lo, b_hi) = bounds
    a = np.linspace(a_lo, a_hi, resolution)
    b = np.linspace(b_lo, b_hi, resolution)
    logd = np.empty((resolution, resolution))
    for i, ai in enumerate(a):
        logd[i] = log_posterior_unnormalized(data, np.full(resolution, ai), b[:, None])
    top = max(peak, float(logd.max()))
    edge = max(logd[0].max(), logd[-1].max(), logd[:, 0].max(), logd[:, -1].max())
    if edge - top > math.log(EDGE_RATIO):
        raise GridBoundsError(
            f"edge density ratio {math.exp(edge - top):.3e} exceeds {EDGE_RATIO:g}; "
            "widen the bounds (e.g. by 50% on each side)"
        )
    wa, wb = _trapezoid_weights(a), _trapezoid_weights(b)
    unnorm = np.exp(logd - top)
    Z = wa @ unnorm @ wb
    log_density = logd - top - math.log(Z)
    mass = wa[:, None] * np.exp(log_density) * wb[None, :]
    mass /= mass.sum()
    return OracleGrid(a, b, log_density, mass, mode)
