"""Data augmentation chain driver.

One iteration draws ``xi = 1/tau`` coordinatewise from the inverse Gaussian
(Levy when ``beta_j = 0``), then the model latents given ``(alpha, beta)``,
then ``(alpha, beta)`` jointly from its Gaussian conditional. The per-step
work runs in a single jitted kernel so that :func:`step` and :func:`run`
consume a chain's random stream identically.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from numba import njit

from .distributions import inv_gaussian_draw
from .errors import NumericError, ParameterError
from .linalg import precision_gaussian_draw
from .models import Dataset, conditional_fill, latent_fill

log = logging.getLogger(__name__)

CHOLESKY_JITTER = 1e-10

STATUS_OK = 0
STATUS_JITTERED = 1
STATUS_FAILED = 2


@dataclass(frozen=True)
class ChainState:
    alpha: float
    beta: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=np.float64).reshape(-1))

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.alpha], self.beta])


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int
    burn_in: int = 0
    thin: int = 1
    chains: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ParameterError("iterations must be positive")
        if self.thin < 1:
            raise ParameterError("thin must be positive")
        if self.chains < 1:
            raise ParameterError("chains must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ParameterError("burn_in must satisfy 0 <= burn_in < iterations")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")

    @property
    def stored_per_chain(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


class InitialDistribution(Protocol):
    def __call__(self, rng: np.random.Generator) -> tuple[float, np.ndarray]: ...


@dataclass(frozen=True)
class PointMass:
    """Debugging initializer: every chain starts at the same point."""

    alpha: float = 0.0
    beta: np.ndarray | None = None
    p: int = 1

    def __call__(self, rng):
        beta = np.zeros(self.p) if self.beta is None else np.asarray(self.beta, dtype=float)
        return float(self.alpha), beta.copy()


def warm_start_initializer(data: Dataset) -> Callable:
    """Initial distribution omega_{eta, L} for ``data``."""
    from .bounds import sample_warm_start, warm_start

    ws = warm_start(data)
    lam = data.hyper.lam
    return lambda rng: sample_warm_start(ws, lam, rng)


def chain_rng(seed: int, chain: int) -> np.random.Generator:
    """Independent stream for ``chain`` derived from ``seed`` alone."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chain,))))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def xi_fill(rng, beta, lam, xi):
    shape = lam * lam
    for j in range(beta.shape[0]):
        b = abs(beta[j])
        mu = lam / b if b > 0.0 else np.inf
        xi[j] = inv_gaussian_draw(rng, mu, shape)


@njit(cache=True)
def da_step(rng, kind, X, y, lam, theta, gamma, ab, xi, z, Q, b, L, work, out):
    """One iteration from ``ab`` into ``out``; returns (status, min_pivot)."""
    xi_fill(rng, ab[1:], lam, xi)
    latent_fill(rng, kind, X, y, ab, gamma, z)
    conditional_fill(kind, X, y, z, xi, theta, Q, b)
    ok, piv = precision_gaussian_draw(rng, Q, b, L, work, out)
    if ok:
        return 0, piv
    for r in range(Q.shape[0]):
        Q[r, r] += CHOLESKY_JITTER
    ok, piv = precision_gaussian_draw(rng, Q, b, L, work, out)
    if ok:
        return 1, piv
    return 2, piv


@njit(cache=True, nogil=True)
def run_kernel(rng, kind, X, y, lam, theta, gamma, ab0, iterations, burn_in, thin,
               draws, iters):
    """Run one chain; returns (stored, status, pivot, failed_iteration)."""
    n, k = X.shape
    p = k - 1
    xi = np.empty(p)
    z = np.empty(n)
    Q = np.empty((k, k))
    b = np.empty(k)
    L = np.zeros((k, k))
    work = np.empty(k)
    cur = ab0.copy()
    nxt = np.empty(k)
    stored = 0
    jittered = 0
    for t in range(1, iterations + 1):
        status, piv = da_step(rng, kind, X, y, lam, theta, gamma, cur, xi, z, Q, b, L, work, nxt)
        if status == 2:
            return stored, 2, piv, t
        if status == 1:
            jittered += 1
        tmp = cur
        cur = nxt
        nxt = tmp
        if t > burn_in and (t - burn_in) % thin == 0:
            for r in range(k):
                draws[stored, r] = cur[r]
            iters[stored] = t
            stored += 1
    return stored, 1 if jittered > 0 else 0, np.nan, jittered


@njit(cache=True)
def ensemble_kernel(rng, kind, X, y, lam, theta, gamma, ab_in, ab_out):
    n, k = X.shape
    p = k - 1
    xi = np.empty(p)
    z = np.empty(n)
    Q = np.empty((k, k))
    b = np.empty(k)
    L = np.zeros((k, k))
    work = np.empty(k)
    nxt = np.empty(k)
    for m in range(ab_in.shape[0]):
        status, piv = da_step(rng, kind, X, y, lam, theta, gamma, ab_in[m], xi, z, Q, b, L,
                              work, nxt)
        if status == 2:
            return m, piv
        for r in range(k):
            ab_out[m, r] = nxt[r]
    return -1, np.nan


# ---------------------------------------------------------------------------
# python entry points
# ---------------------------------------------------------------------------


def _model_args(data: Dataset):
    h = data.hyper
    return (data.kind_code, data.X.rows, data.y, float(h.lam), float(h.theta), data.gamma_or_nan)


def update_xi(beta, lam: float, rng: np.random.Generator) -> np.ndarray:
    """Draw xi_j = 1/tau_j ~ InvGaussian(lam/|beta_j|, lam^2) for every j."""
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam!r}")
    beta = np.ascontiguousarray(beta, dtype=np.float64).reshape(-1)
    xi = np.empty_like(beta)
    xi_fill(rng, beta, float(lam), xi)
    return xi


def step_latents(data: Dataset, state: ChainState, rng: np.random.Generator):
    """One iteration, also returning the ``(xi, z)`` drawn along the way."""
    if state.beta.shape[0] != data.p:
        raise ParameterError(f"state has p={state.beta.shape[0]}, data has p={data.p}")
    k = data.p + 1
    xi = np.empty(data.p)
    z = np.empty(data.n)
    Q = np.empty((k, k))
    b = np.empty(k)
    L = np.zeros((k, k))
    work = np.empty(k)
    out = np.empty(k)
    status, piv = da_step(rng, *_model_args(data), state.vector(), xi, z, Q, b, L, work, out)
    if status == STATUS_FAILED:
        raise NumericError(
            f"conditional precision not positive definite after jitter (pivot {piv:.3e})", piv
        )
    return ChainState(float(out[0]), out[1:].copy(), state.iteration + 1), xi, z


def step(data: Dataset, state: ChainState, rng: np.random.Generator) -> ChainState:
    return step_latents(data, state, rng)[0]


def step_ensemble(data: Dataset, alpha, beta, rng: np.random.Generator):
    """Advance many independent states one iteration each.

    ``alpha`` has shape ``(m,)`` and ``beta`` shape ``(m, p)``; members are
    stepped in order using the single stream ``rng``.
    """
    ab = np.ascontiguousarray(np.column_stack([alpha, beta]), dtype=np.float64)
    out = np.empty_like(ab)
    failed, piv = ensemble_kernel(rng, *_model_args(data), ab, out)
    if failed >= 0:
        raise NumericError(f"ensemble member {failed} failed to factorize", piv)
    return out[:, 0].copy(), out[:, 1:].copy()


@dataclass
class ChainRecord:
    chain: int
    iters: np.ndarray
    draws: np.ndarray
    wall_seconds: float = 0.0
    failure: dict | None = None
    jittered_steps: int = 0

    @property
    def draw_count(self) -> int:
        return int(self.draws.shape[0])


@dataclass
class SampleStore:
    p: int
    chains: list[ChainRecord] = field(default_factory=list)

    @property
    def failures(self) -> list[dict]:
        return [c.failure for c in self.chains if c.failure is not None]

    def draws(self) -> np.ndarray:
        """All stored states stacked, shape ``(total, 1+p)``."""
        if not self.chains:
            return np.empty((0, self.p + 1))
        return np.concatenate([c.draws for c in self.chains], axis=0)

    def per_chain(self) -> list[np.ndarray]:
        return [c.draws for c in self.chains]

    def __len__(self) -> int:
        return sum(c.draw_count for c in self.chains)

    def summary(self) -> dict:
        return {
            "p": self.p,
            "chains": [
                {
                    "chain": c.chain,
                    "draws": c.draw_count,
                    "jittered_steps": c.jittered_steps,
                    "failure": c.failure,
                }
                for c in self.chains
            ],
        }


def _run_one(data: Dataset, config: SamplerConfig, init, chain: int) -> ChainRecord:
    rng = chain_rng(config.seed, chain)
    t0 = time.perf_counter()
    alpha0, beta0 = init(rng)
    ab0 = np.concatenate([[float(alpha0)], np.asarray(beta0, dtype=float).reshape(-1)])
    m = config.stored_per_chain
    draws = np.empty((m, data.p + 1))
    iters = np.empty(m, dtype=np.int64)
    stored, status, piv, info = run_kernel(
        rng, *_model_args(data), ab0, config.iterations, config.burn_in, config.thin, draws, iters
    )
    wall = time.perf_counter() - t0
    rec = ChainRecord(chain, iters[:stored].copy(), draws[:stored].copy(), wall)
    if status == STATUS_FAILED:
        rec.failure = {"chain": chain, "iteration": int(info), "min_pivot": float(piv)}
        log.warning("chain %d aborted at iteration %d (min pivot %.3e)", chain, info, piv)
    else:
        rec.jittered_steps = int(info)
    log.info("chain %d: %d draws in %.3fs", chain, stored, wall)
    return rec


def run(data: Dataset, config: SamplerConfig, init: InitialDistribution | None = None,
        workers: int | None = None) -> SampleStore:
    """Run ``config.chains`` independent chains.

    Chain ``c`` draws from :func:`chain_rng` ``(seed, c)`` only, so its output
    does not depend on the other chains or on thread scheduling. ``init``
    defaults to the warm start for ``data``.
    """
    if init is None:
        init = warm_start_initializer(data)
    workers = workers or min(config.chains, os.cpu_count() or 1)
    if workers == 1 or config.chains == 1:
        records = [_run_one(data, config, init, c) for c in range(config.chains)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(lambda c: _run_one(data, config, init, c), range(config.chains)))
    return SampleStore(data.p, records)
