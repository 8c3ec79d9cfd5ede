"""Chain diagnostics: binned TV against the quadrature oracle, ACF and ESS."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import discrete_tv
from .errors import ParameterError
from .oracle import OracleGrid
from .sampler import SampleStore

MAX_LAG = 50
MIN_DRAWS = 100


@dataclass
class DiagnosticsReport:
    tv_to_oracle: dict | None
    ess: dict
    acf: dict
    runtime_seconds: float | None
    iterations_used: int
    bins: int | None = None
    degenerate: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tv_to_oracle": self.tv_to_oracle,
            "bins": self.bins,
            "ess": self.ess,
            "acf": self.acf,
            "degenerate": self.degenerate,
            "runtime_seconds": self.runtime_seconds,
            "iterations_used": self.iterations_used,
        }


def coordinate_names(p: int) -> list[str]:
    return ["alpha"] + [f"b{j}" for j in range(1, p + 1)]


def _as_chains(samples) -> list[np.ndarray]:
    if isinstance(samples, SampleStore):
        return [c for c in samples.per_chain() if c.shape[0] > 0]
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim == 2:
        return [arr]
    return list(arr)


def tv_to_oracle(samples, oracle: OracleGrid, bins: int = 20) -> dict:
    """Per-marginal histogram TV between draws and the oracle.

    Draws falling outside the oracle's support land in two overflow cells to
    which the oracle assigns zero mass.
    """
    if bins < 10:
        raise ParameterError("bins must be at least 10")
    chains = _as_chains(samples)
    draws = np.concatenate(chains, axis=0) if chains else np.empty((0, 2))
    if draws.shape[0] == 0:
        raise ParameterError("empty sample store")
    if draws.shape[1] != 2:
        raise ParameterError("oracle comparison needs p = 1 draws")
    out = {}
    for axis, name in enumerate(("alpha", "b1")):
        edges = oracle.bin_edges(axis, bins)
        x = draws[:, axis]
        counts = np.histogram(np.clip(x, edges[0], edges[-1]), bins=edges)[0].astype(float)
        below = np.count_nonzero(x < edges[0])
        above = np.count_nonzero(x > edges[-1])
        counts[0] -= below
        counts[-1] -= above
        emp = np.concatenate([[below], counts, [above]]) / x.shape[0]
        ref = np.concatenate([[0.0], oracle.bin_masses(axis, bins), [0.0]])
        out[name] = discrete_tv(emp, ref)
    return out


def autocorrelation(x: np.ndarray, max_lag: int | None = None) -> np.ndarray:
    """Sample autocorrelation by FFT; ``nan`` for a constant series."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    xc = x - x.mean()
    var = xc @ xc
    if var == 0.0:
        m = n if max_lag is None else min(max_lag + 1, n)
        out = np.full(m, np.nan)
        out[0] = 1.0
        return out
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n]
    rho = acov / var
    return rho if max_lag is None else rho[: max_lag + 1]


def ess_initial_positive(x: np.ndarray) -> float:
    """Geyer's initial positive sequence estimator, capped at ``len(x)``."""
    n = x.shape[0]
    rho = autocorrelation(x)
    if np.isnan(rho[1:]).any():
        return float("nan")
    total = 0.0
    for m in range(n // 2):
        pair = rho[2 * m] + rho[2 * m + 1]
        if pair <= 0:
            break
        total += pair
    tau = -1.0 + 2.0 * total
    return float(min(n, n / tau)) if tau > 0 else float(n)


def ess_and_acf(samples, max_lag: int = MAX_LAG):
    """Per-coordinate ESS (summed over chains) and chain-averaged ACF.

    Returns ``(ess, acf, degenerate)``; zero-variance coordinates get
    ``nan`` and are listed in ``degenerate`` instead of raising.
    """
    chains = _as_chains(samples)
    total = sum(c.shape[0] for c in chains)
    if total < MIN_DRAWS:
        raise ParameterError(f"need at least {MIN_DRAWS} stored states, got {total}")
    k = chains[0].shape[1]
    names = coordinate_names(k - 1)
    ess, acf, degenerate = {}, {}, []
    for j, name in enumerate(names):
        per = [ess_initial_positive(c[:, j]) for c in chains if c.shape[0] >= 2]
        rhos = [autocorrelation(c[:, j], max_lag) for c in chains if c.shape[0] > max_lag]
        if any(np.isnan(e) for e in per):
            degenerate.append(name)
            ess[name] = float("nan")
        else:
            ess[name] = float(min(total, sum(per)))
        acf[name] = np.mean(rhos, axis=0).tolist() if rhos else []
    return ess, acf, degenerate


def diagnose(samples, oracle: OracleGrid | None = None, bins: int = 20,
             runtime_seconds: float | None = None) -> DiagnosticsReport:
    ess, acf, degenerate = ess_and_acf(samples)
    if runtime_seconds is None and isinstance(samples, SampleStore):
        runtime_seconds = sum(c.wall_seconds for c in samples.chains) or None
    tv = tv_to_oracle(samples, oracle, bins) if oracle is not None else None
    used = sum(c.shape[0] for c in _as_chains(samples))
    return DiagnosticsReport(tv, ess, acf, runtime_seconds, used,
                             bins if oracle is not None else None, degenerate)
