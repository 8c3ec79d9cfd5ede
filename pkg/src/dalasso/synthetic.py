"""Synthetic datasets drawn from the three likelihoods."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit, ndtr

from .errors import ParameterError
from .linalg import DesignMatrix
from .models import HETERO, KINDS, LOGISTIC, PROBIT, Dataset, HyperParams


def generate_synthetic(kind: str, n: int, p: int, lambda_true: float, sparsity: float,
                       seed: int, theta: float = 1.0, gamma: float = 1.0) -> Dataset:
    """Standard normal covariates, Laplace(lambda_true) coefficients.

    ``ceil(sparsity * p)`` coefficients are set to zero. The intercept is
    drawn from N(0, theta^{-2}). Heteroskedastic data uses Laplace noise of
    scale ``1/gamma`` directly. The returned dataset's hyperparameters are
    ``(lambda_true, theta, gamma)`` and its ``truth`` holds the parameters.
    """
    if kind not in KINDS:
        raise ParameterError(f"kind must be one of {KINDS}, got {kind!r}")
    if n < 1 or p < 1:
        raise ParameterError("n and p must be at least 1")
    if not 0.0 <= sparsity <= 1.0:
        raise ParameterError(f"sparsity must lie in [0, 1], got {sparsity!r}")
    if not lambda_true > 0:
        raise ParameterError("lambda_true must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    alpha = rng.standard_normal() / theta
    beta = rng.laplace(0.0, 1.0 / lambda_true, size=p)
    n_zero = math.ceil(sparsity * p)
    beta[rng.permutation(p)[:n_zero]] = 0.0
    eta = alpha + x @ beta
    if kind == PROBIT:
        y = (rng.random(n) < ndtr(eta)).astype(float)
    elif kind == LOGISTIC:
        y = (rng.random(n) < expit(eta)).astype(float)
    else:
        y = eta + rng.laplace(0.0, 1.0 / gamma, size=n)
    hyper = HyperParams(lambda_true, theta, gamma if kind == HETERO else None)
    return Dataset(kind, y, DesignMatrix.from_covariates(x), hyper,
                   truth={"alpha": float(alpha), "beta": beta.tolist()})
