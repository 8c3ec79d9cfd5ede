"""Data augmentation Gibbs sampling for Bayesian lasso GLMs, with convergence certificates."""

from .bounds import BoundReport, WarmStart, full_report, warm_start
from .errors import GridBoundsError, NumericError, ParameterError
from .linalg import DesignMatrix, PrecisionGaussian
from .models import Dataset, HyperParams
from .oracle import OracleGrid, quadrature_oracle
from .sampler import ChainState, SampleStore, SamplerConfig, run, step
from .synthetic import generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ChainState",
    "Dataset",
    "DesignMatrix",
    "GridBoundsError",
    "HyperParams",
    "NumericError",
    "OracleGrid",
    "ParameterError",
    "PrecisionGaussian",
    "SampleStore",
    "SamplerConfig",
    "WarmStart",
    "full_report",
    "generate_synthetic",
    "quadrature_oracle",
    "run",
    "step",
    "warm_start",
]
