import numpy as np
import pytest

from dalasso.linalg import DesignMatrix
from dalasso.models import Dataset, HyperParams
from dalasso.synthetic import generate_synthetic

KIND_LIST = ["probit", "logistic", "hetero_gaussian"]

_ACCEPTANCE = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE.append((label, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def make_dataset(kind, y, x, lam=1.0, theta=1.0, gamma=None):
    if kind == "hetero_gaussian" and gamma is None:
        gamma = 1.0
    return Dataset(kind, np.asarray(y, float), DesignMatrix.from_covariates(x),
                   HyperParams(lam, theta, gamma if kind == "hetero_gaussian" else None))


@pytest.fixture(params=KIND_LIST)
def kind(request):
    return request.param


@pytest.fixture
def toy(kind):
    """n = 20, p = 1, lambda = theta = gamma = 1."""
    return generate_synthetic(kind, 20, 1, 1.0, 0.0, seed=7)
