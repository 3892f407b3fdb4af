import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hydrosense.arrays import ArrayConfig

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def array4():
    return ArrayConfig(4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hpd(rng, m, cond=100.0):
    """Random Hermitian positive-definite matrix with bounded condition number."""
    q, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    lam = np.geomspace(1.0, cond, m)
    return (q * lam) @ q.conj().T
