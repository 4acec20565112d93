import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dislocation_lab.dirac_point import dirac_point
from dislocation_lab.effective import DomainWall, EffectiveDiracOperator
from dislocation_lab.fourier import cosine, sine, zero

settings.register_profile("lab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture(scope="session")
def reference():
    """V = 0, W = 2 sin(2 pi x) and its Dirac point."""
    V, W = zero(), sine(2.0, 1)
    return V, W, dirac_point(V, W)


@pytest.fixture(scope="session")
def cosine_model():
    V, W = cosine(2.0, 2), sine(2.0, 1)
    return V, W, dirac_point(V, W)


def effective(dp, width_natural=1.0, shape="tanh"):
    L = abs(dp.nu_star) / abs(dp.theta_star)
    return EffectiveDiracOperator.from_dirac_point(dp, DomainWall(shape, width_natural * L))


@pytest.fixture(scope="session")
def reference_effective(reference):
    return effective(reference[2])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def report_line():
    """Record one PASS/FAIL line per acceptance criterion (echoed in the terminal summary)."""
    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        print(line)
        _CRITERIA.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
