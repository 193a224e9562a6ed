import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_swe_states(rng, n, h_range=(0.05, 3.5), u_range=(-2.5, 2.5)):
    h = rng.uniform(*h_range, n)
    u = rng.uniform(*u_range, n)
    return np.column_stack([h, h * u])


def random_normals(rng, n):
    ang = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([np.cos(ang), np.sin(ang)])


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_CRITERIA = range(1, 14)
_acceptance_results = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records and prints one acceptance verdict."""

    def record(n, ok, detail):
        line = f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _acceptance_results[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for n in ACCEPTANCE_CRITERIA:
        terminalreporter.write_line(_acceptance_results.get(n, f"CRITERION {n:2d}: ----  not run in this session"))
