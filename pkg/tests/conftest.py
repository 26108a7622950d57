import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=50, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_image(rng, n, complex_=False):
    u = rng.standard_normal((n, n))
    if complex_:
        u = u + 1j * rng.standard_normal((n, n))
    return u


def rel_adjoint_gap(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Append ``(number, passed, detail)``; printed in the terminal summary."""
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
