import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def central_diff(fn, x, h):
    """Second-order central differences of ``fn: (N, d) -> (N, k)``; returns grad, diag2 ``(N, k, d)``."""
    x = np.asarray(x, dtype=np.float64)
    f0 = fn(x)
    d = x.shape[1]
    grad = np.empty(f0.shape + (d,))
    diag2 = np.empty(f0.shape + (d,))
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        fp, fm = fn(x + e), fn(x - e)
        grad[..., i] = (fp - fm) / (2 * h)
        diag2[..., i] = (fp - 2 * f0 + fm) / (h * h)
    return grad, diag2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
