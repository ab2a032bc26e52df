import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spikes(rng, m):
    """Random non-increasing spikes via random gaps normalized to sum j*theta_j = 1."""
    theta = rng.exponential(size=m)
    if m > 1:
        theta[rng.random(m) < 0.2] = 0.0
    if theta.sum() == 0.0:
        theta[0] = 1.0
    theta /= np.dot(np.arange(1, m + 1), theta)
    return np.cumsum(theta[::-1])[::-1]


def random_feasible_eps(rng, m, fill=None):
    """Random lower bounds with sum j*eps_j = fill (uniform in [0, 1) by default)."""
    raw = rng.random(m) * (rng.random(m) < 0.7)
    mass = np.dot(np.arange(1, m + 1), raw)
    if mass == 0.0:
        return np.zeros(m)
    target = rng.random() if fill is None else fill
    return raw * (target / mass)


def random_monotone(rng, m, scale=100.0):
    vals = np.sort(rng.random(m) * scale)[::-1]
    # inject ties
    for j in range(1, m):
        if rng.random() < 0.2:
            vals[j] = vals[j - 1]
    return vals


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
