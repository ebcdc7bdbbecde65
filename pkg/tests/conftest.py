import numpy as np
import pytest

import fermipulse as fp


@pytest.fixture(scope="session")
def trap():
    return fp.TrapModel()


@pytest.fixture(scope="session")
def pulse():
    return fp.PulseModel.two_pi()


@pytest.fixture(scope="session")
def state_cache():
    """Session-wide cache of solved thermal states keyed by (N, tau, stat)."""
    cache = {}

    def get(n_atoms, tau, statistics=fp.Statistics.FERMI_DIRAC):
        key = (n_atoms, round(tau, 12), statistics)
        if key not in cache:
            cache[key] = fp.solve_fugacity(n_atoms, tau, statistics)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
