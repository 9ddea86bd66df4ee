import numpy as np
import pytest

from garchmc import GarchParams


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def bench_params():
    return GarchParams(omega=0.1, alpha=0.1, beta=0.8)


@pytest.fixture(scope="session")
def small_returns():
    """Short synthetic series shared by sampler and CLI tests."""
    from garchmc import simulate

    return simulate(GarchParams(omega=0.1, alpha=0.1, beta=0.8), 300, seed=5)


@pytest.fixture(scope="session")
def protocol_returns():
    """Protocol-sized series; its posterior is tight enough for acceptance
    rates to be stable across pilot seeds."""
    from garchmc import simulate

    return simulate(GarchParams(omega=0.1, alpha=0.1, beta=0.8), 2000, seed=12)
