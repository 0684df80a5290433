import pytest

from pyrofront.kernels import make_step
from pyrofront.waves import WaveParams, solve


@pytest.fixture(scope="session")
def unit_step():
    """Unit-mass step kernel with intensity 10 and radius 0.05."""
    return make_step(10.0, 0.05)


@pytest.fixture(scope="session")
def wave3(unit_step):
    return solve(WaveParams(3.0, 1.0, unit_step, 1.0, 20001))


@pytest.fixture(scope="session")
def wide_step():
    return make_step(1.0, 0.5)


@pytest.fixture(scope="session")
def wave3_wide(wide_step):
    return solve(WaveParams(3.0, 1.0, wide_step, 3.0, 3501))
