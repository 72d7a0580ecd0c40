import pytest

from nanochiral.fiber_modes import FiberSpec, solve_he11
from nanochiral.scattering import ModelParams


@pytest.fixture(scope="session")
def spec() -> FiberSpec:
    """315 nm silica nanofiber in air at 532 nm."""
    return FiberSpec.silica(157.5e-9, 532e-9)


@pytest.fixture(scope="session")
def sol(spec):
    return solve_he11(spec)


@pytest.fixture
def bare_params() -> ModelParams:
    """Unit amplitude, no background, no offset."""
    return ModelParams(kappa_f=1.0, c0=0.0, phi0_offset=0.0)
