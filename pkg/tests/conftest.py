import numpy as np
import pytest

from hsipnp.core.cube import HsiCube, KernelStack
from hsipnp.degradation.kernels import KernelSpec, make_kernel
from hsipnp.degradation.synthetic import synthesize_smooth_cube
from hsipnp.logger import logger


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def smooth_cube() -> HsiCube:
    return synthesize_smooth_cube(4, 16, 16, seed=3)


@pytest.fixture
def gaussian3() -> KernelStack:
    return make_kernel(KernelSpec.parse('gaussian:3:1'))


@pytest.fixture
def scenario_a_kernel() -> KernelStack:
    return make_kernel(KernelSpec.parse('gaussian:9:2'))


@pytest.fixture(autouse=True)
def _silence_logging():
    yield
    logger.remove()
    logger.disable('hsipnp')
