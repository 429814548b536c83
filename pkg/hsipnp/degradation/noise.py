from __future__ import annotations

import numpy as np
from pydantic import BaseModel

from hsipnp.core.cube import HsiCube, KernelStack
from hsipnp.core.fourier import circ_convolve
from hsipnp.exception import SpecError
from hsipnp.logger import logger


class NoiseSpec(BaseModel):
    """i.i.d. Gaussian noise on the [0, 1] scale; ``snr_db``, when given, overrides ``sigma``."""
    sigma: float = 0.0
    seed: int = 0
    snr_db: float | None = None

    def check(self) -> NoiseSpec:
        if self.sigma < 0:
            raise SpecError(f'Noise sigma must be non-negative, got {self.sigma}')
        if not 0 <= self.seed < 2 ** 64:
            raise SpecError(f'Noise seed must fit in 64 bits, got {self.seed}')
        return self

    def resolve_sigma(self, signal: np.ndarray) -> float:
        if self.snr_db is None:
            return self.sigma
        power = float(np.mean(signal ** 2))
        return float(np.sqrt(power / 10.0 ** (self.snr_db / 10.0)))


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def noise_cube(shape: tuple[int, int, int], sigma: float, seed: int) -> np.ndarray:
    return sigma * make_generator(seed).standard_normal(shape)


def degrade(x: HsiCube, kernels: KernelStack, noise: NoiseSpec) -> HsiCube:
    """y = Hx + n."""
    noise.check()
    blurred = circ_convolve(x, kernels)
    sigma = noise.resolve_sigma(blurred.data)
    logger.debug(f'degrade: shape={x.shape} kernels={kernels.bands}x{kernels.kh}x{kernels.kw} sigma={sigma:.6g}')
    if sigma == 0:
        return blurred
    return HsiCube(data=blurred.data + noise_cube(x.shape, sigma, noise.seed))
