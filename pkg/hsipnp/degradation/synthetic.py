import numpy as np

from hsipnp.core.cube import HsiCube
from hsipnp.degradation.noise import make_generator
from hsipnp.exception import SpecError


def synthesize_smooth_cube(
    bands: int,
    rows: int,
    cols: int,
    seed: int = 0,
    components: int = 6,
    max_frequency: int = 3,
) -> HsiCube:
    """Band-limited clean cube: 0.5 plus a few periodic low-frequency 3D cosines, kept inside [0.05, 0.95]."""
    if components < 1 or max_frequency < 0:
        raise SpecError('Need at least one component and a non-negative maximum frequency')

    rng = make_generator(seed)
    n, p, q = np.meshgrid(
        np.arange(bands) / bands,
        np.arange(rows) / rows,
        np.arange(cols) / cols,
        indexing='ij',
    )
    spectral_max = min(max_frequency, bands // 2)
    amplitudes = rng.uniform(0.2, 1.0, size=components)
    amplitudes *= 0.45 / amplitudes.sum()

    data = np.full((bands, rows, cols), 0.5)
    for amplitude in amplitudes:
        f_n = rng.integers(0, spectral_max + 1)
        f_p, f_q = rng.integers(0, max_frequency + 1, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        data += amplitude * np.cos(2.0 * np.pi * (f_n * n + f_p * p + f_q * q) + phase)
    return HsiCube(data=data)


def normalize_quantile(cube: HsiCube, quantile: float = 0.999) -> HsiCube:
    """Scale the cube so its ``quantile`` intensity maps to 1."""
    if not 0 < quantile <= 1:
        raise SpecError(f'Quantile must lie in (0, 1], got {quantile}')
    level = float(np.quantile(cube.data, quantile))
    if level <= 0:
        raise SpecError(f'Quantile {quantile} of the cube is {level}, cannot normalise')
    return HsiCube(data=cube.data / level)
