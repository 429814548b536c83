import numpy as np
from scipy import fft

from hsipnp.core.cube import HsiCube
from hsipnp.denoiser.base import DENOISERS, Denoiser
from hsipnp.exception import SpecError


def baseline_denoise(z: HsiCube, strength: float) -> HsiCube:
    """Soft-shrink the 3D spectrum by ``strength`` times its median coefficient magnitude."""
    if strength < 0:
        raise SpecError(f'Shrinkage strength must be non-negative, got {strength}')
    if strength == 0:
        return HsiCube(data=z.data)

    spectrum = fft.fftn(z.data)
    magnitude = np.abs(spectrum)
    threshold = strength * float(np.median(magnitude))
    with np.errstate(divide='ignore', invalid='ignore'):
        gain = np.where(magnitude > threshold, 1.0 - threshold / magnitude, 0.0)
    return HsiCube(data=fft.ifftn(spectrum * gain).real)


@DENOISERS.register('baseline')
class SpectralShrinkageDenoiser(Denoiser):
    name: str = 'baseline'
    strength: float = 2.0

    def model_post_init(self, context, /) -> None:
        if self.strength < 0:
            raise SpecError(f'Shrinkage strength must be non-negative, got {self.strength}')

    def denoise(self, cube: HsiCube) -> HsiCube:
        return baseline_denoise(cube, self.strength)
