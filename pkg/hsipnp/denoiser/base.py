from abc import ABC, abstractmethod

from pydantic import BaseModel, ConfigDict

from hsipnp.core.cube import HsiCube
from hsipnp.exception import DimensionError, SpecError
from hsipnp.manager import InstanceManager


class Denoiser(BaseModel, ABC):
    """Blind denoiser: takes a cube, returns a cube of the same shape, no noise-level argument."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str

    @abstractmethod
    def denoise(self, cube: HsiCube) -> HsiCube:
        ...

    def __call__(self, cube: HsiCube) -> HsiCube:
        output = self.denoise(cube)
        if output.shape != cube.shape:
            raise DimensionError(f'{self.name} denoiser changed shape {cube.shape} -> {output.shape}')
        return output


DENOISERS: InstanceManager[str, type[Denoiser]] = InstanceManager(name='denoiser')


@DENOISERS.register('identity')
class IdentityDenoiser(Denoiser):
    name: str = 'identity'

    def denoise(self, cube: HsiCube) -> HsiCube:
        return cube


@DENOISERS.register('ridge')
class RidgeDenoiser(Denoiser):
    """z / (1 + alpha): the proximal map of a quadratic penalty, for which PnP-ADMM reduces to Tikhonov."""
    name: str = 'ridge'
    alpha: float = 0.1

    def model_post_init(self, context, /) -> None:
        if self.alpha < 0:
            raise SpecError(f'alpha must be non-negative, got {self.alpha}')

    def denoise(self, cube: HsiCube) -> HsiCube:
        return HsiCube(data=cube.data / (1.0 + self.alpha))
