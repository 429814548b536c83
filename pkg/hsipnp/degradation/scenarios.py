from pydantic import BaseModel

from hsipnp.core.constants import KernelKind
from hsipnp.degradation.kernels import KernelSpec
from hsipnp.degradation.noise import NoiseSpec
from hsipnp.manager import InstanceManager


class Scenario(BaseModel):
    name: str
    kernel: KernelSpec
    sigma: float

    def noise(self, seed: int, sigma: float | None = None) -> NoiseSpec:
        return NoiseSpec(sigma=self.sigma if sigma is None else sigma, seed=seed).check()


SCENARIOS: InstanceManager[str, Scenario] = InstanceManager(name='scenario')

for _scenario in (
    Scenario(name='a', kernel=KernelSpec(kind=KernelKind.GAUSSIAN, size=9, bandwidth=2), sigma=0.01),
    Scenario(name='b', kernel=KernelSpec(kind=KernelKind.GAUSSIAN, size=13, bandwidth=3), sigma=0.01),
    Scenario(name='c', kernel=KernelSpec(kind=KernelKind.GAUSSIAN, size=9, bandwidth=2), sigma=0.03),
    Scenario(name='d', kernel=KernelSpec(kind=KernelKind.CIRCLE, size=7, diameter=7), sigma=0.01),
    # Parametric stand-in for the recorded 13x13 camera-shake kernel.
    Scenario(name='e', kernel=KernelSpec(kind=KernelKind.MOTION, size=13, length=9, angle=45), sigma=0.01),
    Scenario(name='f', kernel=KernelSpec(kind=KernelKind.SQUARE, size=5, side=5), sigma=0.01),
):
    _scenario.kernel.check()
    SCENARIOS[_scenario.name] = _scenario
