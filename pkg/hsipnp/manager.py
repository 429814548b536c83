from collections.abc import Callable, Iterator

from pydantic import BaseModel, PrivateAttr


class InstanceManager[InstanceKey, InstanceObj](BaseModel):
    """Named registry, e.g. scenario presets or denoiser factories."""
    name: str = 'instance'

    _instances: dict[InstanceKey, InstanceObj] = PrivateAttr(default_factory=dict)

    def __setitem__(self, key: InstanceKey, value: InstanceObj):
        self._instances[key] = value

    def __getitem__(self, key: InstanceKey) -> InstanceObj:
        try:
            return self._instances[key]
        except KeyError:
            raise KeyError(f'Unknown {self.name} {key!r}, expected one of {sorted(self._instances)}') from None

    def __contains__(self, key: object) -> bool:
        return key in self._instances

    def __iter__(self) -> Iterator[InstanceKey]:
        return iter(self._instances)

    def register(self, key: InstanceKey) -> Callable[[InstanceObj], InstanceObj]:
        def decorator(obj: InstanceObj) -> InstanceObj:
            self[key] = obj
            return obj

        return decorator
