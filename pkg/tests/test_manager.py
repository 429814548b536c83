import pytest

from hsipnp.degradation.scenarios import SCENARIOS
from hsipnp.manager import InstanceManager


def test_register_and_lookup():
    registry: InstanceManager[str, int] = InstanceManager(name='number')

    @registry.register('one')
    def one() -> int:
        return 1

    registry['two'] = 2
    assert registry['one'] is one
    assert 'two' in registry
    assert list(registry) == ['one', 'two']


def test_unknown_key_names_the_registry():
    registry: InstanceManager[str, int] = InstanceManager(name='number')
    registry['two'] = 2
    with pytest.raises(KeyError, match="Unknown number 'three'"):
        registry['three']


def test_registries_do_not_share_entries():
    first: InstanceManager[str, int] = InstanceManager()
    second: InstanceManager[str, int] = InstanceManager()
    first['a'] = 1
    assert 'a' not in second


def test_scenarios_are_registered_in_order():
    assert list(SCENARIOS) == ['a', 'b', 'c', 'd', 'e', 'f']
