import asyncio

import pytest

from hsipnp.core.constants import KernelKind
from hsipnp.exception import ConfigError
from hsipnp.io.config import RunConfig
from hsipnp.solver.constants import SearchRule

SAMPLE = """
# scenario (a) sweep
kernel = gaussian:9:2
sigma = 0.01
seed = 7
max_iters = 30
zeta = 0.0002
search_rule = legacy
fixed_rho = none
scenarios = a, c
seeds = 0, 1
bench_sigmas = 0.01, 0.02, 0.03
shape = 4, 16, 16
methods = observation, baseline
use_stopping_rule = false
"""


def test_parse_values():
    config = RunConfig.parse(SAMPLE)
    assert config.kernel.kind is KernelKind.GAUSSIAN
    assert config.kernel.bandwidth == 2.0
    assert config.seed == 7
    assert config.max_iters == 30
    assert config.search_rule is SearchRule.LEGACY
    assert config.fixed_rho is None
    assert config.scenarios == ['a', 'c']
    assert config.bench_sigmas == [0.01, 0.02, 0.03]
    assert config.shape == (4, 16, 16)
    assert config.use_stopping_rule is False


def test_defaults_match_option_models():
    config = RunConfig()
    assert config.solver_options().bracket_b == 10.0
    assert config.solver_options().epsilon == 0.001
    assert config.train_options().learning_rate == 0.0002
    assert config.noise_spec().sigma == 0.0


def test_print_parse_round_trip_is_idempotent():
    printed = RunConfig.parse(SAMPLE).to_text()
    assert RunConfig.parse(printed).to_text() == printed
    assert RunConfig.parse(RunConfig().to_text()) == RunConfig()


def test_fractional_kernel_parameters_survive_save_and_load(tmp_path):
    config = RunConfig.parse('kernel = gaussian:9:1.23456789')
    path = tmp_path / 'run.conf'
    asyncio.run(config.save(path))
    loaded = asyncio.run(RunConfig.load(path))
    assert loaded.kernel.bandwidth == 1.23456789
    assert loaded == config


def test_every_field_is_printed():
    lines = RunConfig().to_text().splitlines()
    assert [line.split(' = ')[0] for line in lines] == list(RunConfig.model_fields)
    assert 'bench_sigmas = ' in lines


@pytest.mark.parametrize(
    'text, message',
    [
        ('colour = blue', 'unknown key'),
        ('sigma = 0.1\nsigma = 0.2', 'duplicate key'),
        ('just words', 'expected "key = value"'),
        ('max_iters = many', 'max_iters'),
        ('kernel = gaussian:8:2', 'kernel'),
        ('scenarios = a, q', 'Unknown scenarios'),
        ('methods = magic', 'Unknown methods'),
        ('zeta = -1', 'zeta'),
        ('workers = 0', 'workers'),
    ],
)
def test_invalid_documents(text, message):
    with pytest.raises(ConfigError, match=message):
        RunConfig.parse(text)


def test_override_ignores_none():
    config = RunConfig().override(max_iters=5, zeta=None)
    assert config.max_iters == 5
    assert config.zeta == RunConfig().zeta
    with pytest.raises(ConfigError):
        RunConfig().override(epsilon=-1.0)


def test_save_and_load(tmp_path):
    path = tmp_path / 'run.cfg'
    config = RunConfig.parse(SAMPLE)
    asyncio.run(config.save(path))
    assert asyncio.run(RunConfig.load(path)) == config
