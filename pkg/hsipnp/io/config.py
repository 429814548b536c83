"""Flat ``key = value`` run configuration.

Lines starting with ``#`` are comments, list values are comma separated, ``none``
clears an optional value and the kernel uses the compact ``kind:size:params`` form.
"""
from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from hsipnp.core.constants import INTENSITY_SCALE
from hsipnp.degradation.kernels import KernelSpec
from hsipnp.degradation.noise import NoiseSpec
from hsipnp.degradation.scenarios import SCENARIOS
from hsipnp.denoiser.base import DENOISERS
from hsipnp.denoiser.train import TrainOptions
from hsipnp.exception import ConfigError, SpecError
from hsipnp.io.formats import read_text, write_text
from hsipnp.metrics import MeanOf
from hsipnp.solver.constants import GOLDEN_DELTA, InitMode, SearchRule
from hsipnp.solver.options import SolverOptions
from hsipnp.solver.state import format_number

# Benchmark method that scores the degraded observation itself.
OBSERVATION_METHOD = 'observation'

_SOLVER_KEYS = tuple(SolverOptions.model_fields)
_NOISE_KEYS = ('sigma', 'seed', 'snr_db')
_TRAIN_KEYS = tuple(key for key in TrainOptions.model_fields if key != 'seed')
_LIST_KEYS = ('scenarios', 'seeds', 'shape', 'methods', 'bench_sigmas', 'noise_range')


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    # solver
    bracket_a: float = 0.0
    bracket_b: float = 10.0
    epsilon: float = 0.001
    zeta: float = 0.0002
    max_iters: int = 50
    init: InitMode = InitMode.OBSERVATION
    delta: float = GOLDEN_DELTA
    search_rule: SearchRule = SearchRule.MINIMIZE
    fixed_rho: float | None = None
    use_stopping_rule: bool = True
    fft_workers: int | None = None

    # degradation
    kernel: KernelSpec = KernelSpec.parse('gaussian:9:2')
    sigma: float = 0.0
    seed: int = 0
    snr_db: float | None = None

    # training
    learning_rate: float = 0.0002
    batch_size: int = 4
    epochs: int = 1
    steps_per_epoch: int = 200
    patch_size: int = 16
    patch_bands: int | None = 16
    noise_range: tuple[float, float] = (0.2 / INTENSITY_SCALE, 10.0 / INTENSITY_SCALE)
    channels: int = 8
    num_blocks: int = 2
    deterministic: bool = True
    log_every: int = 20

    # benchmark
    scenarios: list[str] = ['a', 'b', 'c', 'd', 'e', 'f']
    seeds: list[int] = [0, 1, 2]
    shape: tuple[int, int, int] = (8, 32, 32)
    methods: list[str] = [OBSERVATION_METHOD, 'baseline']
    bench_sigmas: list[float] = []
    workers: int = 1
    strength: float = 2.0
    weights: str | None = None
    mean_of: MeanOf = MeanOf.REFERENCE

    @field_validator(*_LIST_KEYS, mode='before')
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(',') if item.strip()]
        return value

    @field_validator('kernel', mode='before')
    @classmethod
    def _parse_kernel(cls, value: Any) -> Any:
        if isinstance(value, str):
            try:
                return KernelSpec.parse(value)
            except SpecError as exc:
                raise ValueError(str(exc)) from None
        return value

    def solver_options(self) -> SolverOptions:
        return SolverOptions(**{key: getattr(self, key) for key in _SOLVER_KEYS})

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(**{key: getattr(self, key) for key in _NOISE_KEYS})

    def train_options(self) -> TrainOptions:
        return TrainOptions(seed=self.seed, **{key: getattr(self, key) for key in _TRAIN_KEYS})

    def check(self) -> RunConfig:
        try:
            self.solver_options().check()
            self.noise_spec().check()
            self.train_options().check()
            self.kernel.check()
        except SpecError as exc:
            raise ConfigError(str(exc)) from None

        if unknown := [name for name in self.scenarios if name not in SCENARIOS]:
            raise ConfigError(f'Unknown scenarios {unknown}, expected some of {list(SCENARIOS)}')
        known_methods = [OBSERVATION_METHOD, *DENOISERS]
        if unknown := [name for name in self.methods if name not in known_methods]:
            raise ConfigError(f'Unknown methods {unknown}, expected some of {known_methods}')
        if not self.seeds:
            raise ConfigError('At least one benchmark seed is required')
        if min(self.shape) < 1:
            raise ConfigError(f'Benchmark shape must be positive, got {self.shape}')
        if self.workers < 1:
            raise ConfigError(f'workers must be at least 1, got {self.workers}')
        if any(sigma < 0 for sigma in self.bench_sigmas):
            raise ConfigError(f'bench_sigmas must be non-negative, got {self.bench_sigmas}')
        return self

    def override(self, **values: Any) -> RunConfig:
        """Copy with the non-None ``values`` replaced, validated like parsed text."""
        updates = {key: value for key, value in values.items() if value is not None}
        try:
            return RunConfig.model_validate(self.model_dump() | updates).check()
        except ValidationError as exc:
            raise ConfigError(_describe(exc)) from None

    @classmethod
    def parse(cls, text: str) -> RunConfig:
        values: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ConfigError(f'line {lineno}: expected "key = value", got {raw.strip()!r}')
            if key in values:
                raise ConfigError(f'line {lineno}: duplicate key {key!r}')
            values[key] = None if value.lower() == 'none' else value

        try:
            return cls.model_validate(values).check()
        except ValidationError as exc:
            raise ConfigError(_describe(exc)) from None

    def to_text(self) -> str:
        return ''.join(f'{key} = {_format_value(getattr(self, key))}\n' for key in type(self).model_fields)

    @classmethod
    async def load(cls, path: Path | str) -> RunConfig:
        return cls.parse(await read_text(path))

    async def save(self, path: Path | str) -> None:
        await write_text(path, self.to_text())


def _format_value(value: Any) -> str:
    match value:
        case None:
            return 'none'
        case bool():
            return 'true' if value else 'false'
        case Enum():
            return str(value.value)
        case float():
            return format_number(value)
        case list() | tuple():
            return ', '.join(_format_value(item) for item in value)
        case _:
            return str(value)


def _describe(exc: ValidationError) -> str:
    problems = []
    for error in exc.errors():
        key = '.'.join(str(part) for part in error['loc'])
        if error['type'] == 'extra_forbidden':
            problems.append(f'unknown key {key!r}')
        else:
            problems.append(f'{key}: {error["msg"]}')
    return '; '.join(problems)
