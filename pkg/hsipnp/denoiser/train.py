from __future__ import annotations

from collections.abc import Iterator, Sequence
from contextlib import contextmanager

import numpy as np
import torch
from pydantic import BaseModel, Field

from hsipnp.core.constants import INTENSITY_SCALE
from hsipnp.core.cube import HsiCube
from hsipnp.degradation.noise import make_generator
from hsipnp.degradation.synthetic import synthesize_smooth_cube
from hsipnp.denoiser.b3ddn import B3ddnWeights
from hsipnp.exception import DataError, SpecError
from hsipnp.logger import logger


class TrainOptions(BaseModel):
    learning_rate: float = 0.0002
    batch_size: int = 4
    epochs: int = 1
    steps_per_epoch: int = 200
    patch_size: int = 16
    # None trains on the full band depth of the shallowest cube.
    patch_bands: int | None = 16
    # Augmentation noise std on the [0, 1] scale; the default is [0.2, 10] on the 0-255 scale.
    noise_range: tuple[float, float] = (0.2 / INTENSITY_SCALE, 10.0 / INTENSITY_SCALE)
    seed: int = 0
    channels: int = 8
    num_blocks: int = 2
    deterministic: bool = True
    log_every: int = 20

    def check(self) -> TrainOptions:
        if self.learning_rate < 0:
            raise SpecError(f'learning_rate must be non-negative, got {self.learning_rate}')
        for name in ('batch_size', 'epochs', 'steps_per_epoch', 'patch_size', 'channels', 'log_every'):
            if getattr(self, name) < 1:
                raise SpecError(f'{name} must be at least 1, got {getattr(self, name)}')
        if self.patch_bands is not None and self.patch_bands < 1:
            raise SpecError(f'patch_bands must be at least 1, got {self.patch_bands}')
        if self.num_blocks < 0:
            raise SpecError(f'num_blocks must be non-negative, got {self.num_blocks}')
        low, high = self.noise_range
        if not 0 < low <= high < 1:
            raise SpecError(f'noise_range must satisfy 0 < low <= high < 1, got {self.noise_range}')
        return self

    @property
    def total_steps(self) -> int:
        return self.epochs * self.steps_per_epoch


class TrainResult(BaseModel):
    weights: B3ddnWeights
    losses: list[float] = Field(default_factory=list)

    def smoothed(self, window: int = 20) -> list[float]:
        losses = np.asarray(self.losses)
        window = max(1, min(window, losses.size))
        return np.convolve(losses, np.ones(window) / window, mode='valid').tolist()


def synthetic_training_set(count: int, bands: int, rows: int, cols: int, seed: int = 0) -> list[HsiCube]:
    return [synthesize_smooth_cube(bands, rows, cols, seed=seed + inx) for inx in range(count)]


@contextmanager
def _torch_determinism(enabled: bool) -> Iterator[None]:
    if not enabled:
        yield
        return
    threads = torch.get_num_threads()
    previous = torch.are_deterministic_algorithms_enabled()
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)
    try:
        yield
    finally:
        torch.use_deterministic_algorithms(previous)
        torch.set_num_threads(threads)


class PatchSampler:
    """Random crops, spatial rotations/flips and blind noise levels from a fixed set of clean cubes."""

    def __init__(self, dataset: Sequence[HsiCube], opts: TrainOptions):
        eligible = [cube for cube in dataset if cube.rows >= opts.patch_size and cube.cols >= opts.patch_size]
        depth = opts.patch_bands or (min(cube.bands for cube in eligible) if eligible else 0)
        self.cubes = [cube for cube in eligible if cube.bands >= depth]
        if not self.cubes or depth < 1:
            raise DataError(
                f'No training cube holds a {depth}x{opts.patch_size}x{opts.patch_size} patch'
            )
        self.depth = depth
        self.opts = opts
        self.rng = make_generator(opts.seed)

    def _patch(self) -> np.ndarray:
        cube = self.cubes[self.rng.integers(len(self.cubes))].data
        size = self.opts.patch_size
        n0 = self.rng.integers(cube.shape[0] - self.depth + 1)
        p0 = self.rng.integers(cube.shape[1] - size + 1)
        q0 = self.rng.integers(cube.shape[2] - size + 1)
        patch = cube[n0:n0 + self.depth, p0:p0 + size, q0:q0 + size]
        patch = np.rot90(patch, k=int(self.rng.integers(4)), axes=(1, 2))
        if self.rng.integers(2):
            patch = patch[:, :, ::-1]
        return np.ascontiguousarray(patch)

    def batch(self) -> tuple[torch.Tensor, torch.Tensor]:
        """(noisy, noise) tensors shaped (batch, 1, bands, size, size)."""
        clean = np.stack([self._patch() for _ in range(self.opts.batch_size)])
        sigmas = self.rng.uniform(*self.opts.noise_range, size=self.opts.batch_size)
        noise = sigmas[:, None, None, None] * self.rng.standard_normal(clean.shape)
        noisy = clean + noise
        return torch.from_numpy(noisy[:, None]), torch.from_numpy(noise[:, None])


def l1_residual_loss(predicted: torch.Tensor, noise: torch.Tensor) -> torch.Tensor:
    return (predicted - noise).abs().mean()


def train_b3ddn(
    dataset: Sequence[HsiCube],
    opts: TrainOptions | None = None,
    initial: B3ddnWeights | None = None,
) -> TrainResult:
    """Fit the residual (noise-predicting) network with Adam on the mean absolute error."""
    opts = (opts or TrainOptions()).check()
    sampler = PatchSampler(dataset, opts)

    with _torch_determinism(opts.deterministic):
        if initial is None:
            initial = B3ddnWeights.initialize(opts.num_blocks, opts.channels, seed=opts.seed)
        net = initial.to_module().train()
        optimizer = torch.optim.Adam(net.parameters(), lr=opts.learning_rate)

        losses: list[float] = []
        for epoch in range(opts.epochs):
            for _ in range(opts.steps_per_epoch):
                noisy, noise = sampler.batch()
                optimizer.zero_grad()
                loss = l1_residual_loss(net(noisy), noise)
                loss.backward()
                optimizer.step()
                losses.append(loss.item())
                if len(losses) % opts.log_every == 0:
                    logger.info(f'epoch {epoch + 1} step {len(losses)}/{opts.total_steps}: loss={losses[-1]:.6g}')

    return TrainResult(weights=B3ddnWeights.from_module(net), losses=losses)
