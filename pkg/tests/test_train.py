import numpy as np
import pytest

from hsipnp.core.cube import HsiCube
from hsipnp.degradation.kernels import KernelSpec, make_kernel
from hsipnp.degradation.noise import NoiseSpec, degrade
from hsipnp.degradation.synthetic import synthesize_smooth_cube
from hsipnp.denoiser.b3ddn import B3ddnDenoiser, B3ddnWeights
from hsipnp.denoiser.base import IdentityDenoiser
from hsipnp.denoiser.train import PatchSampler, TrainOptions, TrainResult, synthetic_training_set, train_b3ddn
from hsipnp.exception import DataError, SpecError
from hsipnp.metrics import rmse
from hsipnp.solver.admm import deconvolve
from hsipnp.solver.options import SolverOptions

QUICK = TrainOptions(steps_per_epoch=5, batch_size=2, patch_size=8, patch_bands=4, channels=2, num_blocks=1)


@pytest.fixture
def small_set() -> list[HsiCube]:
    return synthetic_training_set(3, 6, 12, 12, seed=0)


def test_options_are_checked():
    with pytest.raises(SpecError):
        TrainOptions(learning_rate=-1.0).check()
    with pytest.raises(SpecError):
        TrainOptions(noise_range=(0.1, 0.05)).check()
    with pytest.raises(SpecError):
        TrainOptions(batch_size=0).check()
    assert TrainOptions().noise_range == pytest.approx((0.2 / 255, 10 / 255))


def test_sampler_needs_large_enough_cubes():
    with pytest.raises(DataError):
        PatchSampler([HsiCube.zeros(2, 4, 4)], QUICK)


def test_sampler_batches(small_set):
    noisy, noise = PatchSampler(small_set, QUICK).batch()
    assert tuple(noisy.shape) == (2, 1, 4, 8, 8)
    assert tuple(noise.shape) == tuple(noisy.shape)
    per_patch_std = noise.numpy().reshape(2, -1).std(axis=1)
    assert np.all(per_patch_std < 3 * QUICK.noise_range[1])


def test_zero_learning_rate_keeps_parameters(small_set):
    initial = B3ddnWeights.initialize(1, 2, seed=1)
    result = train_b3ddn(small_set, QUICK.model_copy(update={'learning_rate': 0.0}), initial=initial)
    assert len(result.losses) == QUICK.total_steps
    for before, after in zip(initial.layers, result.weights.layers):
        if hasattr(before, 'taps'):
            assert np.array_equal(before.taps, after.taps)
            assert np.array_equal(before.bias, after.bias)
        else:
            assert np.array_equal(before.scale, after.scale)
            assert np.array_equal(before.shift, after.shift)


def test_training_is_reproducible(small_set):
    first = train_b3ddn(small_set, QUICK)
    second = train_b3ddn(small_set, QUICK)
    assert first.losses == second.losses
    for a, b in zip(first.weights.layers, second.weights.layers):
        for name, value in a.model_dump().items():
            assert np.array_equal(np.asarray(value), np.asarray(getattr(b, name)))


def test_smoothed_loss_curve():
    result = TrainResult(weights=B3ddnWeights.zeros(0, 1), losses=[4.0, 2.0, 0.0, 2.0])
    assert result.smoothed(window=2) == [3.0, 1.0, 1.0]
    assert result.smoothed(window=50) == [2.0]


@pytest.mark.slow
def test_training_halves_the_loss_and_helps_deconvolution():
    opts = TrainOptions(steps_per_epoch=200, learning_rate=0.0002, channels=8, num_blocks=2)
    dataset = synthetic_training_set(8, 16, 32, 32, seed=0)
    result = train_b3ddn(dataset, opts)
    smoothed = result.smoothed(window=20)
    assert smoothed[-1] < 0.5 * smoothed[0]

    truth = synthesize_smooth_cube(8, 32, 32, seed=0)
    kernels = make_kernel(KernelSpec.parse('gaussian:9:2'))
    y = degrade(truth, kernels, NoiseSpec(sigma=0.01, seed=1))
    trained, _ = deconvolve(y, kernels, B3ddnDenoiser(weights=result.weights), SolverOptions())
    plain, _ = deconvolve(y, kernels, IdentityDenoiser(), SolverOptions())
    assert rmse(trained, truth) < rmse(plain, truth)
