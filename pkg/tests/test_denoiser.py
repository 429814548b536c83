import numpy as np
import pytest

from hsipnp.core.cube import HsiCube
from hsipnp.degradation.synthetic import synthesize_smooth_cube
from hsipnp.denoiser.base import DENOISERS, Denoiser, IdentityDenoiser, RidgeDenoiser
from hsipnp.denoiser.spectral import SpectralShrinkageDenoiser, baseline_denoise
from hsipnp.exception import DimensionError, SpecError
from hsipnp.metrics import rmse


def test_registry_holds_every_denoiser():
    assert {'identity', 'ridge', 'baseline', 'b3ddn'} <= set(DENOISERS)
    assert DENOISERS['baseline'] is SpectralShrinkageDenoiser


def test_identity_and_ridge(smooth_cube):
    assert np.array_equal(IdentityDenoiser()(smooth_cube).data, smooth_cube.data)
    np.testing.assert_allclose(RidgeDenoiser(alpha=1.0)(smooth_cube).data, smooth_cube.data / 2)
    with pytest.raises(SpecError):
        RidgeDenoiser(alpha=-1.0)


def test_denoiser_must_keep_shape(smooth_cube):
    class Cropping(Denoiser):
        name: str = 'cropping'

        def denoise(self, cube: HsiCube) -> HsiCube:
            return HsiCube(data=cube.data[:1])

    with pytest.raises(DimensionError):
        Cropping()(smooth_cube)


def test_zero_strength_is_identity(smooth_cube):
    np.testing.assert_allclose(baseline_denoise(smooth_cube, 0.0).data, smooth_cube.data, atol=1e-12)


def test_shrinkage_is_non_expansive(rng):
    noise = HsiCube(data=rng.standard_normal((4, 16, 16)))
    out = baseline_denoise(noise, 3.0)
    assert np.sum(out.data ** 2) < np.sum(noise.data ** 2)


def test_negative_strength_is_rejected(smooth_cube):
    with pytest.raises(SpecError):
        baseline_denoise(smooth_cube, -1.0)
    with pytest.raises(SpecError):
        SpectralShrinkageDenoiser(strength=-0.5)


def test_shrinkage_removes_noise_from_smooth_cube(rng):
    clean = synthesize_smooth_cube(8, 32, 32, seed=2)
    noisy = HsiCube(data=clean.data + 0.05 * rng.standard_normal(clean.shape))
    best = min(rmse(baseline_denoise(noisy, strength), clean) for strength in (0.5, 1.0, 2.0, 3.0))
    assert best < rmse(noisy, clean)
    assert rmse(SpectralShrinkageDenoiser()(noisy), clean) < rmse(noisy, clean)
