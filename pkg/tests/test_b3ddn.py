import numpy as np
import pytest
import torch

from hsipnp.core.cube import HsiCube
from hsipnp.denoiser.b3ddn import (
    KERNEL_EXTENT,
    B3ddnDenoiser,
    B3ddnWeights,
    BatchNormLayer,
    ConvLayer,
    b3ddn_denoise,
    b3ddn_forward,
)
from hsipnp.denoiser.train import l1_residual_loss
from hsipnp.exception import WeightsError
from tests.oracles import naive_b3ddn_forward


def _randomised(num_blocks: int, channels: int, seed: int) -> B3ddnWeights:
    """Random convolutions and non-trivial batch-norm statistics."""
    weights = B3ddnWeights.initialize(num_blocks, channels, seed=seed)
    layer_rng = np.random.default_rng(seed)
    layers = []
    for layer in weights.layers:
        if isinstance(layer, ConvLayer):
            layers.append(layer.model_copy(update={'bias': layer_rng.normal(0, 0.1, layer.out_channels)}))
        else:
            layers.append(BatchNormLayer(
                channels=channels,
                scale=layer_rng.uniform(0.5, 1.5, channels),
                shift=layer_rng.normal(0, 0.1, channels),
                running_mean=layer_rng.normal(0, 0.1, channels),
                running_var=layer_rng.uniform(0.5, 2.0, channels),
            ))
    return B3ddnWeights(num_blocks=num_blocks, channels=channels, layers=layers)


def _copy_network() -> B3ddnWeights:
    taps = np.zeros((1, 1, KERNEL_EXTENT, KERNEL_EXTENT, KERNEL_EXTENT))
    taps[0, 0, 1, 1, 1] = 1.0
    head = ConvLayer(in_channels=1, out_channels=1, taps=taps, bias=np.zeros(1))
    tail = ConvLayer(in_channels=1, out_channels=1, taps=taps, bias=np.zeros(1))
    return B3ddnWeights(num_blocks=0, channels=1, layers=[head, tail])


def test_layer_chain_length_and_channels():
    weights = B3ddnWeights.initialize(2, 4)
    assert len(weights.layers) == 6
    assert [type(layer) for layer in weights.layers] == [
        ConvLayer, ConvLayer, BatchNormLayer, ConvLayer, BatchNormLayer, ConvLayer
    ]
    assert weights.parameter_count == (27 * 4 + 4) + 2 * (27 * 16 + 4 + 8) + (27 * 4 + 1)


def test_chain_validation():
    weights = B3ddnWeights.zeros(1, 2)
    with pytest.raises(WeightsError):
        B3ddnWeights(num_blocks=2, channels=2, layers=weights.layers)
    with pytest.raises(WeightsError):
        B3ddnWeights(num_blocks=1, channels=2, layers=[weights.layers[0], weights.layers[2], weights.layers[1],
                                                       weights.layers[3]])
    with pytest.raises(WeightsError):
        B3ddnWeights(num_blocks=1, channels=3, layers=weights.layers)


def test_layer_validation():
    with pytest.raises(WeightsError):
        ConvLayer(in_channels=1, out_channels=2, taps=np.zeros((2, 1, 3, 3)), bias=np.zeros(2))
    with pytest.raises(WeightsError):
        BatchNormLayer(channels=1, scale=[1.0], shift=[0.0], running_mean=[0.0], running_var=[0.0])
    with pytest.raises(WeightsError):
        ConvLayer(in_channels=1, out_channels=1, taps=np.full((1, 1, 3, 3, 3), np.inf), bias=[0.0])


def test_zero_weights_predict_zero_noise(rng):
    z = HsiCube(data=rng.standard_normal((3, 5, 5)))
    weights = B3ddnWeights.zeros(2, 4)
    assert np.array_equal(b3ddn_forward(z, weights).data, np.zeros(z.shape))
    np.testing.assert_array_equal(b3ddn_denoise(z, weights).data, z.data)


def test_delta_network_copies_non_negative_input(rng):
    z = HsiCube(data=rng.uniform(0.0, 1.0, size=(3, 5, 5)))
    np.testing.assert_allclose(b3ddn_forward(z, _copy_network()).data, z.data, atol=1e-12)
    np.testing.assert_allclose(b3ddn_denoise(z, _copy_network()).data, 0.0, atol=1e-12)


def test_forward_matches_naive_evaluation(rng):
    weights = _randomised(1, 2, seed=4)
    z = rng.standard_normal((3, 5, 5))
    np.testing.assert_allclose(
        b3ddn_forward(HsiCube(data=z), weights).data, naive_b3ddn_forward(z, weights), atol=1e-8
    )


@pytest.mark.parametrize('bands', [3, 31, 45])
def test_any_band_count(rng, bands):
    denoiser = B3ddnDenoiser(weights=B3ddnWeights.initialize(1, 2, seed=0))
    z = HsiCube(data=rng.standard_normal((bands, 6, 6)))
    assert denoiser(z).shape == z.shape


def test_module_round_trip_is_exact():
    weights = _randomised(2, 3, seed=8)
    again = B3ddnWeights.from_module(weights.to_module())
    for original, copied in zip(weights.layers, again.layers):
        for name, value in original.model_dump().items():
            np.testing.assert_array_equal(np.asarray(getattr(copied, name)), np.asarray(value))


def test_inference_ignores_batch_composition(rng):
    weights = _randomised(1, 2, seed=3)
    net = weights.to_module().eval()
    a = torch.from_numpy(rng.standard_normal((1, 1, 3, 5, 5)))
    b = torch.from_numpy(rng.standard_normal((1, 1, 3, 5, 5)))
    with torch.no_grad():
        alone = net(a)
        together = net(torch.cat([a, b]))[:1]
    torch.testing.assert_close(alone, together, rtol=0, atol=1e-12)


@pytest.mark.parametrize('training', [False, True], ids=['running-stats', 'batch-stats'])
def test_l1_gradients_match_finite_differences(training):
    weights = _randomised(1, 2, seed=6)
    net = weights.to_module().train(training)
    params = list(net.parameters())
    data_rng = np.random.default_rng(6)
    noisy = torch.from_numpy(data_rng.standard_normal((2, 1, 2, 4, 4)))
    noise = torch.from_numpy(data_rng.standard_normal((2, 1, 2, 4, 4)))

    def loss_value() -> float:
        with torch.no_grad():
            return l1_residual_loss(net(noisy), noise).item()

    net.zero_grad()
    l1_residual_loss(net(noisy), noise).backward()
    analytic = [p.grad.detach().clone() for p in params]

    step = 1e-6
    compared = 0
    for _ in range(2000):
        if compared == 50:
            break
        inx = int(data_rng.integers(len(params)))
        flat = params[inx].data.view(-1)
        pos = int(data_rng.integers(flat.numel()))
        original = flat[pos].item()
        flat[pos] = original + step
        plus = loss_value()
        flat[pos] = original - step
        minus = loss_value()
        flat[pos] = original
        center = loss_value()
        # Skip points where the loss is not smooth within the step, and flat directions.
        if abs((plus - center) - (center - minus)) > 1e-9 * max(1.0, abs(center)):
            continue
        numeric = (plus - minus) / (2 * step)
        exact = analytic[inx].view(-1)[pos].item()
        scale = max(abs(exact), abs(numeric))
        if scale < 1e-4:
            continue
        assert abs(numeric - exact) / scale < 1e-4
        compared += 1
    assert compared == 50
