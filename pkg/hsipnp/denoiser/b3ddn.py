"""Blind 3D denoising network.

conv(1->C) -> ReLU -> B x [conv(C->C) -> BN -> ReLU] -> conv(C->1), all 3x3x3 with
periodic padding. The network predicts the noise, so denoising is z - F(z).
Convolutions span the band axis too, so one set of weights serves any band count.
"""
from __future__ import annotations

from typing import Any

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator
from torch import nn

from hsipnp.core.cube import HsiCube
from hsipnp.denoiser.base import DENOISERS, Denoiser
from hsipnp.exception import WeightsError

KERNEL_EXTENT = 3
BN_EPS = 1e-5
WEIGHTS_VERSION = 1


def _float_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if not np.isfinite(array).all():
        raise WeightsError('Weights contain non-finite values')
    return array


class ConvLayer(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    in_channels: int
    out_channels: int
    taps: np.ndarray
    bias: np.ndarray

    @field_validator('taps', 'bias', mode='before')
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        return _float_array(value)

    def model_post_init(self, context: Any, /) -> None:
        expected = (self.out_channels, self.in_channels, KERNEL_EXTENT, KERNEL_EXTENT, KERNEL_EXTENT)
        if self.taps.shape != expected:
            raise WeightsError(f'Conv taps must have shape {expected}, got {self.taps.shape}')
        if self.bias.shape != (self.out_channels,):
            raise WeightsError(f'Conv bias must have shape ({self.out_channels},), got {self.bias.shape}')


class BatchNormLayer(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    channels: int
    scale: np.ndarray
    shift: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    eps: float = BN_EPS

    @field_validator('scale', 'shift', 'running_mean', 'running_var', mode='before')
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        return _float_array(value)

    def model_post_init(self, context: Any, /) -> None:
        for name in ('scale', 'shift', 'running_mean', 'running_var'):
            if getattr(self, name).shape != (self.channels,):
                raise WeightsError(f'Batch-norm {name} must have shape ({self.channels},)')
        if np.any(self.running_var <= 0):
            raise WeightsError('Batch-norm running variances must be strictly positive')
        if self.eps <= 0:
            raise WeightsError(f'Batch-norm epsilon must be positive, got {self.eps}')


class B3ddnNet(nn.Module):
    def __init__(self, num_blocks: int, channels: int):
        super().__init__()
        self.head = self._conv(1, channels)
        self.blocks = nn.ModuleList(
            nn.Sequential(self._conv(channels, channels), nn.BatchNorm3d(channels, eps=BN_EPS, dtype=torch.float64))
            for _ in range(num_blocks)
        )
        self.tail = self._conv(channels, 1)

    @staticmethod
    def _conv(in_channels: int, out_channels: int) -> nn.Conv3d:
        return nn.Conv3d(
            in_channels,
            out_channels,
            kernel_size=KERNEL_EXTENT,
            padding=KERNEL_EXTENT // 2,
            padding_mode='circular',
            dtype=torch.float64,
        )

    def reset_parameters(self) -> None:
        for module in self.modules():
            if isinstance(module, nn.Conv3d):
                nn.init.kaiming_normal_(module.weight, nonlinearity='relu')
                nn.init.zeros_(module.bias)
            elif isinstance(module, nn.BatchNorm3d):
                module.reset_parameters()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = torch.relu(self.head(x))
        for block in self.blocks:
            x = torch.relu(block(x))
        return self.tail(x)


class B3ddnWeights(BaseModel):
    num_blocks: int
    channels: int
    layers: list[ConvLayer | BatchNormLayer]

    def model_post_init(self, context: Any, /) -> None:
        self.validate_chain()

    def validate_chain(self) -> None:
        if self.num_blocks < 0 or self.channels < 1:
            raise WeightsError(f'Invalid architecture B={self.num_blocks}, C={self.channels}')
        expected = 2 * self.num_blocks + 2
        if len(self.layers) != expected:
            raise WeightsError(f'Expected {expected} layers for B={self.num_blocks}, got {len(self.layers)}')

        c = self.channels
        chain: list[tuple[type, int, int]] = [(ConvLayer, 1, c)]
        for _ in range(self.num_blocks):
            chain += [(ConvLayer, c, c), (BatchNormLayer, c, c)]
        chain.append((ConvLayer, c, 1))

        for inx, (layer, (kind, c_in, c_out)) in enumerate(zip(self.layers, chain)):
            if not isinstance(layer, kind):
                raise WeightsError(f'Layer {inx} must be {kind.__name__}, got {type(layer).__name__}')
            if isinstance(layer, ConvLayer) and (layer.in_channels, layer.out_channels) != (c_in, c_out):
                raise WeightsError(
                    f'Layer {inx} maps {layer.in_channels}->{layer.out_channels} channels, expected {c_in}->{c_out}'
                )
            if isinstance(layer, BatchNormLayer) and layer.channels != c:
                raise WeightsError(f'Layer {inx} normalises {layer.channels} channels, expected {c}')

    @property
    def parameter_count(self) -> int:
        count = 0
        for layer in self.layers:
            if isinstance(layer, ConvLayer):
                count += layer.taps.size + layer.bias.size
            else:
                count += layer.scale.size + layer.shift.size
        return count

    @classmethod
    def initialize(cls, num_blocks: int, channels: int, seed: int = 0) -> B3ddnWeights:
        """Kaiming-normal convolutions, zero biases, identity batch norms."""
        torch.manual_seed(seed)
        net = B3ddnNet(num_blocks, channels)
        net.reset_parameters()
        return cls.from_module(net)

    @classmethod
    def zeros(cls, num_blocks: int, channels: int) -> B3ddnWeights:
        def conv(c_in: int, c_out: int) -> ConvLayer:
            return ConvLayer(
                in_channels=c_in,
                out_channels=c_out,
                taps=np.zeros((c_out, c_in, KERNEL_EXTENT, KERNEL_EXTENT, KERNEL_EXTENT)),
                bias=np.zeros(c_out),
            )

        layers: list[ConvLayer | BatchNormLayer] = [conv(1, channels)]
        for _ in range(num_blocks):
            layers.append(conv(channels, channels))
            layers.append(BatchNormLayer(
                channels=channels,
                scale=np.zeros(channels),
                shift=np.zeros(channels),
                running_mean=np.zeros(channels),
                running_var=np.ones(channels),
            ))
        layers.append(conv(channels, 1))
        return cls(num_blocks=num_blocks, channels=channels, layers=layers)

    @classmethod
    def from_module(cls, net: B3ddnNet) -> B3ddnWeights:
        def numpy(tensor: torch.Tensor) -> np.ndarray:
            return tensor.detach().cpu().numpy().astype(np.float64, copy=True)

        def conv(module: nn.Conv3d) -> ConvLayer:
            return ConvLayer(
                in_channels=module.in_channels,
                out_channels=module.out_channels,
                taps=numpy(module.weight),
                bias=numpy(module.bias),
            )

        layers: list[ConvLayer | BatchNormLayer] = [conv(net.head)]
        for block in net.blocks:
            block_conv, norm = block
            layers.append(conv(block_conv))
            layers.append(BatchNormLayer(
                channels=norm.num_features,
                scale=numpy(norm.weight),
                shift=numpy(norm.bias),
                running_mean=numpy(norm.running_mean),
                running_var=numpy(norm.running_var),
                eps=norm.eps,
            ))
        layers.append(conv(net.tail))
        return cls(num_blocks=len(net.blocks), channels=net.head.out_channels, layers=layers)

    def to_module(self) -> B3ddnNet:
        net = B3ddnNet(self.num_blocks, self.channels)
        convs = [net.head, *(block[0] for block in net.blocks), net.tail]
        norms = [block[1] for block in net.blocks]
        conv_layers = [layer for layer in self.layers if isinstance(layer, ConvLayer)]
        norm_layers = [layer for layer in self.layers if isinstance(layer, BatchNormLayer)]

        with torch.no_grad():
            for module, layer in zip(convs, conv_layers):
                module.weight.copy_(torch.from_numpy(layer.taps))
                module.bias.copy_(torch.from_numpy(layer.bias))
            for module, layer in zip(norms, norm_layers):
                module.weight.copy_(torch.from_numpy(layer.scale))
                module.bias.copy_(torch.from_numpy(layer.shift))
                module.running_mean.copy_(torch.from_numpy(layer.running_mean))
                module.running_var.copy_(torch.from_numpy(layer.running_var))
                module.eps = layer.eps
        return net


def _run(net: B3ddnNet, z: HsiCube) -> np.ndarray:
    with torch.no_grad():
        output = net(torch.from_numpy(z.data.copy())[None, None])
    return output[0, 0].numpy()


def b3ddn_forward(z: HsiCube, weights: B3ddnWeights) -> HsiCube:
    """Predicted noise F(z); batch norms use their running statistics."""
    return HsiCube(data=_run(weights.to_module().eval(), z))


def b3ddn_denoise(z: HsiCube, weights: B3ddnWeights) -> HsiCube:
    return HsiCube(data=z.data - b3ddn_forward(z, weights).data)


@DENOISERS.register('b3ddn')
class B3ddnDenoiser(Denoiser):
    name: str = 'b3ddn'
    weights: B3ddnWeights

    _net: B3ddnNet | None = PrivateAttr(default=None)

    @property
    def net(self) -> B3ddnNet:
        if self._net is None:
            self._net = self.weights.to_module().eval()
        return self._net

    def denoise(self, cube: HsiCube) -> HsiCube:
        return HsiCube(data=cube.data - _run(self.net, cube))
