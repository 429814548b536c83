"""Little-endian binary containers for cubes (HSC1), kernels (PSF1) and network weights (B3W1).

HSC1   magic, u32 N, u32 P, u32 Q, u32 dtype (0 = f32, 1 = f64), samples band-major then row-major
PSF1   magic, u32 count, u32 kh, u32 kw, f64 taps row-major, kernels in band order
B3W1   magic, u32 version, u32 B, u32 C, then per layer u32 type (0 conv, 1 batch norm), u32 in, u32 out
       conv: f64 taps (out, in, 3, 3, 3) then f64 biases (out)
       bn:   f64 scale, shift, running mean, running variance (C each) then one f64 epsilon
"""
from __future__ import annotations

import struct
from pathlib import Path

import aiofiles
import numpy as np

from hsipnp.core.constants import FileMagic, LayerType, SampleDType
from hsipnp.core.cube import HsiCube, KernelStack
from hsipnp.denoiser.b3ddn import KERNEL_EXTENT, WEIGHTS_VERSION, B3ddnWeights, BatchNormLayer, ConvLayer
from hsipnp.exception import FormatError

CUBE_HEADER = struct.Struct('<4sIIII')
KERNEL_HEADER = struct.Struct('<4sIII')
WEIGHTS_HEADER = struct.Struct('<4sIII')
LAYER_HEADER = struct.Struct('<III')
EPS_FIELD = struct.Struct('<d')


class _Reader:
    def __init__(self, buffer: bytes):
        self.buffer = buffer
        self.offset = 0

    def magic(self, expected: FileMagic) -> None:
        if self.buffer[:4] != expected.value.encode('ascii'):
            raise FormatError('bad magic', 0)

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.buffer):
            raise FormatError(f'truncated {what}', len(self.buffer))
        chunk = self.buffer[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, layout: struct.Struct, what: str) -> tuple:
        return layout.unpack(self.take(layout.size, what))

    def floats(self, count: int, what: str, dtype: str = '<f8') -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        start = self.offset
        values = np.frombuffer(self.take(count * itemsize, what), dtype=dtype).astype(np.float64)
        if not np.isfinite(values).all():
            raise FormatError(f'non-finite {what}', start)
        return values

    def finish(self) -> None:
        if self.offset != len(self.buffer):
            raise FormatError('trailing bytes', self.offset)


def encode_cube(cube: HsiCube, dtype: SampleDType = SampleDType.FLOAT64) -> bytes:
    header = CUBE_HEADER.pack(FileMagic.CUBE.value.encode('ascii'), *cube.shape, dtype.value)
    return header + cube.data.astype(dtype.numpy_dtype).tobytes()


def decode_cube(buffer: bytes) -> HsiCube:
    reader = _Reader(buffer)
    reader.magic(FileMagic.CUBE)
    _, bands, rows, cols, dtype_code = reader.unpack(CUBE_HEADER, 'header')
    if dtype_code not in SampleDType.__members__.values():
        raise FormatError(f'unknown dtype {dtype_code}', CUBE_HEADER.size - 4)
    if min(bands, rows, cols) == 0:
        raise FormatError('zero dimension', 4)

    dtype = SampleDType(dtype_code)
    payload = bands * rows * cols * dtype.itemsize
    if payload > len(buffer):
        raise FormatError('truncated payload', len(buffer))
    data = reader.floats(bands * rows * cols, 'payload', dtype.numpy_dtype)
    reader.finish()
    return HsiCube(data=data.reshape(bands, rows, cols))


def encode_kernel(kernels: KernelStack) -> bytes:
    header = KERNEL_HEADER.pack(FileMagic.KERNEL.value.encode('ascii'), kernels.bands, kernels.kh, kernels.kw)
    return header + kernels.taps.astype('<f8').tobytes()


def decode_kernel(buffer: bytes) -> KernelStack:
    reader = _Reader(buffer)
    reader.magic(FileMagic.KERNEL)
    _, count, kh, kw = reader.unpack(KERNEL_HEADER, 'header')
    if min(count, kh, kw) == 0:
        raise FormatError('zero dimension', 4)
    if kh % 2 == 0 or kw % 2 == 0:
        raise FormatError(f'even kernel extent {kh}x{kw}', 8)
    taps = reader.floats(count * kh * kw, 'taps')
    reader.finish()
    return KernelStack(taps=taps.reshape(count, kh, kw))


def encode_weights(weights: B3ddnWeights) -> bytes:
    chunks = [WEIGHTS_HEADER.pack(
        FileMagic.WEIGHTS.value.encode('ascii'), WEIGHTS_VERSION, weights.num_blocks, weights.channels
    )]
    for layer in weights.layers:
        if isinstance(layer, ConvLayer):
            chunks.append(LAYER_HEADER.pack(LayerType.CONV, layer.in_channels, layer.out_channels))
            chunks.append(layer.taps.astype('<f8').tobytes())
            chunks.append(layer.bias.astype('<f8').tobytes())
        else:
            chunks.append(LAYER_HEADER.pack(LayerType.BATCHNORM, layer.channels, layer.channels))
            for values in (layer.scale, layer.shift, layer.running_mean, layer.running_var):
                chunks.append(values.astype('<f8').tobytes())
            chunks.append(EPS_FIELD.pack(layer.eps))
    return b''.join(chunks)


def decode_weights(buffer: bytes) -> B3ddnWeights:
    reader = _Reader(buffer)
    reader.magic(FileMagic.WEIGHTS)
    _, version, num_blocks, channels = reader.unpack(WEIGHTS_HEADER, 'header')
    if version != WEIGHTS_VERSION:
        raise FormatError(f'unsupported weights version {version}', 4)

    layers: list[ConvLayer | BatchNormLayer] = []
    for _ in range(2 * num_blocks + 2):
        layer_offset = reader.offset
        layer_type, c_in, c_out = reader.unpack(LAYER_HEADER, 'layer header')
        match layer_type:
            case LayerType.CONV:
                taps = reader.floats(c_out * c_in * KERNEL_EXTENT ** 3, 'conv taps')
                bias = reader.floats(c_out, 'conv bias')
                layers.append(ConvLayer(
                    in_channels=c_in,
                    out_channels=c_out,
                    taps=taps.reshape(c_out, c_in, KERNEL_EXTENT, KERNEL_EXTENT, KERNEL_EXTENT),
                    bias=bias,
                ))
            case LayerType.BATCHNORM:
                if c_in != c_out:
                    raise FormatError(f'batch norm maps {c_in}->{c_out} channels', layer_offset)
                scale, shift, mean, var = (reader.floats(c_in, 'batch norm') for _ in range(4))
                (eps,) = reader.unpack(EPS_FIELD, 'batch norm epsilon')
                layers.append(BatchNormLayer(
                    channels=c_in, scale=scale, shift=shift, running_mean=mean, running_var=var, eps=eps
                ))
            case _:
                raise FormatError(f'unknown layer type {layer_type}', layer_offset)
    reader.finish()
    return B3ddnWeights(num_blocks=num_blocks, channels=channels, layers=layers)


async def read_bytes(path: Path | str) -> bytes:
    async with aiofiles.open(path, 'rb') as f:
        return await f.read()


async def write_bytes(path: Path | str, payload: bytes) -> None:
    async with aiofiles.open(path, 'wb') as f:
        await f.write(payload)


async def read_text(path: Path | str) -> str:
    async with aiofiles.open(path, 'r', encoding='utf-8') as f:
        return await f.read()


async def write_text(path: Path | str, text: str) -> None:
    async with aiofiles.open(path, 'w', encoding='utf-8', newline='\n') as f:
        await f.write(text)


async def read_cube(path: Path | str) -> HsiCube:
    return decode_cube(await read_bytes(path))


async def write_cube(cube: HsiCube, path: Path | str, dtype: SampleDType = SampleDType.FLOAT64) -> None:
    await write_bytes(path, encode_cube(cube, dtype))


async def read_kernel(path: Path | str) -> KernelStack:
    return decode_kernel(await read_bytes(path))


async def write_kernel(kernels: KernelStack, path: Path | str) -> None:
    await write_bytes(path, encode_kernel(kernels))


async def read_weights(path: Path | str) -> B3ddnWeights:
    return decode_weights(await read_bytes(path))


async def write_weights(weights: B3ddnWeights, path: Path | str) -> None:
    await write_bytes(path, encode_weights(weights))
