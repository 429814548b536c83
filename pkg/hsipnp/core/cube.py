from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from hsipnp.exception import DimensionError, SpecError


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class HsiCube(BaseModel):
    """Dense bands x rows x cols cube of real intensities (nominally [0, 1])."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray

    @field_validator('data', mode='before')
    @classmethod
    def _validate_data(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.float64)
        if array.ndim != 3:
            raise DimensionError(f'Cube must be 3D (bands, rows, cols), got shape {array.shape}')
        if min(array.shape) < 1:
            raise DimensionError(f'Cube dimensions must be positive, got {array.shape}')
        if not np.isfinite(array).all():
            raise SpecError('Cube contains non-finite values')
        return _freeze(array)

    @classmethod
    def zeros(cls, bands: int, rows: int, cols: int) -> HsiCube:
        return cls(data=np.zeros((bands, rows, cols)))

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def check_same_shape(self, other: HsiCube) -> None:
        if self.shape != other.shape:
            raise DimensionError(f'Cube shapes differ: {self.shape} vs {other.shape}')


class FreqCube(BaseModel):
    """Per-band 2D discrete Fourier transform of an HsiCube."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray

    @field_validator('data', mode='before')
    @classmethod
    def _validate_data(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.complex128)
        if array.ndim != 3 or min(array.shape) < 1:
            raise DimensionError(f'Frequency cube must be a nonempty 3D array, got shape {array.shape}')
        return _freeze(array)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


class KernelStack(BaseModel):
    """Per-band (or shared) odd-sized 2D point spread functions, centre at ((kh-1)/2, (kw-1)/2)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    taps: np.ndarray

    @field_validator('taps', mode='before')
    @classmethod
    def _validate_taps(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.float64)
        if array.ndim == 2:
            array = array[np.newaxis]
        if array.ndim != 3 or min(array.shape) < 1:
            raise DimensionError(f'Kernel stack must be (count, kh, kw), got shape {array.shape}')
        _, kh, kw = array.shape
        if kh % 2 == 0 or kw % 2 == 0:
            raise SpecError(f'Kernel extents must be odd, got {kh}x{kw}')
        if not np.isfinite(array).all():
            raise SpecError('Kernel taps contain non-finite values')
        return _freeze(array)

    @classmethod
    def delta(cls, bands: int = 1, size: int = 1) -> KernelStack:
        taps = np.zeros((bands, size, size))
        taps[:, size // 2, size // 2] = 1.0
        return cls(taps=taps)

    @property
    def bands(self) -> int:
        return self.taps.shape[0]

    @property
    def kh(self) -> int:
        return self.taps.shape[1]

    @property
    def kw(self) -> int:
        return self.taps.shape[2]

    @property
    def is_identity(self) -> bool:
        centre = np.zeros((self.kh, self.kw))
        centre[self.kh // 2, self.kw // 2] = 1.0
        return bool(np.all(self.taps == centre))

    def kernel(self, band: int) -> np.ndarray:
        return self.taps[0 if self.bands == 1 else band]

    def check_compatible(self, shape: tuple[int, int, int]) -> None:
        bands, rows, cols = shape
        if self.bands not in (1, bands):
            raise DimensionError(f'Kernel stack has {self.bands} kernels, cube has {bands} bands')
        if self.kh > rows or self.kw > cols:
            raise DimensionError(f'Kernel {self.kh}x{self.kw} does not fit in a {rows}x{cols} plane')
