from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ValidationError

from hsipnp.core.constants import KernelKind
from hsipnp.core.cube import KernelStack
from hsipnp.exception import SpecError

# Sub-pixel samples per unit length when rasterising motion blur.
MOTION_OVERSAMPLING = 16


class KernelSpec(BaseModel):
    """Parametric blur kernel.

    Compact text form, ``kind:size:params``::

        gaussian:9:2        bandwidth 2
        circle:9:7          diameter 7
        square:5:5          side 5
        motion:13:9:45      length 9 at 45 degrees
    """
    kind: KernelKind
    size: int
    bandwidth: float | None = None
    diameter: int | None = None
    side: int | None = None
    length: float | None = None
    angle: float = 0.0

    def check(self) -> KernelSpec:
        if self.size < 1 or self.size % 2 == 0:
            raise SpecError(f'Kernel size must be a positive odd number, got {self.size}')

        match self.kind:
            case KernelKind.GAUSSIAN:
                if self.bandwidth is None or self.bandwidth <= 0:
                    raise SpecError(f'Gaussian bandwidth must be positive, got {self.bandwidth}')
            case KernelKind.CIRCLE:
                if self.diameter is None or self.diameter <= 0:
                    raise SpecError(f'Circle diameter must be positive, got {self.diameter}')
                if self.diameter > self.size:
                    raise SpecError(f'Circle diameter {self.diameter} exceeds kernel size {self.size}')
            case KernelKind.SQUARE:
                if self.side is None or self.side <= 0:
                    raise SpecError(f'Square side must be positive, got {self.side}')
                if self.side > self.size or self.side % 2 == 0:
                    raise SpecError(f'Square side must be odd and at most {self.size}, got {self.side}')
            case KernelKind.MOTION:
                if self.length is None or self.length <= 0:
                    raise SpecError(f'Motion length must be positive, got {self.length}')
                if self.length > self.size:
                    raise SpecError(f'Motion length {self.length} exceeds kernel size {self.size}')
        return self

    @classmethod
    def parse(cls, text: str) -> KernelSpec:
        kind, *fields = text.strip().split(':')
        try:
            match kind:
                case KernelKind.GAUSSIAN:
                    size, bandwidth = fields
                    spec = cls(kind=kind, size=size, bandwidth=bandwidth)
                case KernelKind.CIRCLE:
                    size, diameter = fields
                    spec = cls(kind=kind, size=size, diameter=diameter)
                case KernelKind.SQUARE:
                    size, side = fields
                    spec = cls(kind=kind, size=size, side=side)
                case KernelKind.MOTION:
                    size, length, angle = fields
                    spec = cls(kind=kind, size=size, length=length, angle=angle)
                case _:
                    raise SpecError(f'Unknown kernel kind {kind!r}, expected one of {[k.value for k in KernelKind]}')
        except (ValueError, ValidationError) as exc:
            raise SpecError(f'Invalid kernel spec {text!r}: {exc}') from None
        return spec.check()

    def __str__(self) -> str:
        match self.kind:
            case KernelKind.GAUSSIAN:
                params = [self.bandwidth]
            case KernelKind.CIRCLE:
                params = [self.diameter]
            case KernelKind.SQUARE:
                params = [self.side]
            case _:
                params = [self.length, self.angle]
        return ':'.join([self.kind.value, str(self.size), *(_compact(p) for p in params)])


def _compact(value: float) -> str:
    # Integral values print without a fraction, everything else with full repr precision.
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.arange(size) - size // 2
    return np.meshgrid(offsets, offsets, indexing='ij')


def _gaussian(spec: KernelSpec) -> np.ndarray:
    rows, cols = _grid(spec.size)
    return np.exp(-(rows ** 2 + cols ** 2) / (2.0 * spec.bandwidth ** 2))


def _circle(spec: KernelSpec) -> np.ndarray:
    rows, cols = _grid(spec.size)
    radius = spec.diameter / 2.0
    return (rows ** 2 + cols ** 2 <= radius ** 2).astype(np.float64)


def _square(spec: KernelSpec) -> np.ndarray:
    rows, cols = _grid(spec.size)
    half = spec.side // 2
    return ((np.abs(rows) <= half) & (np.abs(cols) <= half)).astype(np.float64)


def _motion(spec: KernelSpec) -> np.ndarray:
    """Anti-aliased segment of the given length through the centre, splatted bilinearly."""
    kernel = np.zeros((spec.size, spec.size))
    half = (spec.length - 1.0) / 2.0
    samples = max(2, math.ceil(2 * half * MOTION_OVERSAMPLING) + 1)
    t = np.linspace(-half, half, samples)
    theta = math.radians(spec.angle)
    # Row axis points down, so a positive angle tilts the segment upwards.
    row = spec.size // 2 - t * math.sin(theta)
    col = spec.size // 2 + t * math.cos(theta)

    row0, col0 = np.floor(row), np.floor(col)
    frac_r, frac_c = row - row0, col - col0
    for d_r, w_r in ((0, 1.0 - frac_r), (1, frac_r)):
        for d_c, w_c in ((0, 1.0 - frac_c), (1, frac_c)):
            weight = w_r * w_c
            r_idx = (row0 + d_r).astype(int)
            c_idx = (col0 + d_c).astype(int)
            inside = (weight > 0) & (r_idx >= 0) & (r_idx < spec.size) & (c_idx >= 0) & (c_idx < spec.size)
            np.add.at(kernel, (r_idx[inside], c_idx[inside]), weight[inside])
    return kernel


def make_kernel(spec: KernelSpec, bands: int = 1) -> KernelStack:
    spec.check()
    if bands < 1:
        raise SpecError(f'Kernel band count must be at least 1, got {bands}')
    match spec.kind:
        case KernelKind.GAUSSIAN:
            taps = _gaussian(spec)
        case KernelKind.CIRCLE:
            taps = _circle(spec)
        case KernelKind.SQUARE:
            taps = _square(spec)
        case KernelKind.MOTION:
            taps = _motion(spec)
        case _:
            raise SpecError(f'Unsupported kernel kind {spec.kind}')

    taps = taps / taps.sum()
    return KernelStack(taps=np.repeat(taps[np.newaxis], bands, axis=0))
