import numpy as np
from scipy import fft

from hsipnp.core.cube import FreqCube, HsiCube, KernelStack
from hsipnp.exception import DimensionError, SpecError

PLANE_AXES = (-2, -1)


def fft_planes(array: np.ndarray, workers: int | None = None) -> np.ndarray:
    """2D DFT of every band; ``workers`` transforms bands in parallel with identical results."""
    return fft.fft2(array, axes=PLANE_AXES, workers=workers)


def ifft_planes(spectrum: np.ndarray, workers: int | None = None) -> np.ndarray:
    return fft.ifft2(spectrum, axes=PLANE_AXES, workers=workers).real


def forward_transform(cube: HsiCube, workers: int | None = None) -> FreqCube:
    return FreqCube(data=fft_planes(cube.data, workers))


def inverse_transform(freq: FreqCube, workers: int | None = None) -> HsiCube:
    return HsiCube(data=ifft_planes(freq.data, workers))


def psf_to_otf(kernel: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Embed an odd-sized PSF in a rows x cols plane, move its centre to (0, 0) and take the 2D DFT.

    Multiplying a band spectrum by the result is circular convolution with the kernel.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise DimensionError(f'PSF must be 2D, got shape {kernel.shape}')
    kh, kw = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise SpecError(f'PSF extents must be odd, got {kh}x{kw}')
    if kh > rows or kw > cols:
        raise DimensionError(f'PSF {kh}x{kw} does not fit in a {rows}x{cols} plane')

    plane = np.zeros((rows, cols))
    plane[:kh, :kw] = kernel
    plane = np.roll(plane, shift=(-(kh // 2), -(kw // 2)), axis=(0, 1))
    return fft.fft2(plane)


def otf_stack(kernels: KernelStack, rows: int, cols: int) -> np.ndarray:
    """OTFs shaped (count, rows, cols); count 1 broadcasts over every band."""
    return np.stack([psf_to_otf(kernel, rows, cols) for kernel in kernels.taps])


def convolve_array(array: np.ndarray, otf: np.ndarray, workers: int | None = None) -> np.ndarray:
    return ifft_planes(fft_planes(array, workers) * otf, workers)


def correlate_array(array: np.ndarray, otf: np.ndarray, workers: int | None = None) -> np.ndarray:
    return ifft_planes(fft_planes(array, workers) * np.conj(otf), workers)


def circ_convolve(cube: HsiCube, kernels: KernelStack, workers: int | None = None) -> HsiCube:
    kernels.check_compatible(cube.shape)
    if kernels.is_identity:
        return HsiCube(data=cube.data)
    return HsiCube(data=convolve_array(cube.data, otf_stack(kernels, cube.rows, cube.cols), workers))


def apply_adjoint(cube: HsiCube, kernels: KernelStack, workers: int | None = None) -> HsiCube:
    """Apply H^T, the per-band circular correlation with each kernel."""
    kernels.check_compatible(cube.shape)
    if kernels.is_identity:
        return HsiCube(data=cube.data)
    return HsiCube(data=correlate_array(cube.data, otf_stack(kernels, cube.rows, cube.cols), workers))
