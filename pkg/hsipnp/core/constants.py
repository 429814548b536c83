from enum import IntEnum, StrEnum

# Intensities are [0, 1]; metrics and the training noise range use 0-255.
INTENSITY_SCALE = 255.0


class KernelKind(StrEnum):
    GAUSSIAN = 'gaussian'
    CIRCLE = 'circle'
    MOTION = 'motion'
    SQUARE = 'square'


class SampleDType(IntEnum):
    FLOAT32 = 0
    FLOAT64 = 1

    @property
    def numpy_dtype(self) -> str:
        return '<f4' if self is SampleDType.FLOAT32 else '<f8'

    @property
    def itemsize(self) -> int:
        return 4 if self is SampleDType.FLOAT32 else 8


class LayerType(IntEnum):
    CONV = 0
    BATCHNORM = 1


class FileMagic(StrEnum):
    CUBE = 'HSC1'
    KERNEL = 'PSF1'
    WEIGHTS = 'B3W1'


class Subcommand(StrEnum):
    MAKE_KERNEL = 'make-kernel'
    DEGRADE = 'degrade'
    DECONVOLVE = 'deconvolve'
    DENOISE = 'denoise'
    TRAIN = 'train'
    METRICS = 'metrics'
    BENCHMARK = 'benchmark'
    SYNTHESIZE = 'synthesize'
    NORMALIZE = 'normalize'
