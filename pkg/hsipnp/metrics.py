from __future__ import annotations

from enum import StrEnum

import numpy as np
from pydantic import BaseModel

from hsipnp.core.constants import INTENSITY_SCALE
from hsipnp.core.cube import HsiCube
from hsipnp.exception import MetricError

PSNR_CAP_DB = 100.0
SSIM_C1 = (0.01 * INTENSITY_SCALE) ** 2
SSIM_C2 = (0.03 * INTENSITY_SCALE) ** 2

METRIC_COLUMNS = ('rmse', 'psnr', 'ssim', 'ergas')


class MeanOf(StrEnum):
    REFERENCE = 'reference'
    ESTIMATE = 'estimate'


class MetricReport(BaseModel):
    rmse: float
    psnr: float
    ssim: float
    ergas: float

    def csv_row(self) -> str:
        return ','.join(repr(float(getattr(self, name))) for name in METRIC_COLUMNS)


def _scaled_pair(x_hat: HsiCube, x: HsiCube) -> tuple[np.ndarray, np.ndarray]:
    x_hat.check_same_shape(x)
    return x_hat.data * INTENSITY_SCALE, x.data * INTENSITY_SCALE


def rmse(x_hat: HsiCube, x: HsiCube) -> float:
    estimate, reference = _scaled_pair(x_hat, x)
    return float(np.sqrt(np.mean((estimate - reference) ** 2)))


def psnr(x_hat: HsiCube, x: HsiCube) -> float:
    """Band-averaged PSNR against each reference band's own peak, capped at 100 dB."""
    estimate, reference = _scaled_pair(x_hat, x)
    plane = reference.shape[1] * reference.shape[2]

    values = []
    for band_hat, band in zip(estimate, reference):
        peak = float(band.max())
        if peak <= 0:
            raise MetricError('PSNR needs a positive reference band maximum')
        error = float(np.sum((band_hat - band) ** 2))
        if error == 0:
            values.append(PSNR_CAP_DB)
            continue
        values.append(min(PSNR_CAP_DB, 10.0 * np.log10(plane * peak ** 2 / error)))
    return float(np.mean(values))


def ssim(x_hat: HsiCube, x: HsiCube) -> float:
    """Band-averaged SSIM from global (not windowed) band statistics."""
    estimate, reference = _scaled_pair(x_hat, x)

    values = []
    for band_hat, band in zip(estimate, reference):
        mu_hat, mu = band_hat.mean(), band.mean()
        d_hat, d = band_hat - mu_hat, band - mu
        var_hat, var, cov = np.mean(d_hat * d_hat), np.mean(d * d), np.mean(d_hat * d)
        numerator = (2 * mu_hat * mu + SSIM_C1) * (2 * cov + SSIM_C2)
        denominator = (mu_hat * mu_hat + mu * mu + SSIM_C1) * (var_hat + var + SSIM_C2)
        values.append(numerator / denominator)
    return float(np.mean(values))


def ergas(x_hat: HsiCube, x: HsiCube, mean_of: MeanOf = MeanOf.REFERENCE) -> float:
    estimate, reference = _scaled_pair(x_hat, x)
    band_mse = np.mean((estimate - reference) ** 2, axis=(1, 2))
    band_mean = (reference if mean_of is MeanOf.REFERENCE else estimate).mean(axis=(1, 2))
    if np.any(band_mean == 0):
        raise MetricError(f'ERGAS needs nonzero band means of the {mean_of.value} cube')
    return float(100.0 * np.sqrt(np.mean(band_mse / band_mean ** 2)))


def evaluate(x_hat: HsiCube, x: HsiCube, mean_of: MeanOf = MeanOf.REFERENCE) -> MetricReport:
    return MetricReport(
        rmse=rmse(x_hat, x),
        psnr=psnr(x_hat, x),
        ssim=ssim(x_hat, x),
        ergas=ergas(x_hat, x, mean_of),
    )
