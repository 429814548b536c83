"""Scale-free whiteness of 3D residuals.

For a residual cube R with L voxels, the circular autocorrelation is
A = (R * R) / L, computed as the inverse 3D DFT of |DFT(R)|^2 / L, and the
whiteness is the squared Frobenius norm of A / A(0, 0, 0):

    W(R) = ||R * R||_F^2 / ||R||_F^4

W equals 1 for an impulse, L for a constant cube, and stays close to 2 for
i.i.d. Gaussian noise of any level. Blurry, structured residuals score higher.
"""
import numpy as np
from pydantic import BaseModel
from scipy import fft

from hsipnp.core.cube import HsiCube
from hsipnp.exception import DegenerateResidualError


class WhitenessReport(BaseModel):
    w: float
    zero_lag: float
    l: int


def autocorr3d(r: HsiCube) -> HsiCube:
    power = np.abs(fft.fftn(r.data)) ** 2
    return HsiCube(data=fft.ifftn(power).real / r.size)


def whiteness_measure(r: HsiCube) -> WhitenessReport:
    energy = float(np.sum(r.data ** 2))
    if energy == 0:
        raise DegenerateResidualError
    autocorr = autocorr3d(r).data
    # A(0,0,0) = ||R||^2 / L exactly; normalise by the direct energy rather than the FFT estimate.
    zero_lag = energy / r.size
    w = float(np.sum((autocorr / zero_lag) ** 2))
    return WhitenessReport(w=w, zero_lag=zero_lag, l=r.size)


def whiteness_from_plane_spectra(plane_spectra: np.ndarray, workers: int | None = None) -> float:
    """Whiteness of a residual given its per-band 2D spectra, via Parseval.

    With S the full 3D spectrum, ||R||^2 = sum|S|^2 / L and ||R * R||^2 = sum|S|^4 / L,
    so W = L * sum|S|^4 / (sum|S|^2)^2.
    """
    power = np.abs(fft.fft(plane_spectra, axis=0, workers=workers)) ** 2
    energy = float(np.sum(power))
    if energy == 0:
        raise DegenerateResidualError
    return float(plane_spectra.size * np.sum(power ** 2) / energy ** 2)
