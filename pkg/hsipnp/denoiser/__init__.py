# Importing the implementations registers them in DENOISERS.
from hsipnp.denoiser import b3ddn, spectral  # noqa: F401
