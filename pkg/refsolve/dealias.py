import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)


class PaddedProduct:
    """Alias-free pointwise products by zero-padding the spectrum.

    ``factor`` 3/2 removes aliasing from quadratic terms, 2 from cubic ones.
    """

    def __init__(self, shape: Tuple[int, ...], factor: float = 1.5):
        self.shape = tuple(shape)
        self.padded = tuple(int(np.ceil(factor * n)) for n in self.shape)
        self.slices = tuple(slice(m // 2 - n // 2, m // 2 - n // 2 + n) for n, m in zip(self.shape, self.padded))
        self.nyquist = tuple(n // 2 if n % 2 == 0 else None for n in self.shape)
        self.ratio = float(np.prod(self.padded)) / float(np.prod(self.shape))

    def to_physical(self, spectrum: np.ndarray) -> np.ndarray:
        shifted = np.fft.fftshift(spectrum)
        for axis, index in enumerate(self.nyquist):
            if index is not None:
                # the unpaired Nyquist mode is dropped so the padded field stays real
                shifted = shifted.copy()
                np.moveaxis(shifted, axis, 0)[0] = 0.0
        padded = np.zeros(self.padded, dtype=np.complex128)
        padded[self.slices] = shifted
        return np.real(np.fft.ifftn(np.fft.ifftshift(padded))) * self.ratio

    def to_spectral(self, values: np.ndarray) -> np.ndarray:
        spectrum = np.fft.fftshift(np.fft.fftn(values))
        return np.fft.ifftshift(spectrum[self.slices]) / self.ratio

    def product(self, *spectra: np.ndarray) -> np.ndarray:
        """Spectrum of the pointwise product of fields given by their spectra."""
        values = self.to_physical(spectra[0])
        for other in spectra[1:]:
            values = values * self.to_physical(other)
        return self.to_spectral(values)
