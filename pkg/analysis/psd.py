"""Radial power spectral density of an error field and its summary statistics."""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

from common.errors import NumericalError, ShapeError

logger = logging.getLogger(__name__)

NYQUIST = 0.5
LOG_FLOOR = 1e-20
BANDS = ((0.0, 0.1), (0.1, 0.25), (0.25, 0.5))

STATS_COLUMNS = (
    "total_log_error_power",
    "average_log_error_power",
    "frequency_50",
    "frequency_90",
    "ratio_0.0-0.1",
    "ratio_0.1-0.25",
    "ratio_0.25-0.5",
)


@dataclass(frozen=True)
class PsdCurve:
    frequencies: np.ndarray
    power: np.ndarray
    counts: np.ndarray

    @property
    def bins(self) -> int:
        return self.power.size


def radial_psd(error: np.ndarray) -> PsdCurve:
    """Average |FFT-shifted spectrum|^2 over integer radii from the spectrum center."""
    error = np.asarray(error, dtype=np.float64)
    if error.ndim != 2 or min(error.shape) < 2:
        raise ShapeError(f"Radial PSD needs a 2-D field of at least 2x2, got shape {error.shape}")
    h, w = error.shape
    spectrum = np.abs(np.fft.fftshift(np.fft.fft2(error))) ** 2
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    radius = np.sqrt((rows - h // 2) ** 2 + (cols - w // 2) ** 2).astype(int).reshape(-1)

    totals = np.zeros(radius.max() + 1)
    counts = np.zeros(radius.max() + 1)
    np.add.at(totals, radius, spectrum.reshape(-1))
    np.add.at(counts, radius, 1.0)
    power = np.divide(totals, counts, out=np.zeros_like(totals), where=counts > 0)
    frequencies = np.linspace(0.0, NYQUIST, power.size)
    return PsdCurve(frequencies, power, counts)


@dataclass(frozen=True)
class FrequencyStats:
    total_log_power: float
    average_log_power: float
    frequency_50: float
    frequency_90: float
    ratio_low: float
    ratio_mid: float
    ratio_high: float

    def __post_init__(self):
        if self.frequency_50 > self.frequency_90:
            raise NumericalError(f"Percentile frequencies out of order: {self.frequency_50} > {self.frequency_90}")

    def as_row(self) -> Dict[str, float]:
        values = (
            self.total_log_power,
            self.average_log_power,
            self.frequency_50,
            self.frequency_90,
            self.ratio_low,
            self.ratio_mid,
            self.ratio_high,
        )
        return dict(zip(STATS_COLUMNS, values))


def percentile_frequency(psd: PsdCurve, tau: float) -> float:
    """Smallest bin frequency whose cumulative power fraction reaches tau."""
    fraction = np.cumsum(psd.power) / np.sum(psd.power)
    index = int(np.argmax(fraction >= tau - 1e-12))
    return float(psd.frequencies[index])


def frequency_stats(psd: PsdCurve) -> FrequencyStats:
    total = float(np.sum(psd.power))
    if total <= 0.0:
        raise NumericalError("Frequency statistics need a PSD with nonzero power")
    logs = np.log(psd.power + LOG_FLOOR)
    ratios = []
    for i, (low, high) in enumerate(BANDS):
        inside = psd.frequencies <= high + 1e-12
        inside &= psd.frequencies >= low if i == 0 else psd.frequencies > low + 1e-12
        ratios.append(float(np.sum(psd.power[inside]) / total))
    return FrequencyStats(
        float(np.log(total + LOG_FLOOR)),
        float(np.mean(logs)),
        percentile_frequency(psd, 0.5),
        percentile_frequency(psd, 0.9),
        *ratios,
    )
