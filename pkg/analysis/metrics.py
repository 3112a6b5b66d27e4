import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from common.errors import NumericalError, ShapeError
from refsolve.solution import SolutionGrid

logger = logging.getLogger(__name__)

FieldLike = Union[SolutionGrid, np.ndarray]


def _values(field: FieldLike) -> np.ndarray:
    return field.values if isinstance(field, SolutionGrid) else np.asarray(field, dtype=np.float64)


def relative_l2(u_ref: FieldLike, u_net: FieldLike) -> float:
    """sqrt(sum (u - u_theta)^2) / sqrt(sum u^2) over the shared mesh."""
    ref, net = _values(u_ref), _values(u_net)
    if ref.shape != net.shape:
        raise ShapeError(f"Reference mesh {ref.shape} and prediction {net.shape} differ")
    denominator = float(np.sqrt(np.sum(ref**2)))
    if denominator == 0.0:
        raise NumericalError("Relative L2 error is undefined for a zero reference")
    return float(np.sqrt(np.sum((ref - net) ** 2))) / denominator


@dataclass(frozen=True)
class ErrorPowerCurve:
    """Time-averaged spatial error power per wavenumber magnitude."""

    wavenumbers: np.ndarray
    power: np.ndarray


def error_power_spectrum(
    u_ref: FieldLike, u_net: FieldLike, lengths: Optional[Sequence[float]] = None
) -> ErrorPowerCurve:
    """Spatial DFT of the pointwise error per time slice, |.|^2 averaged over time and over
    modes of equal (rounded) index magnitude.

    Fields are (times, n_x) or (times, n_x, n_y). Coefficients are normalized by the
    mesh size so a unit-amplitude exp(2 pi i k x / L) error has power 1 at |xi| = k / L.
    """
    ref, net = _values(u_ref), _values(u_net)
    if ref.shape != net.shape:
        raise ShapeError(f"Reference mesh {ref.shape} and prediction {net.shape} differ")
    if ref.ndim not in (2, 3):
        raise ShapeError(f"Expected (times, space...) fields, got shape {ref.shape}")
    if lengths is None:
        lengths = u_ref.lengths if isinstance(u_ref, SolutionGrid) else [1.0] * (ref.ndim - 1)

    spatial = ref.shape[1:]
    axes = tuple(range(1, ref.ndim))
    coefficients = np.fft.fftn(net - ref, axes=axes) / float(np.prod(spatial))
    power = np.mean(np.abs(coefficients) ** 2, axis=0)

    index = np.meshgrid(*[np.fft.fftfreq(n, d=1.0 / n) for n in spatial], indexing="ij")
    radius = np.rint(np.sqrt(sum(k**2 for k in index))).astype(int).reshape(-1)
    totals = np.bincount(radius, weights=power.reshape(-1))
    counts = np.bincount(radius)
    occupied = counts > 0
    bins = np.flatnonzero(occupied)
    averaged = totals[occupied] / counts[occupied]
    return ErrorPowerCurve(bins / float(lengths[0]), averaged)
