import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from common.errors import ContractError, NumericalError, ShapeError

logger = logging.getLogger(__name__)


@dataclass
class SolutionGrid:
    """Field samples on a uniform periodic space mesh at a list of times.

    ``values`` has shape (times, n_x) or (times, n_x, n_y) with [x][y]
    indexing; ``extras`` holds companion fields of the same shape (the
    stream function of a vorticity solution).
    """

    axes: List[np.ndarray]
    lengths: List[float]
    times: np.ndarray
    values: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    extras: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.axes = [np.asarray(a, dtype=np.float64) for a in self.axes]
        self.lengths = [float(l) for l in self.lengths]
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = (self.times.size,) + tuple(a.size for a in self.axes)
        if self.values.shape != expected:
            raise ShapeError(f"Solution values {self.values.shape} do not match mesh {expected}")
        for name, extra in self.extras.items():
            if np.shape(extra) != expected:
                raise ShapeError(f"Companion field '{name}' has shape {np.shape(extra)}, expected {expected}")
        if not np.all(np.isfinite(self.values)):
            raise NumericalError("Solution contains non-finite values")
        for a in self.axes:
            if a.size > 1 and not np.allclose(np.diff(a), a[1] - a[0]):
                raise ContractError("Solution meshes must be uniform")

    @property
    def spatial_dims(self) -> int:
        return len(self.axes)

    @property
    def origin(self) -> List[float]:
        return [float(a[0]) for a in self.axes]

    def field(self, name: str = "values") -> np.ndarray:
        if name == "values":
            return self.values
        try:
            return self.extras[name]
        except KeyError:
            raise ContractError(f"Solution has no field '{name}'") from None

    def mesh_points(self) -> np.ndarray:
        """(n_space, d) points in the flattened [x][y] order."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=1)

    def space_time_points(self) -> np.ndarray:
        """(times * n_space, d + 1) points, time-major, matching ``values.reshape(-1)``."""
        spatial = self.mesh_points()
        blocks = [np.concatenate([spatial, np.full((spatial.shape[0], 1), t)], axis=1) for t in self.times]
        return np.concatenate(blocks, axis=0)

    def _time_weights(self, t: float):
        if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
            raise ContractError(f"Time {t} outside the solution window [{self.times[0]}, {self.times[-1]}]")
        hit = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-12))
        if hit.size:
            return int(hit[0]), int(hit[0]), 0.0
        upper = int(np.searchsorted(self.times, t))
        lower = upper - 1
        weight = (t - self.times[lower]) / (self.times[upper] - self.times[lower])
        return lower, upper, float(weight)

    def sample(self, points: np.ndarray, t: float, field: str = "values") -> np.ndarray:
        """Periodic Fourier interpolation in space, linear in time."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, self.spatial_dims)
        data = self.field(field)
        lower, upper, weight = self._time_weights(t)
        snapshot = data[lower] if weight == 0.0 else (1.0 - weight) * data[lower] + weight * data[upper]
        return fourier_interpolate(snapshot, self.origin, self.lengths, points)

    def bilinear(self, points: np.ndarray, field: str = "values") -> np.ndarray:
        """Bilinear (x, t) interpolation for 1-D solutions; points are (n, 2)."""
        if self.spatial_dims != 1:
            raise ContractError("Bilinear space-time interpolation needs a 1-D solution")
        points = np.asarray(points, dtype=np.float64)
        data = self.field(field)
        x_axis = np.append(self.axes[0], self.axes[0][0] + self.lengths[0])
        data = np.concatenate([data, data[:, :1]], axis=1)
        x = np.clip(points[:, 0], x_axis[0], x_axis[-1])
        t = np.clip(points[:, 1], self.times[0], self.times[-1])
        ix = np.clip(np.searchsorted(x_axis, x, side="right") - 1, 0, x_axis.size - 2)
        it = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, max(self.times.size - 2, 0))
        if self.times.size == 1:
            wx = (x - x_axis[ix]) / (x_axis[ix + 1] - x_axis[ix])
            return (1 - wx) * data[0, ix] + wx * data[0, ix + 1]
        wx = (x - x_axis[ix]) / (x_axis[ix + 1] - x_axis[ix])
        wt = (t - self.times[it]) / (self.times[it + 1] - self.times[it])
        return (
            (1 - wt) * ((1 - wx) * data[it, ix] + wx * data[it, ix + 1])
            + wt * ((1 - wx) * data[it + 1, ix] + wx * data[it + 1, ix + 1])
        )


def fourier_interpolate(
    snapshot: np.ndarray, origin: Sequence[float], lengths: Sequence[float], points: np.ndarray
) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a periodic mesh field at ``points``.

    Exact on mesh points; the Nyquist mode of even meshes is carried as a cosine.
    """
    coefficients = np.fft.fftn(snapshot) / snapshot.size
    result = coefficients
    # contract one axis at a time: sum_k c_k exp(2 pi i xi_k (x - origin))
    for d, size in enumerate(snapshot.shape):
        xi = np.fft.fftfreq(size, d=lengths[d] / size)
        phase = np.exp(2j * np.pi * np.outer(points[:, d] - origin[d], xi))
        if d == 0:
            result = np.tensordot(phase, result, axes=([1], [0]))
        else:
            result = np.einsum("nk,nk...->n...", phase, result)
    return np.real(result)


def periodic_mesh(origin: float, length: float, size: int) -> np.ndarray:
    return origin + np.arange(size) * length / size
