import logging
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from autodiff.tape import Node
from common.errors import ShapeError
from spectral.grids import WavenumberGrid
from spectral.transforms import McProjection, dft_forward, inverse_dft, mc_project, mc_synthesize

logger = logging.getLogger(__name__)


class FourierBasis(ABC):
    """Quadrature-scaled spatial Fourier transform applied per time slice.

    ``forward`` maps a (slices, samples) field to (slices, K) coefficients
    approximating the integral of f(x) exp(-2 pi i xi x) over the domain;
    ``synthesize`` is the matching real reconstruction.
    """

    xi: np.ndarray

    @property
    def mode_count(self) -> int:
        return self.xi.shape[0]

    @property
    def spatial_dims(self) -> int:
        return self.xi.shape[1]

    @abstractmethod
    def forward(self, field: Node) -> ComplexPair:
        raise NotImplementedError

    @abstractmethod
    def synthesize(self, coefficients: ComplexPair) -> Node:
        raise NotImplementedError

    @abstractmethod
    def slice_points(self, slice_index: int) -> np.ndarray:
        raise NotImplementedError

    def space_time_points(self, times: Sequence[float]) -> np.ndarray:
        """(slices * samples, d + 1) network inputs, time-major."""
        blocks = []
        for m, t in enumerate(times):
            spatial = self.slice_points(m)
            blocks.append(np.concatenate([spatial, np.full((spatial.shape[0], 1), t)], axis=1))
        return np.concatenate(blocks, axis=0)


class GridBasis(FourierBasis):
    """Uniform periodic mesh; forward is (|Omega|/N) times the DFT."""

    def __init__(self, grid: WavenumberGrid, origin: Sequence[float]):
        self.grid = grid
        self.origin = tuple(float(o) for o in origin)
        self.xi = grid.xi()
        self.points = grid.points(self.origin)
        self.volume = grid.volume

    @property
    def samples_per_slice(self) -> int:
        return self.grid.count

    def _check(self, shape, expected, what):
        if len(shape) != 2 or shape[1] != expected:
            raise ShapeError(f"{what} must have shape (slices, {expected}), got {shape}")

    def forward(self, field: Node) -> ComplexPair:
        self._check(field.shape, self.grid.count, "Grid field")
        slices = field.shape[0]
        mesh = ops.reshape(field, (slices,) + self.grid.sizes)
        coefficients = dft_forward(mesh, self.grid.ndim).scale(self.volume / self.grid.count)
        return coefficients.reshape((slices, self.grid.count))

    def synthesize(self, coefficients: ComplexPair) -> Node:
        self._check(coefficients.shape, self.grid.count, "Grid coefficients")
        slices = coefficients.shape[0]
        mesh = coefficients.reshape((slices,) + self.grid.sizes)
        values = ops.scale(inverse_dft(mesh, self.grid.ndim).re, self.grid.count / self.volume)
        return ops.reshape(values, (slices, self.grid.count))

    def slice_points(self, slice_index: int) -> np.ndarray:
        return self.points


class McBasis(FourierBasis):
    """Monte-Carlo projection with one sample set per time slice."""

    def __init__(self, modes: np.ndarray, samples: np.ndarray, volume):
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim == 2:
            samples = samples[:, :, None]
        self.projection = McProjection(modes, samples, volume)
        self.xi = self.projection.modes
        self.samples = self.projection.samples
        self.volume = self.projection.volume

    @property
    def samples_per_slice(self) -> int:
        return self.projection.sample_count

    def forward(self, field: Node) -> ComplexPair:
        return mc_project(self.projection, field)

    def synthesize(self, coefficients: ComplexPair) -> Node:
        return mc_synthesize(self.projection, coefficients)

    def slice_points(self, slice_index: int) -> np.ndarray:
        return self.samples[slice_index]
