import logging
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from autodiff.complex import ComplexPair
from autodiff.linear import LinearOperator, linear_op_node
from autodiff.tape import Node
from common.errors import ContractError, ShapeError

logger = logging.getLogger(__name__)


def naive_dft(values: np.ndarray) -> np.ndarray:
    """O(n^2) reference DFT, f_hat[k] = sum_j f[j] exp(-2 pi i j k / n)."""
    values = np.asarray(values, dtype=np.complex128)
    n = values.shape[-1]
    j = np.arange(n)
    kernel = np.exp(-2j * np.pi * (np.outer(j, j) % n) / n)
    return values @ kernel


def _check_axes(shape: Tuple[int, ...], ndim: int):
    if len(shape) < ndim:
        raise ShapeError(f"Cannot transform {ndim} axes of a tensor with shape {shape}")
    for n in shape[len(shape) - ndim :]:
        if n == 0:
            raise ContractError(f"Empty transform dimension in {shape}")
        if n < 2:
            raise ContractError(f"Transform dimensions need at least 2 points, got {shape}")


class DftOperator(LinearOperator):
    """Unnormalized forward DFT over the trailing ``ndim`` axes."""

    name = "dft"

    def __init__(self, shape: Tuple[int, ...], ndim: int = 1):
        _check_axes(tuple(shape), ndim)
        super().__init__(shape, shape)
        self.axes = tuple(range(-ndim, 0))
        self.count = int(np.prod([shape[a] for a in self.axes]))

    def apply(self, z):
        return np.fft.fftn(z, axes=self.axes)

    def adjoint(self, g):
        return self.count * np.fft.ifftn(g, axes=self.axes)


class InverseDftOperator(LinearOperator):
    """Inverse DFT (1/N normalization) over the trailing ``ndim`` axes."""

    name = "idft"

    def __init__(self, shape: Tuple[int, ...], ndim: int = 1):
        _check_axes(tuple(shape), ndim)
        super().__init__(shape, shape)
        self.axes = tuple(range(-ndim, 0))
        self.count = int(np.prod([shape[a] for a in self.axes]))

    def apply(self, z):
        return np.fft.ifftn(z, axes=self.axes)

    def adjoint(self, g):
        return np.fft.fftn(g, axes=self.axes) / self.count


def dft_forward(values: Union[Node, ComplexPair], ndim: int = 1) -> ComplexPair:
    return linear_op_node(DftOperator(values.shape, ndim), values)


def inverse_dft(coefficients: Union[Node, ComplexPair], ndim: int = 1) -> ComplexPair:
    return linear_op_node(InverseDftOperator(coefficients.shape, ndim), coefficients)


@dataclass(frozen=True)
class McProjection:
    """Monte-Carlo Fourier projection (|Omega|/N) Phi f.

    ``samples`` is (N, d) for one sample set or (M, N, d) for one set per
    time slice; ``modes`` is (K, d). Phi[k, j] = exp(-2 pi i <xi_k, x_j>).
    With per-slice sample sets ``volume`` may be an (M,) array.
    """

    modes: np.ndarray
    samples: np.ndarray
    volume: Union[float, np.ndarray]
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=np.float64)
        if modes.ndim == 1:
            modes = modes[:, None]
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[:, None]
        if modes.shape[1] != samples.shape[-1]:
            raise ShapeError(f"Modes are {modes.shape[1]}-D but samples are {samples.shape[-1]}-D")
        if samples.shape[-2] == 0:
            raise ContractError("Monte-Carlo projection needs at least one sample")
        volume = np.asarray(self.volume, dtype=np.float64)
        if volume.ndim == 0:
            volume = float(volume)
        elif samples.ndim != 3 or volume.shape != (samples.shape[0],):
            raise ShapeError(f"Per-slice volumes {volume.shape} do not match sample sets {samples.shape}")
        if np.any(np.asarray(volume) <= 0):
            raise ContractError("Domain volume must be positive")
        phase = np.einsum("kd,...nd->...kn", modes, samples)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "volume", volume)
        object.__setattr__(self, "matrix", np.exp(-2j * np.pi * phase))

    @property
    def sample_count(self) -> int:
        return self.samples.shape[-2]

    @property
    def mode_count(self) -> int:
        return self.modes.shape[0]

    def _per_slice(self, values):
        return values if np.ndim(values) == 0 else np.asarray(values)[:, None]

    @property
    def scale(self):
        return self._per_slice(np.asarray(self.volume) / self.sample_count)

    @property
    def inverse_volume(self):
        return self._per_slice(1.0 / np.asarray(self.volume))


class ProjectionOperator(LinearOperator):
    """``scale * Phi`` applied to (..., N) inputs; a 3-D Phi pairs slices with sample sets."""

    name = "mc_projection"

    def __init__(self, matrix: np.ndarray, scale: float, input_shape: Tuple[int, ...]):
        self.matrix = matrix
        self.scale = scale
        if input_shape[-1] != matrix.shape[-1]:
            raise ShapeError(f"Projection expects {matrix.shape[-1]} samples, got input {input_shape}")
        if matrix.ndim == 3 and tuple(input_shape) != (matrix.shape[0], matrix.shape[2]):
            expected = (matrix.shape[0], matrix.shape[2])
            raise ShapeError(f"Per-slice projection expects input {expected}, got {input_shape}")
        super().__init__(input_shape, tuple(input_shape[:-1]) + (matrix.shape[-2],))

    def apply(self, z):
        if self.matrix.ndim == 3:
            return self.scale * np.einsum("mkn,mn->mk", self.matrix, z)
        return self.scale * (z @ self.matrix.T)

    def adjoint(self, g):
        if self.matrix.ndim == 3:
            return self.scale * np.einsum("mkn,mk->mn", self.matrix.conj(), g)
        return self.scale * (g @ self.matrix.conj())


class SynthesisOperator(LinearOperator):
    """``scale * Phi^H`` mapping mode coefficients back to sample values."""

    name = "mc_synthesis"

    def __init__(self, matrix: np.ndarray, scale: float, input_shape: Tuple[int, ...]):
        self.matrix = matrix
        self.scale = scale
        if input_shape[-1] != matrix.shape[-2]:
            raise ShapeError(f"Synthesis expects {matrix.shape[-2]} modes, got input {input_shape}")
        super().__init__(input_shape, tuple(input_shape[:-1]) + (matrix.shape[-1],))

    def apply(self, z):
        if self.matrix.ndim == 3:
            return self.scale * np.einsum("mkn,mk->mn", self.matrix.conj(), z)
        return self.scale * (z @ self.matrix.conj())

    def adjoint(self, g):
        if self.matrix.ndim == 3:
            return self.scale * np.einsum("mkn,mn->mk", self.matrix, g)
        return self.scale * (g @ self.matrix.T)


def mc_project(projection: McProjection, samples: Union[Node, ComplexPair]) -> ComplexPair:
    """(|Omega|/N) Phi f as a complex pair of shape (..., K)."""
    op = ProjectionOperator(projection.matrix, projection.scale, samples.shape)
    return linear_op_node(op, samples)


def mc_synthesize(projection: McProjection, coefficients: ComplexPair) -> Node:
    """(1/|Omega|) Re(Phi^H c): real reconstruction at the sample points."""
    op = SynthesisOperator(projection.matrix, projection.inverse_volume, coefficients.shape)
    return linear_op_node(op, coefficients).re
