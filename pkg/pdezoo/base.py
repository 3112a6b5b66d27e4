import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from autodiff.tape import Node
from common.errors import ContractError, ShapeError
from jetnet.jets import Jet, JetOrderSpec
from spectral.bases import FourierBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Domain:
    """Space-time box, optionally cut to the triangle |x - c| <= (L/2)(1 - s/2)
    where s in [0, 1] is normalized time."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    t_start: float
    t_end: float
    shape: Literal["square", "triangle"] = "square"

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper) or any(u <= l for l, u in zip(self.lower, self.upper)):
            raise ContractError(f"Invalid spatial bounds {self.lower} .. {self.upper}")
        if self.t_end <= self.t_start:
            raise ContractError(f"Invalid time interval [{self.t_start}, {self.t_end}]")
        if self.shape == "triangle" and len(self.lower) != 1:
            raise ContractError("Triangular domains are 1-D in space")

    @property
    def spatial_dims(self) -> int:
        return len(self.lower)

    @property
    def lengths(self) -> Tuple[float, ...]:
        return tuple(u - l for l, u in zip(self.lower, self.upper))

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def slice_bounds(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """Spatial interval (1-D) of the domain section at time(s) ``t``."""
        t = np.asarray(t, dtype=np.float64)
        lo, hi = self.lower[0], self.upper[0]
        if self.shape == "square":
            return np.full_like(t, lo), np.full_like(t, hi)
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo) * (1.0 - 0.5 * (t - self.t_start) / self.duration)
        return center - half, center + half

    def slice_volume(self, t) -> np.ndarray:
        if self.shape == "square":
            return np.full_like(np.asarray(t, dtype=np.float64), float(np.prod(self.lengths)))
        lo, hi = self.slice_bounds(t)
        return hi - lo

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        space, t = points[:, :-1], points[:, -1]
        inside = (t >= self.t_start) & (t <= self.t_end)
        if self.shape == "triangle":
            lo, hi = self.slice_bounds(t)
            return inside & (space[:, 0] >= lo) & (space[:, 0] <= hi)
        for d in range(self.spatial_dims):
            inside &= (space[:, d] >= self.lower[d]) & (space[:, d] <= self.upper[d])
        return inside


@dataclass(frozen=True)
class PdeProblem(ABC):
    """One PDE: physical residual on jets, spectral residual on a Fourier basis."""

    domain: Domain
    reference: Optional[Any] = field(default=None, repr=False, compare=False)

    name = "pde"
    output_dim = 1
    supports_gradient_enhancement = False

    @property
    def spatial_dims(self) -> int:
        return self.domain.spatial_dims

    @property
    @abstractmethod
    def physics_spec(self) -> JetOrderSpec:
        raise NotImplementedError

    @property
    @abstractmethod
    def fourier_spec(self) -> JetOrderSpec:
        raise NotImplementedError

    @property
    def gradient_spec(self) -> JetOrderSpec:
        raise ContractError(f"{self.name} has no physical-space gradient-enhanced residual")

    @abstractmethod
    def coefficients(self) -> Dict[str, float]:
        raise NotImplementedError

    @abstractmethod
    def initial_condition(self, x: np.ndarray) -> np.ndarray:
        """u(x, t_start) for (n, d) spatial points; (n, outputs)."""
        raise NotImplementedError

    @abstractmethod
    def physics_residuals(self, jet: Jet) -> Dict[str, Node]:
        """Pointwise residual batches keyed by loss term ("physics", "compatibility")."""
        raise NotImplementedError

    @abstractmethod
    def spectral_residual(self, jet: Jet, basis: FourierBasis, slices: int) -> ComplexPair:
        """R_hat(xi, t) of shape (slices, K) from a time-major jet batch."""
        raise NotImplementedError

    def gradient_residual(self, jet: Jet) -> Node:
        raise ContractError(f"{self.name} has no physical-space gradient-enhanced residual")

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "domain": {
                "lower": list(self.domain.lower),
                "upper": list(self.domain.upper),
                "t_start": self.domain.t_start,
                "t_end": self.domain.t_end,
                "shape": self.domain.shape,
            },
            "coefficients": self.coefficients(),
        }


def by_slice(node: Node, slices: int) -> Node:
    """(slices * n,) -> (slices, n)."""
    if node.ndim != 1 or node.size % slices:
        raise ShapeError(f"Cannot split a batch of shape {node.shape} into {slices} slices")
    return ops.reshape(node, (slices, node.size // slices))


def check_basis(basis: FourierBasis, dims: int, problem: str):
    if basis.spatial_dims != dims:
        raise ShapeError(f"{problem} needs a {dims}-D Fourier basis, got {basis.spatial_dims}-D modes")


def wavenumber_column(basis: FourierBasis, dim: int = 0) -> np.ndarray:
    """xi_d broadcast over slices, shape (1, K)."""
    return basis.xi[:, dim][None, :]
