import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from common.errors import ContractError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WavenumberGrid:
    """Signed DFT wavenumbers xi = k / L of a uniform periodic mesh."""

    sizes: Tuple[int, ...]
    lengths: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "lengths", tuple(float(l) for l in self.lengths))
        if len(self.sizes) != len(self.lengths) or not self.sizes:
            raise ContractError(f"Grid sizes {self.sizes} and lengths {self.lengths} must be nonempty and paired")
        if any(n < 1 for n in self.sizes):
            raise ContractError(f"Empty grid dimension in {self.sizes}")
        if any(l <= 0 for l in self.lengths):
            raise ContractError(f"Domain lengths must be positive, got {self.lengths}")

    @property
    def ndim(self) -> int:
        return len(self.sizes)

    @property
    def count(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def modes(self, dim: int = 0) -> np.ndarray:
        n, length = self.sizes[dim], self.lengths[dim]
        return np.fft.fftfreq(n, d=length / n)

    def xi(self) -> np.ndarray:
        """(K, d) wavenumbers, flattened row-major over the mesh axes."""
        axes = np.meshgrid(*[self.modes(d) for d in range(self.ndim)], indexing="ij")
        return np.stack([a.reshape(-1) for a in axes], axis=1)

    def points(self, origin: Sequence[float]) -> np.ndarray:
        """(K, d) mesh points x = origin + j * L / N in the same flattened order."""
        coords = [origin[d] + np.arange(n) * self.lengths[d] / n for d, n in enumerate(self.sizes)]
        axes = np.meshgrid(*coords, indexing="ij")
        return np.stack([a.reshape(-1) for a in axes], axis=1)


def sample_grid_size(size_range: Tuple[int, int], rng: np.random.Generator, dims: int = 1) -> Tuple[int, ...]:
    """Uniform integer draw per dimension from the inclusive ``size_range``."""
    low, high = int(size_range[0]), int(size_range[1])
    if high < low:
        raise ContractError(f"Empty grid-size range ({low}, {high})")
    if low < 2:
        raise ContractError(f"Transformed grids need at least 2 points, range starts at {low}")
    sizes = tuple(int(n) for n in rng.integers(low, high + 1, size=dims))
    logger.debug(f"Drew grid sizes {sizes} from [{low}, {high}]")
    return sizes
