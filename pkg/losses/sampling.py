import logging
from typing import Literal, Optional, Tuple

import numpy as np

from common.errors import ContractError
from pdezoo.base import Domain

logger = logging.getLogger(__name__)

FixedMode = Literal["none", "space", "all"]


class CollocationSampler:
    """Uniform collocation points over a (square or triangular) space-time domain.

    ``fixed="all"`` reuses the first interior draw for every step;
    ``fixed="space"`` keeps the first spatial positions and redraws times.
    """

    def __init__(self, domain: Domain, fixed: FixedMode = "none"):
        if fixed not in ("none", "space", "all"):
            raise ContractError(f"Unknown fixed-point mode '{fixed}'")
        self.domain = domain
        self.fixed = fixed
        self._frozen: Optional[np.ndarray] = None

    def _uniform_box(self, rng: np.random.Generator, n: int) -> np.ndarray:
        d = self.domain
        low = np.array(d.lower + (d.t_start,))
        high = np.array(d.upper + (d.t_end,))
        return low + (high - low) * rng.random((n, low.size))

    def _uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.domain.shape == "square":
            return self._uniform_box(rng, n)
        accepted = np.empty((0, self.domain.spatial_dims + 1))
        while accepted.shape[0] < n:
            # the triangle fills three quarters of its bounding box
            batch = self._uniform_box(rng, max(16, int(1.5 * (n - accepted.shape[0]))))
            accepted = np.concatenate([accepted, batch[self.domain.contains(batch)]], axis=0)
        return accepted[:n]

    def interior(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """(n, d + 1) points with columns [x, (y), t]."""
        if n < 1:
            raise ContractError(f"Collocation count must be positive, got {n}")
        if self.fixed == "none":
            return self._uniform(rng, n)
        if self._frozen is None or self._frozen.shape[0] != n:
            self._frozen = self._uniform(rng, n)
            logger.debug(f"Froze {n} collocation points ({self.fixed})")
        if self.fixed == "all":
            return self._frozen.copy()
        points = self._frozen.copy()
        if self.domain.shape == "square":
            points[:, -1] = self.domain.t_start + self.domain.duration * rng.random(n)
            return points
        # triangle: redraw times that keep each frozen position inside the domain
        lo, hi = self.domain.lower[0], self.domain.upper[0]
        center, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        reach = 1.0 - np.abs(points[:, 0] - center) / half
        latest = self.domain.t_start + self.domain.duration * np.clip(2.0 * reach, 0.0, 1.0)
        points[:, -1] = self.domain.t_start + (latest - self.domain.t_start) * rng.random(n)
        return points

    def initial(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """(n, d) spatial points of the initial slice."""
        lo, hi = self.domain.slice_bounds(self.domain.t_start)
        if self.domain.spatial_dims == 1:
            return (lo + (hi - lo) * rng.random(n))[:, None]
        low, high = np.array(self.domain.lower), np.array(self.domain.upper)
        return low + (high - low) * rng.random((n, low.size))

    def times(self, rng: np.random.Generator, n: int, include_start: bool = False) -> np.ndarray:
        """Sorted uniform times in the domain's interval."""
        t = self.domain.t_start + self.domain.duration * rng.random(n)
        if include_start and n:
            t[0] = self.domain.t_start
        return np.sort(t)

    def slice_samples(self, rng: np.random.Generator, times: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Uniform spatial samples per time slice, (M, n, d), and the slice volumes (M,)."""
        times = np.asarray(times, dtype=np.float64)
        d = self.domain.spatial_dims
        if self.domain.shape == "triangle":
            lo, hi = self.domain.slice_bounds(times)
            samples = lo[:, None] + (hi - lo)[:, None] * rng.random((times.size, n))
            return samples[:, :, None], self.domain.slice_volume(times)
        low, high = np.array(self.domain.lower), np.array(self.domain.upper)
        samples = low + (high - low) * rng.random((times.size, n, d))
        return samples, self.domain.slice_volume(times)

    def boundary(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """(n, d + 1) seeds for boundary pairs; each row supplies the free coordinates and the time."""
        return self._uniform_box(rng, n)
