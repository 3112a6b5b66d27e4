import logging
from dataclasses import dataclass

import numpy as np

from common.errors import ShapeError
from jetnet.jets import Components, JetOrderSpec, constant_jet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FourierFeatureMap:
    """Frozen random Fourier features [sin(2 pi p B^T), cos(2 pi p B^T)]."""

    B: np.ndarray
    sigma: float
    omit_two_pi: bool = False

    @classmethod
    def sample(cls, rng: np.random.Generator, num_features: int, input_dim: int, sigma: float, omit_two_pi=False):
        B = rng.normal(0.0, 1.0, size=(num_features, input_dim)) * sigma
        B.setflags(write=False)
        logger.debug(f"Sampled Fourier feature matrix {B.shape} with sigma={sigma}")
        return cls(B, float(sigma), omit_two_pi)

    @property
    def output_dim(self) -> int:
        return 2 * self.B.shape[0]

    @property
    def frequency_scale(self) -> float:
        return 1.0 if self.omit_two_pi else 2.0 * np.pi

    def _phase(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.B.shape[1]:
            raise ShapeError(f"Points of shape {points.shape} do not match feature matrix {self.B.shape}")
        return self.frequency_scale * points @ self.B.T

    def features(self, points: np.ndarray) -> np.ndarray:
        theta = self._phase(points)
        return np.concatenate([np.sin(theta), np.cos(theta)], axis=1)

    def feature_jets(self, points: np.ndarray, spec: JetOrderSpec) -> dict:
        """Exact derivatives of the features, keyed like jet components.

        d^k/dp sin(theta) = sin(theta + k pi/2) times the chain factors
        (scale * B[:, v]) of each differentiated variable v.
        """
        theta = self._phase(points)
        jets = {}
        for key in spec.keys():
            chain = np.ones(self.B.shape[0])
            for var in key:
                chain = chain * self.frequency_scale * self.B[:, spec.column(var)]
            shift = len(key) * np.pi / 2.0
            jets[key] = np.concatenate([np.sin(theta + shift) * chain, np.cos(theta + shift) * chain], axis=1)
        return jets


def embed(tape, points: np.ndarray, feature_map: FourierFeatureMap, spec: JetOrderSpec) -> Components:
    """Feature batch with its input-derivative jet, recorded as tape constants."""
    return constant_jet(tape, feature_map.feature_jets(points, spec), spec)
