"""Stiff linear part and nonlinear right-hand side of each PDE in Fourier space."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from common.errors import ContractError
from pdezoo.allen_cahn import AllenCahn
from pdezoo.base import PdeProblem
from pdezoo.burgers import Burgers
from pdezoo.kdv import KdV
from refsolve.dealias import PaddedProduct

logger = logging.getLogger(__name__)


@dataclass
class SpectralModel:
    """u_hat_t = linear * u_hat + nonlinear(u_hat)."""

    linear: np.ndarray
    nonlinear: Callable[[np.ndarray], np.ndarray]
    max_wavenumber: float


def spectral_model(problem: PdeProblem, size: int, length: float) -> SpectralModel:
    xi = np.fft.fftfreq(size, d=length / size)
    derivative = 2j * np.pi * xi
    k_max = float(np.max(np.abs(2.0 * np.pi * xi)))

    if isinstance(problem, Burgers):
        quadratic = PaddedProduct((size,), 1.5)

        def nonlinear(u_hat):
            return -0.5 * derivative * quadratic.product(u_hat, u_hat)

        return SpectralModel(-problem.nu * (2.0 * np.pi * xi) ** 2, nonlinear, k_max)

    if isinstance(problem, AllenCahn):
        cubic = PaddedProduct((size,), 2.0)
        gamma = problem.gamma

        def nonlinear(u_hat):
            if gamma == 0.0:
                return np.zeros_like(u_hat)
            return gamma * (u_hat - cubic.product(u_hat, u_hat, u_hat))

        return SpectralModel(-problem.alpha * (2.0 * np.pi * xi) ** 2, nonlinear, k_max)

    if isinstance(problem, KdV):
        quadratic = PaddedProduct((size,), 1.5)

        def nonlinear(u_hat):
            return -0.5 * derivative * quadratic.product(u_hat, u_hat)

        return SpectralModel(-problem.delta2 * derivative**3, nonlinear, k_max)

    raise ContractError(f"No 1-D spectral model for '{problem.name}'")
