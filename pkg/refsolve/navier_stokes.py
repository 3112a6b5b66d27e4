import logging
from typing import Optional, Tuple

import numpy as np

from common.errors import ContractError
from refsolve.dealias import PaddedProduct
from refsolve.solution import SolutionGrid, periodic_mesh
from refsolve.solver import advance

logger = logging.getLogger(__name__)


class VorticityModel:
    """omega_t + u . grad(omega) = nu lap(omega), psi_hat = omega_hat / (4 pi^2 |xi|^2)."""

    def __init__(self, size: int, length: float, nu: float, advection: bool = True):
        xi = np.fft.fftfreq(size, d=length / size)
        self.xi_x, self.xi_y = np.meshgrid(xi, xi, indexing="ij")
        self.laplace = 4.0 * np.pi**2 * (self.xi_x**2 + self.xi_y**2)
        self.inverse_laplace = np.where(self.laplace > 0, 1.0 / np.where(self.laplace > 0, self.laplace, 1.0), 0.0)
        self.linear = -nu * self.laplace
        self.advection = advection
        self.padding = PaddedProduct((size, size), 1.5)

    def stream(self, w_hat: np.ndarray) -> np.ndarray:
        return w_hat * self.inverse_laplace

    def nonlinear(self, w_hat: np.ndarray) -> np.ndarray:
        if not self.advection:
            return np.zeros_like(w_hat)
        psi_hat = self.stream(w_hat)
        u_hat = 2j * np.pi * self.xi_y * psi_hat
        v_hat = -2j * np.pi * self.xi_x * psi_hat
        wx_hat = 2j * np.pi * self.xi_x * w_hat
        wy_hat = 2j * np.pi * self.xi_y * w_hat
        p = self.padding
        advection = p.to_physical(u_hat) * p.to_physical(wx_hat) + p.to_physical(v_hat) * p.to_physical(wy_hat)
        return -p.to_spectral(advection)


def ns_solve(
    w0: np.ndarray,
    nu: float,
    resolution: int,
    dt: float,
    t_window: Tuple[float, float] = (0.5, 1.5),
    snapshots: int = 11,
    length: float = 4.0 * np.pi,
    origin: float = -2.0 * np.pi,
    advection: bool = True,
    seed: Optional[int] = None,
) -> SolutionGrid:
    """2-D pseudo-spectral vorticity solver from t=0; returns slices over ``t_window``."""
    w0 = np.asarray(w0, dtype=np.float64)
    if w0.shape != (resolution, resolution):
        raise ContractError(f"Initial vorticity has shape {w0.shape}, expected {(resolution, resolution)}")
    t_start, t_end = t_window
    if t_start < 0 or t_end < t_start:
        raise ContractError(f"Invalid time window {t_window}")

    model = VorticityModel(resolution, length, nu, advection)

    def to_physical(spectrum):
        return np.real(np.fft.ifft2(spectrum))

    times = np.linspace(t_start, t_end, snapshots) if snapshots > 1 else np.array([t_start])
    vorticity = np.empty((times.size, resolution, resolution))
    stream = np.empty_like(vorticity)

    logger.info(
        f"Solving Navier-Stokes: N={resolution}^2, nu={nu}, dt={dt:.2e}, window={t_window}, advection={advection}"
    )
    w_hat = np.fft.fft2(w0)
    t = 0.0
    for i, target in enumerate(times):
        w_hat = advance(w_hat, model.linear, model.nonlinear, t, target, dt, to_physical)
        t = target
        vorticity[i] = to_physical(w_hat)
        stream[i] = to_physical(model.stream(w_hat))
        logger.debug(f"Navier-Stokes reached t={t:.4f}, enstrophy={np.mean(vorticity[i] ** 2):.6e}")

    axis = periodic_mesh(origin, length, resolution)
    metadata = {
        "pde": "navier_stokes",
        "coefficients": {"nu": nu},
        "resolution": [resolution, resolution],
        "dt": dt,
        "integrator": "ifrk4",
        "advection": advection,
        "seed": seed,
    }
    return SolutionGrid([axis, axis], [length, length], times, vorticity, metadata, {"stream": stream})
