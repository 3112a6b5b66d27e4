import logging
from typing import Callable, Optional

import numpy as np

from common.errors import ContractError, SolverBlowUpError
from config import SOLVER_BLOWUP_THRESHOLD
from pdezoo.base import PdeProblem
from refsolve.models import spectral_model
from refsolve.solution import SolutionGrid, periodic_mesh

logger = logging.getLogger(__name__)

INTEGRATORS = ("ifrk4",)


class IntegratingFactorRK4:
    """Classical RK4 on v = exp(-L t) u_hat, written for a diagonal L."""

    def __init__(self, linear: np.ndarray, nonlinear: Callable[[np.ndarray], np.ndarray], dt: float):
        self.nonlinear = nonlinear
        self.dt = dt
        self.half = np.exp(0.5 * dt * linear)
        self.full = self.half * self.half

    def step(self, u_hat: np.ndarray) -> np.ndarray:
        dt, E, E2, N = self.dt, self.half, self.full, self.nonlinear
        a = dt * N(u_hat)
        b = dt * N(E * (u_hat + 0.5 * a))
        c = dt * N(E * u_hat + 0.5 * b)
        d = dt * N(E2 * u_hat + E * c)
        return E2 * u_hat + (E2 * a + 2.0 * E * (b + c) + d) / 6.0


def check_blowup(values: np.ndarray, t: float, threshold: float = SOLVER_BLOWUP_THRESHOLD):
    peak = float(np.max(np.abs(values)))
    if not np.isfinite(peak) or peak > threshold:
        raise SolverBlowUpError(f"Solution blew up at t={t:.6f}: max|u|={peak:.3e} exceeds {threshold:.1e}")


def advance(
    u_hat: np.ndarray,
    linear: np.ndarray,
    nonlinear: Callable,
    t_from: float,
    t_to: float,
    dt: float,
    to_physical: Callable[[np.ndarray], np.ndarray],
    threshold: float = SOLVER_BLOWUP_THRESHOLD,
) -> np.ndarray:
    """Integrate from ``t_from`` to ``t_to`` in equal steps no longer than ``dt``."""
    span = t_to - t_from
    if span <= 0:
        return u_hat
    steps = int(np.ceil(span / dt - 1e-9))
    stepper = IntegratingFactorRK4(linear, nonlinear, span / steps)
    for i in range(steps):
        u_hat = stepper.step(u_hat)
        check_blowup(to_physical(u_hat), t_from + (i + 1) * stepper.dt, threshold)
    return u_hat


def solve(
    problem: PdeProblem,
    resolution: int,
    dt: float,
    integrator: str = "ifrk4",
    snapshots: int = 101,
    initial: Optional[np.ndarray] = None,
    seed: Optional[int] = None,
) -> SolutionGrid:
    """Pseudo-spectral reference solution of a 1-D periodic problem."""
    if integrator not in INTEGRATORS:
        raise ContractError(f"Unknown integrator '{integrator}'. Available: {INTEGRATORS}")
    if problem.spatial_dims != 1:
        raise ContractError(f"solve() handles 1-D problems; use ns_solve for {problem.name}")
    if resolution < 4 or snapshots < 1 or dt <= 0:
        raise ContractError(f"Invalid solver settings: resolution={resolution}, snapshots={snapshots}, dt={dt}")

    domain = problem.domain
    length = domain.lengths[0]
    x = periodic_mesh(domain.lower[0], length, resolution)
    u0 = problem.initial_condition(x[:, None])[:, 0] if initial is None else np.asarray(initial, dtype=np.float64)
    if u0.shape != (resolution,):
        raise ContractError(f"Initial data has shape {u0.shape}, expected ({resolution},)")

    model = spectral_model(problem, resolution, length)
    advective_dt = 1.0 / (max(float(np.max(np.abs(u0))), 1e-12) * model.max_wavenumber)
    if dt > advective_dt:
        logger.warning(
            f"dt={dt:.2e} exceeds the advective CFL estimate {advective_dt:.2e} for {problem.name}; results may be inaccurate"
        )

    times = np.linspace(domain.t_start, domain.t_end, snapshots) if snapshots > 1 else np.array([domain.t_start])
    values = np.empty((times.size, resolution))
    u_hat = np.fft.fft(u0)
    values[0] = u0

    def to_physical(spectrum):
        return np.real(np.fft.ifft(spectrum))

    logger.info(f"Solving {problem.name}: N={resolution}, dt={dt:.2e}, {times.size} snapshots on [{times[0]}, {times[-1]}]")
    for i in range(1, times.size):
        u_hat = advance(u_hat, model.linear, model.nonlinear, times[i - 1], times[i], dt, to_physical)
        values[i] = to_physical(u_hat)
        if i % max(1, (times.size - 1) // 10) == 0:
            logger.debug(f"{problem.name} reached t={times[i]:.4f}, max|u|={np.max(np.abs(values[i])):.4e}")

    metadata = {
        "pde": problem.name,
        "coefficients": problem.coefficients(),
        "resolution": [resolution],
        "dt": dt,
        "integrator": integrator,
        "seed": seed,
    }
    return SolutionGrid([x], [length], times, values, metadata)
