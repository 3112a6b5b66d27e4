import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from common.errors import ContractError, NumericalError
from pdezoo.base import PdeProblem
from refsolve.solution import SolutionGrid, fourier_interpolate, periodic_mesh
from refsolve.solver import solve

logger = logging.getLogger(__name__)


def resample_to_mesh(grid: SolutionGrid, sizes: Sequence[int], snapshots: Optional[int] = None) -> SolutionGrid:
    """Spectrally resample a solution onto another uniform periodic mesh.

    Integer down-sampling factors are taken by striding; other sizes go
    through the trigonometric interpolant. ``snapshots`` keeps that many
    evenly spaced time slices (it must divide the stored count minus one).
    """
    sizes = [int(n) for n in sizes]
    if len(sizes) != grid.spatial_dims:
        raise ContractError(f"Mesh sizes {sizes} do not match a {grid.spatial_dims}-D solution")

    time_index = np.arange(grid.times.size)
    if snapshots is not None and snapshots != grid.times.size:
        if snapshots < 2 or (grid.times.size - 1) % (snapshots - 1) != 0:
            raise ContractError(f"Cannot take {snapshots} evenly spaced slices from {grid.times.size}")
        time_index = time_index[:: (grid.times.size - 1) // (snapshots - 1)]

    current = [a.size for a in grid.axes]
    axes = [periodic_mesh(o, l, n) for o, l, n in zip(grid.origin, grid.lengths, sizes)]

    def convert(data: np.ndarray) -> np.ndarray:
        data = data[time_index]
        if all(c % n == 0 for c, n in zip(current, sizes)):
            strides = tuple(slice(None, None, c // n) for c, n in zip(current, sizes))
            return data[(slice(None),) + strides]
        mesh = np.stack([g.reshape(-1) for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        return np.stack(
            [fourier_interpolate(snapshot, grid.origin, grid.lengths, mesh).reshape(sizes) for snapshot in data]
        )

    extras = {name: convert(values) for name, values in grid.extras.items()}
    metadata = dict(grid.metadata, resampled_from=current)
    return SolutionGrid(axes, grid.lengths, grid.times[time_index], convert(grid.values), metadata, extras)


@dataclass
class GateReport:
    resolution: int
    max_difference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_difference <= self.tolerance


def accuracy_gate(
    problem: PdeProblem,
    resolution: int,
    dt: float,
    tol: float = 1e-5,
    snapshots: int = 11,
    require: bool = False,
) -> GateReport:
    """Compare a solve at ``resolution`` with one at twice the resolution on the coarse mesh."""
    coarse = solve(problem, resolution, dt, snapshots=snapshots)
    fine = solve(problem, 2 * resolution, dt, snapshots=snapshots)
    difference = float(np.max(np.abs(coarse.values - fine.values[:, ::2])))
    report = GateReport(resolution, difference, tol)
    if report.passed:
        logger.info(f"Accuracy gate passed for {problem.name} at N={resolution}: max diff {difference:.3e}")
    else:
        logger.warning(
            f"Accuracy gate failed for {problem.name} at N={resolution}: max diff {difference:.3e} > {tol:.1e}"
        )
        if require:
            raise NumericalError(f"Reference for {problem.name} at N={resolution} is not resolved ({difference:.3e})")
    return report
