import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from analysis.metrics import relative_l2
from experiments.settings import ExperimentConfig
from pdezoo.base import PdeProblem
from pdezoo.navier_stokes import NavierStokes, ns_initial_condition
from refsolve.gate import accuracy_gate, resample_to_mesh
from refsolve.navier_stokes import ns_solve
from refsolve.solution import SolutionGrid
from refsolve.solver import solve
from refsolve.storage import ReferenceCache

logger = logging.getLogger(__name__)


def solve_reference(
    config: ExperimentConfig, problem: PdeProblem, rng: np.random.Generator, use_cache: Optional[bool] = None
) -> SolutionGrid:
    """Reference solution at the configured resolution over the problem's time window."""
    settings = config.reference
    snapshots = config.evaluation.time_points
    domain = problem.domain
    use_cache = settings.use_cache if use_cache is None else use_cache

    if isinstance(problem, NavierStokes):
        length = domain.lengths[0]
        w0 = ns_initial_condition(rng, settings.resolution, length)
        seed = config.seed

        def solve_fn():
            return ns_solve(
                w0,
                problem.nu,
                settings.resolution,
                settings.dt,
                (domain.t_start, domain.t_end),
                snapshots,
                length,
                domain.lower[0],
                seed=seed,
            )
    else:
        if settings.gate:
            accuracy_gate(problem, settings.resolution // 2, settings.dt, require=True)
        seed = None

        def solve_fn():
            return solve(problem, settings.resolution, settings.dt, snapshots=snapshots)

    if not use_cache:
        return solve_fn()
    payload = {
        "problem": problem.describe(),
        "resolution": settings.resolution,
        "dt": settings.dt,
        "snapshots": snapshots,
        "seed": seed,
    }
    return ReferenceCache().get_or_solve(payload, solve_fn)


@dataclass
class Evaluator:
    """Relative L2 error of the network against the reference on the evaluation mesh."""

    problem: PdeProblem
    mesh: SolutionGrid

    def __post_init__(self):
        self.points = self.mesh.space_time_points()
        self.mask = self.problem.domain.contains(self.points).reshape(self.mesh.values.shape)
        # the last network output carries the field the reference stores (omega for Navier-Stokes)
        self.output_index = self.problem.output_dim - 1

    def predict(self, net) -> np.ndarray:
        values = net.predict(self.points)[:, self.output_index]
        return values.reshape(self.mesh.values.shape)

    def relative_l2(self, net) -> float:
        prediction = self.predict(net)
        return relative_l2(self.mesh.values[self.mask], prediction[self.mask])

    def prediction_grid(self, net) -> SolutionGrid:
        metadata = dict(self.mesh.metadata, source="network")
        return SolutionGrid(self.mesh.axes, self.mesh.lengths, self.mesh.times, self.predict(net), metadata)


def evaluation_mesh(config: ExperimentConfig, reference: SolutionGrid) -> SolutionGrid:
    sizes = [config.evaluation.space_points] * reference.spatial_dims
    return resample_to_mesh(reference, sizes)
