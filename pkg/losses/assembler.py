import logging
from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple

import numpy as np

from autodiff import ops
from autodiff.tape import Node, Tape
from common.errors import ConfigError
from jetnet.networks import JetNetwork
from losses.boundary import boundary_loss, initial_loss
from losses.fourier import fourier_loss_grid, fourier_loss_mc
from losses.physics import physics_terms
from losses.reduction import QuantileSpec
from losses.sampling import CollocationSampler
from losses.weights import LossWeights
from pdezoo.base import PdeProblem
from spectral.bases import McBasis
from spectral.grids import WavenumberGrid, sample_grid_size
from spectral.symbols import SpectralSymbol
from spectral.weights import SpectralWeight, weight_build

logger = logging.getLogger(__name__)

GROUPS = {
    "physics": ("physics", "compatibility"),
    "boundary": ("initial", "boundary"),
    "fourier": ("fourier",),
}


@dataclass(frozen=True)
class FourierSettings:
    path: Literal["grid", "mc", "off"] = "off"
    symbol: SpectralSymbol = field(default_factory=lambda: SpectralSymbol.derivative_series([1]))
    cutoff: Optional[float] = None
    normalization: Literal["linf", "none"] = "linf"
    grid_size_range: Tuple[int, int] = (32, 64)
    time_slices: int = 8
    mc_samples: int = 64


@dataclass
class LossBatch:
    """Everything random about one loss evaluation."""

    interior: np.ndarray
    initial: np.ndarray
    boundary: np.ndarray
    times: Optional[np.ndarray] = None
    sizes: Optional[Tuple[int, ...]] = None
    samples: Optional[np.ndarray] = None
    volumes: Optional[np.ndarray] = None


@dataclass
class LossReport:
    terms: Dict[str, Node]
    groups: Dict[str, Node]
    weights: LossWeights
    total: Node
    gradient_norms: Dict[str, float] = field(default_factory=dict)
    grid_sizes: Optional[Tuple[int, ...]] = None

    def scalars(self) -> Dict[str, float]:
        values = {name: node.item() for name, node in self.terms.items()}
        values["total"] = self.total.item()
        return values


class LossAssembler:
    """Samples a batch, evaluates each loss term, and combines them with the current weights."""

    def __init__(
        self,
        problem: PdeProblem,
        net: JetNetwork,
        weights: LossWeights,
        quantile: QuantileSpec,
        sampler: CollocationSampler,
        fourier: FourierSettings,
        interior_points: int = 75,
        initial_points: int = 64,
        boundary_points: int = 64,
    ):
        if fourier.path == "grid" and problem.domain.shape != "square":
            raise ConfigError("The grid Fourier path needs a square domain")
        self.problem = problem
        self.net = net
        self.weights = weights
        self.quantile = quantile
        self.sampler = sampler
        self.fourier = fourier
        self.counts = (interior_points, initial_points, boundary_points)
        self._weights_cache: Dict[Tuple[int, ...], SpectralWeight] = {}

    @property
    def fourier_active(self) -> bool:
        return self.fourier.path != "off" and self.weights.fourier > 0

    def spectral_weight(self, sizes: Tuple[int, ...]) -> SpectralWeight:
        if sizes not in self._weights_cache:
            grid = WavenumberGrid(sizes, self.problem.domain.lengths)
            self._weights_cache[sizes] = weight_build(
                self.fourier.symbol, grid, self.fourier.cutoff, self.fourier.normalization
            )
        return self._weights_cache[sizes]

    def draw(self, collocation_rng: np.random.Generator, fourier_rng: np.random.Generator) -> LossBatch:
        n_interior, n_initial, n_boundary = self.counts
        batch = LossBatch(
            interior=self.sampler.interior(collocation_rng, n_interior),
            initial=self.sampler.initial(collocation_rng, n_initial),
            boundary=self.sampler.boundary(collocation_rng, n_boundary),
        )
        if not self.fourier_active:
            return batch
        batch.sizes = sample_grid_size(self.fourier.grid_size_range, fourier_rng, self.problem.spatial_dims)
        batch.times = self.sampler.times(fourier_rng, self.fourier.time_slices)
        if self.fourier.path == "mc":
            batch.samples, batch.volumes = self.sampler.slice_samples(
                fourier_rng, batch.times, self.fourier.mc_samples
            )
        return batch

    def fourier_term(self, bound: Dict[str, Node], batch: LossBatch) -> Node:
        weight = self.spectral_weight(batch.sizes)
        if self.fourier.path == "grid":
            return fourier_loss_grid(self.problem, self.net, bound, batch.sizes, batch.times, weight, self.quantile)
        basis = McBasis(weight.xi, batch.samples, batch.volumes)
        return fourier_loss_mc(self.problem, self.net, bound, basis, batch.times, weight, self.quantile)

    def evaluate(self, bound: Dict[str, Node], batch: LossBatch) -> LossReport:
        problem, net = self.problem, self.net
        jet = net.forward_jet(bound, batch.interior, problem.physics_spec)
        terms = physics_terms(problem, jet)
        terms["initial"] = initial_loss(problem, net, bound, batch.initial)
        terms["boundary"] = boundary_loss(problem, net, bound, batch.boundary)
        if self.fourier_active:
            terms["fourier"] = self.fourier_term(bound, batch)

        groups = {}
        for name, members in GROUPS.items():
            present = [terms[t] for t in members if t in terms]
            if present:
                groups[name] = ops.total(present)
        lambdas = self.weights.as_dict()
        total = ops.total([ops.scale(node, lambdas[name]) for name, node in groups.items()])
        return LossReport(terms, groups, self.weights, total, grid_sizes=batch.sizes)


def group_gradient_norms(tape: Tape, report: LossReport, bound: Dict[str, Node]) -> Dict[str, float]:
    """Euclidean norm of the parameter gradient of each weighted loss group."""
    norms = {}
    for name in report.weights.active():
        node = report.groups.get(name)
        if node is None:
            continue
        grads = tape.gradients(node, bound)
        norms[name] = float(np.sqrt(sum(float(np.sum(g**2)) for g in grads.values())))
    report.gradient_norms = norms
    return norms
