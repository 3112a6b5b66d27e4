"""Fourier-space residual losses on a uniform mesh or on Monte-Carlo samples."""

import logging
from typing import Dict, Sequence

import numpy as np

from autodiff.tape import Node
from common.errors import ConfigError, ShapeError
from jetnet.networks import JetNetwork
from losses.reduction import QuantileSpec, reduce_magnitudes
from pdezoo.base import PdeProblem
from spectral.bases import FourierBasis, GridBasis, McBasis
from spectral.grids import WavenumberGrid
from spectral.weights import SpectralWeight

logger = logging.getLogger(__name__)


def _check_weight(weight: SpectralWeight, basis: FourierBasis):
    if weight.xi.shape != basis.xi.shape or not np.allclose(weight.xi, basis.xi):
        raise ShapeError(
            f"Spectral weight is built on {weight.xi.shape[0]} modes that do not match the basis' "
            f"{basis.xi.shape[0]} modes"
        )


def weighted_residual_magnitudes(
    problem: PdeProblem,
    net: JetNetwork,
    bound: Dict[str, Node],
    basis: FourierBasis,
    times: Sequence[float],
    weight: SpectralWeight,
) -> Node:
    """|W(xi) R_hat(xi, t)|^2 over retained modes, shape (slices, K_retained)."""
    _check_weight(weight, basis)
    times = np.asarray(times, dtype=np.float64)
    points = basis.space_time_points(times)
    jet = net.forward_jet(bound, points, problem.fourier_spec)
    residual = problem.spectral_residual(jet, basis, times.size)
    weighted = residual.scale(weight.values[None, :])
    kept = np.flatnonzero(weight.retained)
    if kept.size < weight.retained.size:
        weighted = weighted.take(kept, axis=-1)
    return weighted.abs2()


def fourier_loss(
    problem: PdeProblem,
    net: JetNetwork,
    bound: Dict[str, Node],
    basis: FourierBasis,
    times: Sequence[float],
    weight: SpectralWeight,
    quantile: QuantileSpec,
) -> Node:
    magnitudes = weighted_residual_magnitudes(problem, net, bound, basis, times, weight)
    return reduce_magnitudes(magnitudes, quantile)


def grid_basis(problem: PdeProblem, sizes: Sequence[int]) -> GridBasis:
    domain = problem.domain
    if domain.shape != "square":
        raise ConfigError("The grid Fourier loss needs a square domain; use the Monte-Carlo path")
    return GridBasis(WavenumberGrid(tuple(sizes), domain.lengths), domain.lower)


def fourier_loss_grid(
    problem: PdeProblem,
    net: JetNetwork,
    bound: Dict[str, Node],
    sizes: Sequence[int],
    times: Sequence[float],
    weight: SpectralWeight,
    quantile: QuantileSpec,
) -> Node:
    """Network on the full periodic space mesh at each time; DFT per slice."""
    basis = grid_basis(problem, sizes)
    return fourier_loss(problem, net, bound, basis, times, weight, quantile)


def fourier_loss_mc(
    problem: PdeProblem,
    net: JetNetwork,
    bound: Dict[str, Node],
    basis: McBasis,
    times: Sequence[float],
    weight: SpectralWeight,
    quantile: QuantileSpec,
) -> Node:
    """Network on per-slice random samples; quadrature (|Omega|/N) Phi per slice."""
    if basis.samples.shape[0] != len(times):
        raise ShapeError(f"Basis carries {basis.samples.shape[0]} sample sets for {len(times)} time slices")
    return fourier_loss(problem, net, bound, basis, times, weight, quantile)
