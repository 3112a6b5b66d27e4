from losses.assembler import GROUPS, FourierSettings, LossAssembler, LossBatch, LossReport, group_gradient_norms
from losses.boundary import boundary_initial_loss, boundary_loss, initial_loss, periodic_pairs
from losses.fourier import (
    fourier_loss,
    fourier_loss_grid,
    fourier_loss_mc,
    grid_basis,
    weighted_residual_magnitudes,
)
from losses.physics import gradient_enhanced_loss, physics_loss, physics_terms
from losses.reduction import QuantileSpec, mean_square, quantile_index, quantile_reduce, reduce_magnitudes
from losses.sampling import CollocationSampler
from losses.weights import LossWeights, grad_norm_tune

__all__ = [
    "GROUPS",
    "CollocationSampler",
    "FourierSettings",
    "LossAssembler",
    "LossBatch",
    "LossReport",
    "LossWeights",
    "QuantileSpec",
    "boundary_initial_loss",
    "boundary_loss",
    "fourier_loss",
    "fourier_loss_grid",
    "fourier_loss_mc",
    "grad_norm_tune",
    "gradient_enhanced_loss",
    "grid_basis",
    "group_gradient_norms",
    "initial_loss",
    "mean_square",
    "periodic_pairs",
    "physics_loss",
    "physics_terms",
    "quantile_index",
    "quantile_reduce",
    "reduce_magnitudes",
    "weighted_residual_magnitudes",
]
