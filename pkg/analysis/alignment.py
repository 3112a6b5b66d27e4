import logging
from typing import Dict, Sequence

import numpy as np

from autodiff.tape import Tape
from jetnet.networks import JetNetwork, parameter_vector
from losses.fourier import fourier_loss
from losses.physics import gradient_enhanced_loss
from losses.reduction import QuantileSpec
from pdezoo.base import PdeProblem
from spectral.bases import FourierBasis
from spectral.weights import SpectralWeight

logger = logging.getLogger(__name__)


def _loss_gradient(net: JetNetwork, build) -> np.ndarray:
    tape = Tape()
    bound = net.bind(tape)
    grads: Dict[str, np.ndarray] = tape.gradients(build(bound), bound)
    return parameter_vector(grads)


def gradient_alignment(
    problem: PdeProblem,
    net: JetNetwork,
    basis: FourierBasis,
    times: Sequence[float],
    weight: SpectralWeight,
    points: np.ndarray,
) -> float:
    """Cosine between the parameter gradients of the Fourier-enhanced term and of the
    physical-space gradient-enhanced term."""
    fourier = _loss_gradient(
        net, lambda bound: fourier_loss(problem, net, bound, basis, times, weight, QuantileSpec(enabled=False))
    )
    physical = _loss_gradient(
        net, lambda bound: gradient_enhanced_loss(problem, net.forward_jet(bound, points, problem.gradient_spec))
    )
    denominator = float(np.linalg.norm(fourier) * np.linalg.norm(physical))
    if denominator == 0.0:
        return 0.0
    cosine = float(np.dot(fourier, physical) / denominator)
    logger.debug(f"Gradient alignment cosine {cosine:.6f}")
    return cosine
