import logging
from typing import Dict

from autodiff.tape import Node
from jetnet.jets import Jet
from losses.reduction import mean_square
from pdezoo.base import PdeProblem

logger = logging.getLogger(__name__)


def physics_terms(problem: PdeProblem, jet: Jet) -> Dict[str, Node]:
    """Mean-square of every pointwise residual the problem defines ("physics", "compatibility")."""
    return {name: mean_square(residual) for name, residual in problem.physics_residuals(jet).items()}


def physics_loss(problem: PdeProblem, jet: Jet) -> Node:
    return mean_square(problem.physics_residuals(jet)["physics"])


def gradient_enhanced_loss(problem: PdeProblem, jet: Jet) -> Node:
    """Mean-square of the x-derivative of the residual, computed from jets in physical space."""
    return mean_square(problem.gradient_residual(jet))
