import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np

from autodiff.complex import ComplexPair
from autodiff.tape import Node, Tape
from common.errors import ParameterBudgetError, ShapeError
from config import NTK_PARAMETER_BUDGET
from jetnet.networks import JetNetwork
from pdezoo.base import PdeProblem
from spectral.bases import FourierBasis
from spectral.weights import SpectralWeight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NtkProbeResult:
    modes: np.ndarray
    omega: np.ndarray
    kernel: np.ndarray
    eigenvalues: np.ndarray
    weighted_kernel: np.ndarray
    weighted_eigenvalues: np.ndarray


def residual_jacobian(tape: Tape, residual: ComplexPair, bound: Dict[str, Node]) -> np.ndarray:
    """d R_hat_j / d theta as a complex (entries, parameters) matrix, one reverse sweep per real part."""
    names = list(bound)
    re = residual.re.value.reshape(-1)
    rows = np.zeros((re.size, sum(bound[n].size for n in names)), dtype=np.complex128)

    def sweep(root: Node, j: int) -> np.ndarray:
        seed = np.zeros(root.size)
        seed[j] = 1.0
        adjoints = tape.backward(root, seed.reshape(root.shape))
        return np.concatenate(
            [adjoints.get(bound[n].id, np.zeros_like(bound[n].value)).reshape(-1) for n in names]
        )

    for j in range(re.size):
        rows[j] = sweep(residual.re, j) + 1j * sweep(residual.im, j)
    return rows


def spectral_residual_on(
    problem: PdeProblem, net: JetNetwork, bound: Dict[str, Node], basis: FourierBasis, times: Sequence[float]
) -> ComplexPair:
    times = np.asarray(times, dtype=np.float64)
    jet = net.forward_jet(bound, basis.space_time_points(times), problem.fourier_spec)
    return problem.spectral_residual(jet, basis, times.size)


def _descending_eigenvalues(kernel: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(kernel)[::-1]


def ntk_probe(
    net: JetNetwork,
    problem: PdeProblem,
    basis: FourierBasis,
    times: Sequence[float],
    omega: Optional[Union[np.ndarray, SpectralWeight]] = None,
    budget: int = NTK_PARAMETER_BUDGET,
) -> NtkProbeResult:
    """Kernel K(xi, xi') = <grad R_hat(xi), grad R_hat(xi')> of the Fourier residual, and the
    kernel of omega(xi) R_hat(xi), at the network's current parameters.

    Entries run over time slices and modes, slice-major.
    """
    if net.parameter_count > budget:
        raise ParameterBudgetError(
            f"NTK probe assembles an explicit Jacobian; {net.parameter_count} parameters exceed the budget of {budget}"
        )
    if isinstance(omega, SpectralWeight):
        omega = omega.values
    omega = np.ones(basis.mode_count) if omega is None else np.asarray(omega, dtype=np.complex128)
    if omega.shape != (basis.mode_count,):
        raise ShapeError(f"Weight has shape {omega.shape}, basis has {basis.mode_count} modes")

    tape = Tape()
    bound = net.bind(tape)
    residual = spectral_residual_on(problem, net, bound, basis, times)
    jacobian = residual_jacobian(tape, residual, bound)
    kernel = jacobian @ jacobian.conj().T

    tape = Tape()
    bound = net.bind(tape)
    weighted = spectral_residual_on(problem, net, bound, basis, times).scale(omega[None, :])
    weighted_jacobian = residual_jacobian(tape, weighted, bound)
    weighted_kernel = weighted_jacobian @ weighted_jacobian.conj().T

    eigenvalues = _descending_eigenvalues(kernel)
    logger.info(
        f"NTK probe on {kernel.shape[0]} entries, {net.parameter_count} parameters: "
        f"lambda_max={eigenvalues[0]:.4e}, lambda_min={eigenvalues[-1]:.4e}"
    )
    modes = np.tile(basis.xi, (len(times), 1))
    return NtkProbeResult(
        modes,
        np.tile(omega, len(times)),
        kernel,
        eigenvalues,
        weighted_kernel,
        _descending_eigenvalues(weighted_kernel),
    )
