import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from autodiff.tape import Node
from common.errors import ContractError
from jetnet.jets import Jet, JetOrderSpec
from pdezoo.base import Domain, PdeProblem, by_slice, check_basis, wavenumber_column
from spectral.bases import FourierBasis

logger = logging.getLogger(__name__)

NS_FILTER_CUTOFF = 4.0


def default_ns_domain() -> Domain:
    return Domain((-2.0 * np.pi, -2.0 * np.pi), (2.0 * np.pi, 2.0 * np.pi), 0.5, 1.5)


@dataclass(frozen=True)
class NavierStokes(PdeProblem):
    """Vorticity-stream form with network outputs (psi, omega).

    physics:       omega_t + psi_y omega_x - psi_x omega_y - nu lap(omega)
    compatibility: omega + lap(psi)
    """

    domain: Domain = field(default_factory=default_ns_domain)
    nu: float = 0.01

    name = "navier_stokes"
    output_dim = 2

    @property
    def physics_spec(self) -> JetOrderSpec:
        return JetOrderSpec(2, 2, include_time=True, include_mixed=True)

    @property
    def fourier_spec(self) -> JetOrderSpec:
        return JetOrderSpec(2, 0, include_time=True)

    def coefficients(self) -> Dict[str, float]:
        return {"nu": float(self.nu)}

    def initial_condition(self, x):
        if self.reference is None:
            raise ContractError("Navier-Stokes initial data comes from the reference solution; none attached")
        x = np.asarray(x, dtype=np.float64)
        t0 = self.domain.t_start
        stream = self.reference.sample(x, t0, field="stream")
        vorticity = self.reference.sample(x, t0, field="values")
        return np.stack([stream, vorticity], axis=1)

    def physics_residuals(self, jet: Jet):
        psi, w = jet.output(0), jet.output(1)
        advection = ops.sub(ops.mul(psi.u_y, w.u_x), ops.mul(psi.u_x, w.u_y))
        diffusion = ops.scale(ops.add(w.u_xx, w.u_yy), self.nu)
        physics = ops.sub(ops.add(w.u_t, advection), diffusion)
        compatibility = ops.add(w.u, ops.add(psi.u_xx, psi.u_yy))
        return {"physics": physics, "compatibility": compatibility}

    def spectral_residual(self, jet: Jet, basis: FourierBasis, slices: int) -> ComplexPair:
        psi = jet.output(0)
        return ns_mc_residual(by_slice(psi.u, slices), by_slice(psi.u_t, slices), basis, self.nu)


def ns_mc_residual(psi: Node, psi_t: Node, basis: FourierBasis, nu: float) -> ComplexPair:
    """R_hat = omega_dot_hat + F(u omega_x + v omega_y) + nu 4 pi^2 |xi|^2 omega_hat.

    omega_hat = 4 pi^2 |xi|^2 psi_hat; velocities and vorticity gradients are
    reconstructed from the modes with ``basis.synthesize``.
    """
    check_basis(basis, 2, "Navier-Stokes")
    xi_x, xi_y = wavenumber_column(basis, 0), wavenumber_column(basis, 1)
    laplace = 4.0 * np.pi**2 * (xi_x**2 + xi_y**2)

    psi_hat = basis.forward(psi)
    w_hat = psi_hat.scale(laplace)
    w_dot_hat = basis.forward(psi_t).scale(laplace)

    u = basis.synthesize(psi_hat.scale(2j * np.pi * xi_y))
    v = ops.neg(basis.synthesize(psi_hat.scale(2j * np.pi * xi_x)))
    w_x = basis.synthesize(w_hat.scale(2j * np.pi * xi_x))
    w_y = basis.synthesize(w_hat.scale(2j * np.pi * xi_y))
    advection = ops.add(ops.mul(u, w_x), ops.mul(v, w_y))

    return w_dot_hat + basis.forward(advection) + w_hat.scale(nu * laplace)


def ns_initial_spectrum(rng: np.random.Generator, size: int, length: float = 4.0 * np.pi) -> np.ndarray:
    """Hermitian Fourier-series coefficients of the filtered white-noise vorticity.

    Angular wavenumbers kappa = 2 pi k / L; S(kappa) = kappa / (1 + (kappa/4)^4),
    zero beyond |kappa| = 4.
    """
    k = np.fft.fftfreq(size, d=1.0 / size)
    kappa = 2.0 * np.pi * k / length
    kx, ky = np.meshgrid(kappa, kappa, indexing="ij")
    magnitude = np.sqrt(kx**2 + ky**2)
    needed = NS_FILTER_CUTOFF * length / (2.0 * np.pi)
    if size // 2 <= needed:
        raise ContractError(f"Grid of {size} points cannot carry |kappa| <= {NS_FILTER_CUTOFF} on length {length:.4f}")

    spectrum = magnitude / (1.0 + (magnitude / NS_FILTER_CUTOFF) ** 4)
    spectrum = np.where(magnitude <= NS_FILTER_CUTOFF, spectrum, 0.0)
    noise = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    coefficients = noise * spectrum

    mirror = (-np.arange(size)) % size
    coefficients = 0.5 * (coefficients + np.conj(coefficients[np.ix_(mirror, mirror)]))
    return coefficients


def ns_initial_condition(rng: np.random.Generator, size: int, length: float = 4.0 * np.pi) -> np.ndarray:
    """Real vorticity field on a (size, size) periodic mesh, [x][y] indexing."""
    coefficients = ns_initial_spectrum(rng, size, length)
    field_values = size * size * np.fft.ifft2(coefficients)
    leak = float(np.max(np.abs(field_values.imag)))
    logger.debug(f"Initial vorticity imaginary leak {leak:.2e}")
    return field_values.real
