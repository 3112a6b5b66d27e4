import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from jetnet.jets import Jet, JetOrderSpec
from pdezoo.base import Domain, PdeProblem, by_slice, check_basis, wavenumber_column
from spectral.bases import FourierBasis

logger = logging.getLogger(__name__)


def default_burgers_domain(shape: str = "square") -> Domain:
    return Domain((-1.0,), (1.0,), 0.0, 1.0, shape)


@dataclass(frozen=True)
class Burgers(PdeProblem):
    """u_t + u u_x - nu u_xx = 0, u(x, 0) = -sin(pi x)."""

    domain: Domain = field(default_factory=default_burgers_domain)
    nu: float = 0.01 / np.pi

    name = "burgers"
    supports_gradient_enhancement = True

    @property
    def physics_spec(self) -> JetOrderSpec:
        return JetOrderSpec(1, 2, include_time=True)

    @property
    def fourier_spec(self) -> JetOrderSpec:
        return JetOrderSpec(1, 0, include_time=True)

    @property
    def gradient_spec(self) -> JetOrderSpec:
        return JetOrderSpec(1, 3, include_time=True, extra_keys=("xt",))

    def coefficients(self) -> Dict[str, float]:
        return {"nu": float(self.nu)}

    def initial_condition(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1, 1)
        return -np.sin(np.pi * x)

    def physics_residuals(self, jet: Jet):
        u = jet.output(0)
        residual = ops.sub(ops.add(u.u_t, ops.mul(u.u, u.u_x)), ops.scale(u.u_xx, self.nu))
        return {"physics": residual}

    def gradient_residual(self, jet: Jet):
        u = jet.output(0)
        terms = [u.u_xt, ops.square(u.u_x), ops.mul(u.u, u.u_xx), ops.scale(u.u_xxx, -self.nu)]
        return ops.total(terms)

    def spectral_residual(self, jet: Jet, basis: FourierBasis, slices: int) -> ComplexPair:
        check_basis(basis, 1, self.name)
        u = jet.output(0)
        field_u = by_slice(u.u, slices)
        u_hat = basis.forward(field_u)
        u_dot_hat = basis.forward(by_slice(u.u_t, slices))
        square_hat = basis.forward(ops.square(field_u))
        xi = wavenumber_column(basis)
        return burgers_spectral_residual(u_hat, u_dot_hat, square_hat, xi, self.nu)


def burgers_spectral_residual(u_hat, u_dot_hat, square_hat, xi, nu) -> ComplexPair:
    """R_hat = u_dot_hat + pi i xi (u^2)_hat + 4 pi^2 nu xi^2 u_hat."""
    return u_dot_hat + square_hat.scale(1j * np.pi * xi) + u_hat.scale(4.0 * np.pi**2 * nu * xi**2)
