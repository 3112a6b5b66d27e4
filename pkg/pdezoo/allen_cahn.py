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


def default_allen_cahn_domain() -> Domain:
    return Domain((-1.0,), (1.0,), 0.0, 1.0)


@dataclass(frozen=True)
class AllenCahn(PdeProblem):
    """u_t - alpha u_xx + gamma u^3 - gamma u = 0, u(x, 0) = x^2 cos(pi x)."""

    domain: Domain = field(default_factory=default_allen_cahn_domain)
    alpha: float = 1e-4
    gamma: float = 5.0

    name = "allen_cahn"
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
        return {"alpha": float(self.alpha), "gamma": float(self.gamma)}

    def initial_condition(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1, 1)
        return x**2 * np.cos(np.pi * x)

    def physics_residuals(self, jet: Jet):
        u = jet.output(0)
        reaction = ops.scale(ops.sub(ops.power(u.u, 3), u.u), self.gamma)
        residual = ops.add(ops.sub(u.u_t, ops.scale(u.u_xx, self.alpha)), reaction)
        return {"physics": residual}

    def gradient_residual(self, jet: Jet):
        u = jet.output(0)
        cubic = ops.scale(ops.mul(ops.square(u.u), u.u_x), 3.0 * self.gamma)
        terms = [u.u_xt, ops.scale(u.u_xxx, -self.alpha), cubic, ops.scale(u.u_x, -self.gamma)]
        return ops.total(terms)

    def spectral_residual(self, jet: Jet, basis: FourierBasis, slices: int) -> ComplexPair:
        check_basis(basis, 1, self.name)
        u = jet.output(0)
        field_u = by_slice(u.u, slices)
        u_hat = basis.forward(field_u)
        u_dot_hat = basis.forward(by_slice(u.u_t, slices))
        cube_hat = basis.forward(ops.power(field_u, 3))
        xi = wavenumber_column(basis)
        return allen_cahn_spectral_residual(u_hat, u_dot_hat, cube_hat, xi, self.alpha, self.gamma)


def allen_cahn_spectral_residual(u_hat, u_dot_hat, cube_hat, xi, alpha, gamma=5.0) -> ComplexPair:
    """R_hat = u_dot_hat + 4 pi^2 alpha xi^2 u_hat + gamma (u^3)_hat - gamma u_hat."""
    linear = u_hat.scale(4.0 * np.pi**2 * alpha * xi**2 - gamma)
    return u_dot_hat + linear + cube_hat.scale(gamma)
