import logging
from dataclasses import dataclass, field
from typing import Dict, Literal

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from jetnet.jets import Jet, JetOrderSpec
from pdezoo.base import Domain, PdeProblem, by_slice, check_basis, wavenumber_column
from spectral.bases import FourierBasis

logger = logging.getLogger(__name__)


def default_kdv_domain() -> Domain:
    return Domain((0.0,), (2.0,), 0.0, 1.0)


@dataclass(frozen=True)
class KdV(PdeProblem):
    """u_t + u u_x + delta^2 u_xxx = 0, u(x, 0) = -amplitude cos(pi x).

    ``nonlinear_form`` selects the transform of u u_x ("product") or the
    equivalent pi i xi (u^2)_hat ("square").
    """

    domain: Domain = field(default_factory=default_kdv_domain)
    delta2: float = 0.0025
    amplitude: float = 1.0
    nonlinear_form: Literal["product", "square"] = "product"

    name = "kdv"

    @property
    def physics_spec(self) -> JetOrderSpec:
        return JetOrderSpec(1, 3, include_time=True)

    @property
    def fourier_spec(self) -> JetOrderSpec:
        order = 1 if self.nonlinear_form == "product" else 0
        return JetOrderSpec(1, order, include_time=True)

    def coefficients(self) -> Dict[str, float]:
        return {"delta2": float(self.delta2), "amplitude": float(self.amplitude)}

    def initial_condition(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1, 1)
        return -self.amplitude * np.cos(np.pi * x)

    def physics_residuals(self, jet: Jet):
        u = jet.output(0)
        residual = ops.add(ops.add(u.u_t, ops.mul(u.u, u.u_x)), ops.scale(u.u_xxx, self.delta2))
        return {"physics": residual}

    def spectral_residual(self, jet: Jet, basis: FourierBasis, slices: int) -> ComplexPair:
        check_basis(basis, 1, self.name)
        u = jet.output(0)
        field_u = by_slice(u.u, slices)
        u_hat = basis.forward(field_u)
        u_dot_hat = basis.forward(by_slice(u.u_t, slices))
        xi = wavenumber_column(basis)
        if self.nonlinear_form == "product":
            advection_hat = basis.forward(ops.mul(field_u, by_slice(u.u_x, slices)))
        else:
            advection_hat = basis.forward(ops.square(field_u)).scale(1j * np.pi * xi)
        return kdv_spectral_residual(u_hat, u_dot_hat, advection_hat, xi, self.delta2)


def kdv_spectral_residual(u_hat, u_dot_hat, advection_hat, xi, delta2) -> ComplexPair:
    """R_hat = u_dot_hat + (u u_x)_hat - 8 pi^3 delta^2 i xi^3 u_hat."""
    return u_dot_hat + advection_hat + u_hat.scale(-8j * np.pi**3 * delta2 * xi**3)
