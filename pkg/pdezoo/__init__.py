from pdezoo.allen_cahn import AllenCahn, allen_cahn_spectral_residual
from pdezoo.base import Domain, PdeProblem
from pdezoo.burgers import Burgers, burgers_spectral_residual
from pdezoo.kdv import KdV, kdv_spectral_residual
from pdezoo.manufactured import ManufacturedField, Mode, ScalarField, plane_wave
from pdezoo.navier_stokes import NavierStokes, ns_initial_condition, ns_initial_spectrum, ns_mc_residual
from pdezoo.registry import PROBLEMS, build_problem

__all__ = [
    "AllenCahn",
    "Burgers",
    "Domain",
    "KdV",
    "ManufacturedField",
    "Mode",
    "NavierStokes",
    "PROBLEMS",
    "PdeProblem",
    "ScalarField",
    "allen_cahn_spectral_residual",
    "build_problem",
    "burgers_spectral_residual",
    "kdv_spectral_residual",
    "ns_initial_condition",
    "ns_initial_spectrum",
    "ns_mc_residual",
    "plane_wave",
]
