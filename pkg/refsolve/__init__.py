from refsolve.dealias import PaddedProduct
from refsolve.gate import GateReport, accuracy_gate, resample_to_mesh
from refsolve.models import SpectralModel, spectral_model
from refsolve.navier_stokes import VorticityModel, ns_solve
from refsolve.solution import SolutionGrid, fourier_interpolate, periodic_mesh
from refsolve.solver import INTEGRATORS, IntegratingFactorRK4, advance, check_blowup, solve
from refsolve.storage import ReferenceCache, cache_key, export_csv, load_solution, save_solution

__all__ = [
    "GateReport",
    "INTEGRATORS",
    "IntegratingFactorRK4",
    "PaddedProduct",
    "ReferenceCache",
    "SolutionGrid",
    "SpectralModel",
    "VorticityModel",
    "accuracy_gate",
    "advance",
    "cache_key",
    "check_blowup",
    "export_csv",
    "fourier_interpolate",
    "load_solution",
    "ns_solve",
    "periodic_mesh",
    "resample_to_mesh",
    "save_solution",
    "solve",
    "spectral_model",
]
