from spectral.bases import FourierBasis, GridBasis, McBasis
from spectral.grids import WavenumberGrid, sample_grid_size
from spectral.symbols import SpectralSymbol, SymbolTerm, symbol_eval
from spectral.transforms import (
    DftOperator,
    InverseDftOperator,
    McProjection,
    dft_forward,
    inverse_dft,
    mc_project,
    mc_synthesize,
    naive_dft,
)
from spectral.weights import SpectralWeight, weight_build

__all__ = [
    "DftOperator",
    "FourierBasis",
    "GridBasis",
    "InverseDftOperator",
    "McBasis",
    "McProjection",
    "SpectralSymbol",
    "SpectralWeight",
    "SymbolTerm",
    "WavenumberGrid",
    "dft_forward",
    "inverse_dft",
    "mc_project",
    "mc_synthesize",
    "naive_dft",
    "sample_grid_size",
    "symbol_eval",
    "weight_build",
]
