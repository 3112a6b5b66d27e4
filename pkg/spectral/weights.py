import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Union

import numpy as np

from common.errors import ContractError, NumericalError
from spectral.symbols import SpectralSymbol

logger = logging.getLogger(__name__)

NORMALIZATION_EPS = 1e-12

Cutoff = Optional[Union[float, Sequence[float]]]


@dataclass(frozen=True)
class SpectralWeight:
    symbol: SpectralSymbol
    normalization: str
    cutoff: Cutoff
    xi: np.ndarray
    values: np.ndarray
    retained: np.ndarray

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values[self.retained])))

    @property
    def retained_count(self) -> int:
        return int(np.count_nonzero(self.retained))

    def scaled(self, factor: float) -> "SpectralWeight":
        return SpectralWeight(
            self.symbol, self.normalization, self.cutoff, self.xi, self.values * factor, self.retained
        )


def retained_modes(xi: np.ndarray, cutoff: Cutoff) -> np.ndarray:
    """Box truncation: keep modes with |xi_d| <= cutoff_d in every component."""
    if cutoff is None:
        return np.ones(xi.shape[0], dtype=bool)
    bounds = np.broadcast_to(np.asarray(cutoff, dtype=np.float64), (xi.shape[1],))
    return np.all(np.abs(xi) <= bounds + 1e-12, axis=1)


def weight_build(
    symbol: SpectralSymbol,
    xi,
    cutoff: Cutoff = None,
    normalization: Literal["linf", "none"] = "linf",
) -> SpectralWeight:
    """W = P / (max over retained |P| + eps), zero outside the cutoff."""
    if hasattr(xi, "xi") and callable(xi.xi):
        xi = xi.xi()
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 1:
        xi = xi[:, None]
    if normalization not in ("linf", "none"):
        raise ContractError(f"Unknown weight normalization '{normalization}'")

    retained = retained_modes(xi, cutoff)
    raw = symbol.evaluate(xi)
    raw = np.where(retained, raw, 0.0)
    peak = float(np.max(np.abs(raw))) if raw.size else 0.0
    if peak == 0.0:
        raise NumericalError(
            f"Spectral weight vanishes on all {int(retained.sum())} retained modes (cutoff={cutoff})"
        )
    values = raw / (peak + NORMALIZATION_EPS) if normalization == "linf" else raw
    logger.debug(f"Built weight on {xi.shape[0]} modes, {int(retained.sum())} retained, peak |P|={peak:.4e}")
    return SpectralWeight(symbol, normalization, cutoff, xi, values, retained)
