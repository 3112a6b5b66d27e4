"""Pseudo-differential symbols P(xi) built from signed and radial power terms."""

import itertools
import logging
from dataclasses import dataclass
from math import comb
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np

from common.errors import ContractError

logger = logging.getLogger(__name__)

TermKind = Literal["signed", "radial"]


@dataclass(frozen=True)
class SymbolTerm:
    """``coefficient * (2 pi i xi)^order`` (signed) or ``coefficient * |2 pi xi|^order`` (radial).

    A signed term in d > 1 dimensions sums the monomials of every multi-index
    of total ``order`` unless ``multi_index`` pins one.
    """

    coefficient: complex
    order: float
    kind: TermKind = "signed"
    multi_index: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.order < 0:
            raise ContractError(f"Symbol orders must be nonnegative, got {self.order}")
        if self.kind not in ("signed", "radial"):
            raise ContractError(f"Unknown symbol term kind '{self.kind}'")
        if self.kind == "signed" and float(self.order) != int(self.order):
            raise ContractError(f"Fractional order {self.order} needs a radial term, not a signed power")
        if self.multi_index is not None:
            if self.kind != "signed":
                raise ContractError("Multi-indices only apply to signed power terms")
            if sum(self.multi_index) != int(self.order) or min(self.multi_index) < 0:
                raise ContractError(f"Multi-index {self.multi_index} does not have total order {self.order}")

    def evaluate(self, xi: np.ndarray) -> np.ndarray:
        xi = _as_modes(xi)
        if self.kind == "radial":
            radius = 2.0 * np.pi * np.linalg.norm(xi, axis=1)
            return self.coefficient * (radius ** float(self.order)).astype(np.complex128)

        order = int(self.order)
        factors = 2j * np.pi * xi
        if self.multi_index is not None:
            if len(self.multi_index) != xi.shape[1]:
                raise ContractError(f"Multi-index {self.multi_index} does not match {xi.shape[1]}-D modes")
            indices = [self.multi_index]
        else:
            candidates = itertools.product(range(order + 1), repeat=xi.shape[1])
            indices = [alpha for alpha in candidates if sum(alpha) == order]
        values = np.zeros(xi.shape[0], dtype=np.complex128)
        for alpha in indices:
            values += np.prod([factors[:, d] ** alpha[d] for d in range(xi.shape[1])], axis=0)
        return self.coefficient * values

    def to_dict(self) -> dict:
        out = {
            "coefficient": [float(np.real(self.coefficient)), float(np.imag(self.coefficient))],
            "order": float(self.order),
            "kind": self.kind,
        }
        if self.multi_index is not None:
            out["multi_index"] = list(self.multi_index)
        return out


def _as_modes(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 0:
        xi = xi.reshape(1, 1)
    elif xi.ndim == 1:
        xi = xi[:, None]
    return xi


@dataclass(frozen=True)
class SpectralSymbol:
    terms: Tuple[SymbolTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ContractError("A spectral symbol needs at least one term")

    def evaluate(self, xi) -> np.ndarray:
        xi = _as_modes(xi)
        values = np.zeros(xi.shape[0], dtype=np.complex128)
        for term in self.terms:
            values = values + term.evaluate(xi)
        return values

    def scaled(self, factor: complex) -> "SpectralSymbol":
        return SpectralSymbol(
            tuple(SymbolTerm(t.coefficient * factor, t.order, t.kind, t.multi_index) for t in self.terms)
        )

    @property
    def max_order(self) -> float:
        return max(t.order for t in self.terms)

    @classmethod
    def derivative_series(cls, orders: Sequence[int], coefficients: Optional[Sequence[complex]] = None):
        """Sum of a_r (2 pi i xi)^r, e.g. orders (0, 2) gives 1 + (2 pi i xi)^2."""
        coefficients = [1.0] * len(orders) if coefficients is None else list(coefficients)
        if len(coefficients) != len(orders):
            raise ContractError("derivative_series needs one coefficient per order")
        return cls(tuple(SymbolTerm(complex(a), int(r), "signed") for r, a in zip(orders, coefficients)))

    @classmethod
    def fractional_laplacian(cls, s: float, coefficient: complex = 1.0):
        """|2 pi xi|^s, the symbol of (-Laplacian)^(s/2)."""
        return cls((SymbolTerm(complex(coefficient), float(s), "radial"),))

    @classmethod
    def sobolev(cls, m: int):
        """(1 + |2 pi xi|^2)^m expanded binomially."""
        if int(m) != m or m < 0:
            raise ContractError(f"Sobolev order must be a nonnegative integer, got {m}")
        return cls(tuple(SymbolTerm(complex(comb(int(m), j)), 2.0 * j, "radial") for j in range(int(m) + 1)))

    @classmethod
    def from_terms(cls, terms: Iterable[dict]) -> "SpectralSymbol":
        built: List[SymbolTerm] = []
        for raw in terms:
            coefficient = raw.get("coefficient", 1.0)
            if isinstance(coefficient, (list, tuple)):
                coefficient = complex(coefficient[0], coefficient[1])
            multi_index = raw.get("multi_index")
            built.append(
                SymbolTerm(
                    complex(coefficient),
                    float(raw["order"]),
                    raw.get("kind", "signed"),
                    tuple(multi_index) if multi_index is not None else None,
                )
            )
        return cls(tuple(built))

    def to_terms(self) -> List[dict]:
        return [t.to_dict() for t in self.terms]


def symbol_eval(symbol: SpectralSymbol, grid) -> np.ndarray:
    """P(xi) on a WavenumberGrid (or an explicit (K, d) mode array)."""
    xi = grid.xi() if hasattr(grid, "xi") and callable(grid.xi) else grid
    return symbol.evaluate(xi)
