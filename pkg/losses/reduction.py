import logging
import math
from dataclasses import dataclass

import numpy as np

from autodiff import ops
from autodiff.tape import Node
from common.errors import ContractError

logger = logging.getLogger(__name__)

RECOMMENDED_TAU = (0.9, 0.99)


@dataclass(frozen=True)
class QuantileSpec:
    tau: float = 0.925
    enabled: bool = False

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ContractError(f"Quantile level must lie in (0, 1], got {self.tau}")
        low, high = RECOMMENDED_TAU
        if self.enabled and not low <= self.tau <= high:
            logger.warning(f"Quantile level {self.tau} is outside the recommended range [{low}, {high}]")


def quantile_index(n: int, tau: float) -> int:
    """Position of the lower empirical tau-quantile in a sorted batch of n values."""
    return max(0, math.ceil(tau * n - 1e-12) - 1)


def quantile_reduce(values: Node, tau: float) -> Node:
    """Empirical tau-quantile of a batch; the adjoint reaches only the selected element."""
    if values.size == 0:
        raise ContractError("Cannot take a quantile of an empty batch")
    if not 0.0 < tau <= 1.0:
        raise ContractError(f"Quantile level must lie in (0, 1], got {tau}")
    flat = ops.reshape(values, (values.size,))
    order = np.argsort(flat.value, kind="stable")
    return ops.getitem(flat, int(order[quantile_index(values.size, tau)]))


def mean_square(values: Node) -> Node:
    if values.size == 0:
        raise ContractError("Cannot reduce an empty batch")
    return ops.mean(ops.square(values))


def reduce_magnitudes(squared: Node, quantile: QuantileSpec) -> Node:
    """Mean or tau-quantile of a batch of squared magnitudes."""
    if squared.size == 0:
        raise ContractError("Cannot reduce an empty batch")
    if quantile.enabled:
        return quantile_reduce(squared, quantile.tau)
    return ops.mean(squared)
