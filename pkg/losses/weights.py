import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, Literal, Optional

from common.errors import ContractError, NumericalError

logger = logging.getLogger(__name__)

TERMS = ("physics", "boundary", "fourier")


@dataclass(frozen=True)
class LossWeights:
    physics: float = 1.0
    boundary: float = 1.0
    fourier: float = 0.0
    mode: Literal["fixed", "grad_norm"] = "fixed"
    alpha_ema: float = 0.9

    def __post_init__(self):
        values = self.as_dict()
        if any(v < 0 or not math.isfinite(v) for v in values.values()):
            raise ContractError(f"Loss weights must be finite and nonnegative, got {values}")
        if not any(v > 0 for v in values.values()):
            raise ContractError("At least one loss weight must be positive")
        if self.mode not in ("fixed", "grad_norm"):
            raise ContractError(f"Unknown weighting mode '{self.mode}'")
        if not 0.0 <= self.alpha_ema <= 1.0:
            raise ContractError(f"alpha_ema must lie in [0, 1], got {self.alpha_ema}")

    def as_dict(self) -> Dict[str, float]:
        return {name: float(getattr(self, name)) for name in TERMS}

    def active(self) -> Dict[str, float]:
        return {name: value for name, value in self.as_dict().items() if value > 0}


def grad_norm_tune(norms: Dict[str, float], previous: LossWeights, alpha_ema: Optional[float] = None) -> LossWeights:
    """lambda_hat_i = sum_k |grad L_k| / |grad L_i|, blended as alpha * new + (1 - alpha) * old.

    Terms whose gradient norm is zero keep their previous weight.
    """
    alpha = previous.alpha_ema if alpha_ema is None else alpha_ema
    if not norms:
        raise ContractError("No gradient norms to tune against")
    unknown = set(norms) - set(TERMS)
    if unknown:
        raise ContractError(f"Unknown loss terms {sorted(unknown)}")
    if any(not math.isfinite(v) or v < 0 for v in norms.values()):
        raise NumericalError(f"Gradient norms must be finite and nonnegative, got {norms}")
    total = sum(norms.values())
    if total <= 0:
        raise NumericalError("All gradient norms vanish; cannot rebalance loss weights")

    updated = {}
    for name, norm in norms.items():
        old = getattr(previous, name)
        if norm == 0.0:
            logger.debug(f"Gradient norm of '{name}' is zero; keeping lambda={old:.4e}")
            updated[name] = old
            continue
        updated[name] = alpha * (total / norm) + (1.0 - alpha) * old
    return replace(previous, **updated)
