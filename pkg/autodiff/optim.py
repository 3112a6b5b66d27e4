import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from common.errors import ContractError, ShapeError

logger = logging.getLogger(__name__)

Params = Dict[str, np.ndarray]


@dataclass
class AdamState:
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)
    step: int = 0


def adam_step(
    params: Params,
    grads: Params,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> Tuple[Params, AdamState]:
    """One bias-corrected Adam update. Inputs are not modified."""
    if lr <= 0:
        raise ContractError(f"Learning rate must be positive, got {lr}")
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
        raise ContractError(f"Adam betas must lie in [0, 1), got ({beta1}, {beta2})")

    t = state.step + 1
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t

    new_params, new_m, new_v = {}, {}, {}
    for name, value in params.items():
        g = grads[name]
        if g.shape != value.shape:
            raise ShapeError(f"Gradient for '{name}' has shape {g.shape}, parameter {value.shape}")
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        if m.shape != value.shape or v.shape != value.shape:
            raise ShapeError(f"Adam state for '{name}' does not match parameter shape {value.shape}")

        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        new_params[name] = value - lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
        new_m[name] = m
        new_v[name] = v

    return new_params, AdamState(new_m, new_v, t)


class Adam:
    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ContractError(f"Learning rate must be positive, got {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    @property
    def step_count(self) -> int:
        return self.state.step

    def step(self, params: Params, grads: Params) -> Params:
        new_params, self.state = adam_step(params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)
        return new_params
