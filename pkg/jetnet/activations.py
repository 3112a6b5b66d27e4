import logging
from typing import Dict, List, Union

import numpy as np

from autodiff import ops
from autodiff.tape import Node
from common.errors import ContractError

logger = logging.getLogger(__name__)

Factor = Union[Node, float, None]


class Activation:
    name = "activation"

    def derivatives(self, z: Node, order: int) -> List[Factor]:
        """sigma and its derivatives up to ``order`` at ``z`` as tape values."""
        raise NotImplementedError

    def numpy(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Sin(Activation):
    name = "sin"

    def derivatives(self, z, order):
        s = ops.sin(z)
        if order == 0:
            return [s]
        c = ops.cos(z)
        cycle = [s, c, ops.neg(s), ops.neg(c)]
        return [cycle[k % 4] for k in range(order + 1)]

    def numpy(self, x):
        return np.sin(x)


class Tanh(Activation):
    name = "tanh"

    def derivatives(self, z, order):
        t = ops.tanh(z)
        out: List[Factor] = [t]
        if order >= 1:
            s = ops.sub(1.0, ops.square(t))
            out.append(s)
        if order >= 2:
            out.append(ops.scale(ops.mul(t, s), -2.0))
        if order >= 3:
            out.append(ops.mul(s, ops.sub(ops.scale(ops.square(t), 6.0), 2.0)))
        if order >= 4:
            out.append(ops.scale(ops.mul(ops.mul(t, s), ops.sub(2.0, ops.scale(ops.square(t), 3.0))), 8.0))
        if order >= 5:
            raise ContractError("tanh jets are provided up to order 4")
        return out

    def numpy(self, x):
        return np.tanh(x)


class Identity(Activation):
    name = "identity"

    def derivatives(self, z, order):
        return ([z, 1.0] + [None] * order)[: order + 1]

    def numpy(self, x):
        return x


class Square(Activation):
    """x**2, the polynomial surrogate used for closed-form jet checks."""

    name = "square"

    def derivatives(self, z, order):
        return ([ops.square(z), ops.scale(z, 2.0), 2.0] + [None] * order)[: order + 1]

    def numpy(self, x):
        return x * x


ACTIVATIONS: Dict[str, Activation] = {a.name: a for a in (Sin(), Tanh(), Identity(), Square())}


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ContractError(f"Unknown activation '{name}'. Available: {sorted(ACTIVATIONS)}") from None
