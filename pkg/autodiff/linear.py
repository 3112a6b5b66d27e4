import logging
from abc import ABC, abstractmethod
from typing import Tuple, Union

import numpy as np

from autodiff import ops
from autodiff.complex import ComplexPair
from autodiff.tape import Node
from common.errors import ShapeError

logger = logging.getLogger(__name__)


class LinearOperator(ABC):
    """Complex linear map with an explicit conjugate-transpose action."""

    name = "linear"

    def __init__(self, input_shape: Tuple[int, ...], output_shape: Tuple[int, ...]):
        self.input_shape = tuple(input_shape)
        self.output_shape = tuple(output_shape)

    @abstractmethod
    def apply(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def adjoint(self, g: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def check_input(self, shape: Tuple[int, ...]):
        if tuple(shape) != self.input_shape:
            raise ShapeError(f"Operator '{self.name}' expects input {self.input_shape}, got {tuple(shape)}")


class IdentityOperator(LinearOperator):
    name = "identity"

    def __init__(self, shape: Tuple[int, ...]):
        super().__init__(shape, shape)

    def apply(self, z):
        return np.asarray(z, dtype=np.complex128).copy()

    def adjoint(self, g):
        return np.asarray(g, dtype=np.complex128).copy()


class MatrixOperator(LinearOperator):
    """Dense matrix acting on the last axis; leading axes are batch."""

    name = "matrix"

    def __init__(self, matrix: np.ndarray, batch_shape: Tuple[int, ...] = ()):
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        rows, cols = self.matrix.shape
        super().__init__(tuple(batch_shape) + (cols,), tuple(batch_shape) + (rows,))

    def apply(self, z):
        return z @ self.matrix.T

    def adjoint(self, g):
        return g @ self.matrix.conj()


def linear_op_node(op: LinearOperator, x: Union[Node, ComplexPair]) -> ComplexPair:
    """Record ``op(x)`` as one tape node; backward applies ``op.adjoint``."""
    if isinstance(x, ComplexPair):
        parents = (x.re, x.im)
        value = x.re.value + 1j * x.im.value
    else:
        parents = (x,)
        value = x.value.astype(np.complex128)
    op.check_input(value.shape)

    out = op.apply(value)
    if out.shape != op.output_shape:
        raise ShapeError(f"Operator '{op.name}' produced {out.shape}, declared {op.output_shape}")
    stacked = np.stack([out.real, out.imag])

    def vjp(g):
        back = op.adjoint(g[0] + 1j * g[1])
        if len(parents) == 1:
            return (back.real,)
        return back.real, back.imag

    tape = parents[0].tape
    node = tape.record(f"linear:{op.name}", parents, stacked, vjp)
    return ComplexPair(ops.getitem(node, 0), ops.getitem(node, 1))
