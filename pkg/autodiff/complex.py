import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from autodiff import ops
from autodiff.tape import Node
from common.errors import ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexPair:
    """Complex tensor held as two real tape nodes."""

    re: Node
    im: Node

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise ShapeError(f"Real part {self.re.shape} and imaginary part {self.im.shape} differ in shape")

    @classmethod
    def from_real(cls, node: Node) -> "ComplexPair":
        return cls(node, node.tape.constant(np.zeros_like(node.value)))

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.re.shape

    @property
    def tape(self):
        return self.re.tape

    @property
    def value(self) -> np.ndarray:
        return self.re.value + 1j * self.im.value

    def __add__(self, other: "ComplexPair") -> "ComplexPair":
        return ComplexPair(ops.add(self.re, other.re), ops.add(self.im, other.im))

    def __sub__(self, other: "ComplexPair") -> "ComplexPair":
        return ComplexPair(ops.sub(self.re, other.re), ops.sub(self.im, other.im))

    def __neg__(self) -> "ComplexPair":
        return ComplexPair(ops.neg(self.re), ops.neg(self.im))

    def __mul__(self, other: "ComplexPair") -> "ComplexPair":
        a, b, c, d = self.re, self.im, other.re, other.im
        return ComplexPair(ops.sub(ops.mul(a, c), ops.mul(b, d)), ops.add(ops.mul(a, d), ops.mul(b, c)))

    def scale(self, factor: Union[complex, np.ndarray]) -> "ComplexPair":
        """Multiply by a constant (broadcastable) complex factor."""
        factor = np.asarray(factor, dtype=np.complex128)
        fr, fi = factor.real, factor.imag
        if not np.any(fi):
            return ComplexPair(ops.mul(self.re, fr), ops.mul(self.im, fr))
        if not np.any(fr):
            return ComplexPair(ops.neg(ops.mul(self.im, fi)), ops.mul(self.re, fi))
        re = ops.sub(ops.mul(self.re, fr), ops.mul(self.im, fi))
        im = ops.add(ops.mul(self.re, fi), ops.mul(self.im, fr))
        return ComplexPair(re, im)

    def conj(self) -> "ComplexPair":
        return ComplexPair(self.re, ops.neg(self.im))

    def abs2(self) -> Node:
        return ops.add(ops.square(self.re), ops.square(self.im))

    def take(self, indices, axis: int = -1) -> "ComplexPair":
        return ComplexPair(ops.take(self.re, indices, axis), ops.take(self.im, indices, axis))

    def reshape(self, shape) -> "ComplexPair":
        return ComplexPair(ops.reshape(self.re, shape), ops.reshape(self.im, shape))
