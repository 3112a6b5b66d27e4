"""Differentiable tensor operations recorded on a :class:`Tape`.

Every function accepts nodes, numpy arrays or python scalars; non-node
operands become constants on the tape of the first node operand.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from autodiff.tape import Node, Tape
from common.errors import ContractError, ShapeError

logger = logging.getLogger(__name__)

Operand = Union[Node, np.ndarray, float, int]


def _find_tape(*operands) -> Tape:
    for operand in operands:
        if isinstance(operand, Node):
            return operand.tape
    raise ContractError("At least one operand must be a tape node")


def as_node(tape: Tape, value: Operand) -> Node:
    if isinstance(value, Node):
        if value.tape is not tape:
            raise ContractError("Operands recorded on different tapes")
        return value
    return tape.constant(np.asarray(value, dtype=np.float64))


def _lift(*operands) -> Tuple[Node, ...]:
    tape = _find_tape(*operands)
    return tuple(as_node(tape, operand) for operand in operands)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, extent in enumerate(shape) if extent == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(op: str, a: Node, b: Node) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise ShapeError(f"{op}: operands of shape {a.shape} and {b.shape} do not broadcast") from e


def add(a: Operand, b: Operand) -> Node:
    a, b = _lift(a, b)
    _broadcast_shape("add", a, b)

    def vjp(g):
        return unbroadcast(g, a.shape), unbroadcast(g, b.shape)

    return a.tape.record("add", (a, b), a.value + b.value, vjp)


def sub(a: Operand, b: Operand) -> Node:
    a, b = _lift(a, b)
    _broadcast_shape("sub", a, b)

    def vjp(g):
        return unbroadcast(g, a.shape), unbroadcast(-g, b.shape)

    return a.tape.record("sub", (a, b), a.value - b.value, vjp)


def mul(a: Operand, b: Operand) -> Node:
    a, b = _lift(a, b)
    _broadcast_shape("mul", a, b)

    def vjp(g):
        return unbroadcast(g * b.value, a.shape), unbroadcast(g * a.value, b.shape)

    return a.tape.record("mul", (a, b), a.value * b.value, vjp)


def div(a: Operand, b: Operand) -> Node:
    a, b = _lift(a, b)
    _broadcast_shape("div", a, b)
    out = a.value / b.value

    def vjp(g):
        return unbroadcast(g / b.value, a.shape), unbroadcast(-g * out / b.value, b.shape)

    return a.tape.record("div", (a, b), out, vjp)


def neg(a: Node) -> Node:
    return a.tape.record("neg", (a,), -a.value, lambda g: (-g,))


def scale(a: Node, factor: float) -> Node:
    factor = float(factor)
    return a.tape.record("scale", (a,), factor * a.value, lambda g: (factor * g,))


def matmul(a: Operand, b: Operand) -> Node:
    a, b = _lift(a, b)
    if a.ndim not in (1, 2) or b.ndim not in (1, 2):
        raise ShapeError(f"matmul supports 1-D/2-D operands, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")

    def vjp(g):
        if a.ndim == 2 and b.ndim == 2:
            return g @ b.value.T, a.value.T @ g
        if a.ndim == 2:
            return np.outer(g, b.value), a.value.T @ g
        if b.ndim == 2:
            return b.value @ g, np.outer(a.value, g)
        return g * b.value, g * a.value

    return a.tape.record("matmul", (a, b), a.value @ b.value, vjp)


def power(a: Node, exponent: int) -> Node:
    if int(exponent) != exponent or exponent < 0:
        raise ContractError(f"Only nonnegative integer powers are supported, got {exponent}")
    exponent = int(exponent)
    if exponent == 0:
        return a.tape.constant(np.ones_like(a.value))
    if exponent == 1:
        return a

    def vjp(g):
        return (g * exponent * a.value ** (exponent - 1),)

    return a.tape.record(f"pow{exponent}", (a,), a.value**exponent, vjp)


def square(a: Node) -> Node:
    return a.tape.record("square", (a,), a.value * a.value, lambda g: (2.0 * g * a.value,))


def sin(a: Node) -> Node:
    return a.tape.record("sin", (a,), np.sin(a.value), lambda g: (g * np.cos(a.value),))


def cos(a: Node) -> Node:
    return a.tape.record("cos", (a,), np.cos(a.value), lambda g: (-g * np.sin(a.value),))


def tanh(a: Node) -> Node:
    out = np.tanh(a.value)
    return a.tape.record("tanh", (a,), out, lambda g: (g * (1.0 - out * out),))


def exp(a: Node) -> Node:
    out = np.exp(a.value)
    return a.tape.record("exp", (a,), out, lambda g: (g * out,))


def sqrt(a: Node) -> Node:
    out = np.sqrt(a.value)
    return a.tape.record("sqrt", (a,), out, lambda g: (0.5 * g / out,))


def sum(a: Node, axis: Optional[Union[int, Tuple[int, ...]]] = None) -> Node:
    shape = a.shape
    if axis is None:
        return a.tape.record("sum", (a,), np.sum(a.value), lambda g: (np.broadcast_to(g, shape).copy(),))
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    axes = tuple(ax % a.ndim for ax in axes)

    def vjp(g):
        return (np.broadcast_to(np.expand_dims(g, axes), shape).copy(),)

    return a.tape.record("sum", (a,), np.sum(a.value, axis=axes), vjp)


def mean(a: Node, axis: Optional[Union[int, Tuple[int, ...]]] = None) -> Node:
    if a.size == 0:
        raise ContractError("mean of an empty tensor")
    summed = sum(a, axis)
    return scale(summed, summed.size / a.size)


def reshape(a: Node, shape: Sequence[int]) -> Node:
    original = a.shape
    try:
        out = a.value.reshape(shape)
    except ValueError as e:
        raise ShapeError(f"Cannot reshape {original} into {tuple(shape)}") from e
    return a.tape.record("reshape", (a,), out, lambda g: (g.reshape(original),))


def transpose(a: Node, axes: Optional[Sequence[int]] = None) -> Node:
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    inverse = tuple(np.argsort(axes))
    return a.tape.record("transpose", (a,), np.transpose(a.value, axes), lambda g: (np.transpose(g, inverse),))


def getitem(a: Node, key) -> Node:
    shape = a.shape

    def vjp(g):
        full = np.zeros(shape)
        np.add.at(full, key, g)
        return (full,)

    return a.tape.record("index", (a,), a.value[key], vjp)


def take(a: Node, indices, axis: int = 0) -> Node:
    indices = np.asarray(indices)
    shape = a.shape
    axis = axis % a.ndim

    def vjp(g):
        full = np.zeros(shape)
        moved = np.moveaxis(full, axis, 0)
        np.add.at(moved, indices, np.moveaxis(g, axis, 0))
        return (full,)

    if indices.ndim > 1:
        raise ShapeError("take expects scalar or 1-D indices")
    if indices.ndim == 0:
        return getitem(a, (slice(None),) * axis + (int(indices),))
    return a.tape.record("take", (a,), np.take(a.value, indices, axis=axis), vjp)


def concat(nodes: Sequence[Node], axis: int = 0) -> Node:
    if not nodes:
        raise ContractError("concat of an empty sequence")
    tape = nodes[0].tape
    try:
        out = np.concatenate([n.value for n in nodes], axis=axis)
    except ValueError as e:
        raise ShapeError(f"concat: incompatible shapes {[n.shape for n in nodes]}") from e
    splits = np.cumsum([n.shape[axis] for n in nodes])[:-1]

    def vjp(g):
        return tuple(np.split(g, splits, axis=axis))

    return tape.record("concat", nodes, out, vjp)


def stack(nodes: Sequence[Node], axis: int = 0) -> Node:
    if not nodes:
        raise ContractError("stack of an empty sequence")
    tape = nodes[0].tape
    try:
        out = np.stack([n.value for n in nodes], axis=axis)
    except ValueError as e:
        raise ShapeError(f"stack: incompatible shapes {[n.shape for n in nodes]}") from e

    def vjp(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(nodes)))

    return tape.record("stack", nodes, out, vjp)


def broadcast_to(a: Node, shape: Sequence[int]) -> Node:
    shape = tuple(shape)
    original = a.shape
    try:
        out = np.broadcast_to(a.value, shape).copy()
    except ValueError as e:
        raise ShapeError(f"Cannot broadcast {original} to {shape}") from e
    return a.tape.record("broadcast", (a,), out, lambda g: (unbroadcast(g, original),))


def total(nodes: Sequence[Node]) -> Node:
    """Left-to-right sum of same-shape nodes (fixed reduction order)."""
    if not nodes:
        raise ContractError("total of an empty sequence")
    result = nodes[0]
    for node in nodes[1:]:
        result = add(result, node)
    return result
