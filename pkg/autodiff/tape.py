import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from common.errors import ContractError, NumericalError
from config import TAPE_CHECK_FINITE

logger = logging.getLogger(__name__)

VectorJacobian = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Node:
    """A recorded value on a tape.

    ``vjp`` maps the adjoint of this node to the adjoints of its parents
    (``None`` for parents that receive nothing).
    """

    __slots__ = ("tape", "id", "op", "parents", "value", "vjp", "requires_grad", "name")

    def __init__(self, tape, node_id, op, parents, value, vjp, requires_grad, name=None):
        self.tape = tape
        self.id = node_id
        self.op = op
        self.parents = parents
        self.value = value
        self.vjp = vjp
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def size(self) -> int:
        return self.value.size

    def item(self) -> float:
        return float(self.value.reshape(-1)[0])

    def __repr__(self):
        label = f" name={self.name}" if self.name else ""
        return f"Node(id={self.id}, op={self.op}, shape={self.shape}{label})"

    # operator sugar; implementations live in autodiff.ops
    def __add__(self, other):
        from autodiff import ops

        return ops.add(self, other)

    def __radd__(self, other):
        from autodiff import ops

        return ops.add(other, self)

    def __sub__(self, other):
        from autodiff import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from autodiff import ops

        return ops.sub(other, self)

    def __mul__(self, other):
        from autodiff import ops

        return ops.mul(self, other)

    def __rmul__(self, other):
        from autodiff import ops

        return ops.mul(other, self)

    def __truediv__(self, other):
        from autodiff import ops

        return ops.div(self, other)

    def __rtruediv__(self, other):
        from autodiff import ops

        return ops.div(other, self)

    def __matmul__(self, other):
        from autodiff import ops

        return ops.matmul(self, other)

    def __rmatmul__(self, other):
        from autodiff import ops

        return ops.matmul(other, self)

    def __neg__(self):
        from autodiff import ops

        return ops.neg(self)

    def __pow__(self, exponent):
        from autodiff import ops

        return ops.power(self, exponent)

    def __getitem__(self, key):
        from autodiff import ops

        return ops.getitem(self, key)


class Tape:
    """Append-only record of one training step."""

    def __init__(self, check_finite: bool = TAPE_CHECK_FINITE):
        self.nodes: List[Node] = []
        self.check_finite = check_finite

    def __len__(self):
        return len(self.nodes)

    def _append(self, op, parents, value, vjp, requires_grad, name=None) -> Node:
        value = np.asarray(value, dtype=np.float64)
        if self.check_finite and not np.all(np.isfinite(value)):
            raise NumericalError(f"Non-finite value produced by '{op}' (tape position {len(self.nodes)})")
        node = Node(self, len(self.nodes), op, tuple(parents), value, vjp, requires_grad, name)
        self.nodes.append(node)
        return node

    def leaf(self, value, name: Optional[str] = None) -> Node:
        return self._append("leaf", (), np.array(value, dtype=np.float64), None, True, name)

    def constant(self, value, name: Optional[str] = None) -> Node:
        return self._append("const", (), value, None, False, name)

    def record(
        self,
        op_kind: str,
        parents: Iterable[Node],
        value,
        vjp: Optional[VectorJacobian] = None,
    ) -> Node:
        parents = tuple(parents)
        for parent in parents:
            if parent.tape is not self or parent.id >= len(self.nodes):
                raise ContractError(f"Parent {parent!r} of '{op_kind}' is not on this tape")
        requires_grad = vjp is not None and any(p.requires_grad for p in parents)
        return self._append(op_kind, parents, value, vjp if requires_grad else None, requires_grad)

    def backward(self, root: Node, seed: Optional[np.ndarray] = None) -> Dict[int, np.ndarray]:
        """Reverse sweep from ``root``; returns adjoints keyed by node id."""
        if root.tape is not self:
            raise ContractError("Backward root belongs to another tape")
        if seed is None:
            if root.size != 1:
                raise ContractError(f"Backward root must be scalar, got shape {root.shape}")
            seed = np.ones_like(root.value)
        elif np.shape(seed) != root.shape:
            raise ContractError(f"Seed shape {np.shape(seed)} does not match root shape {root.shape}")

        adjoints: Dict[int, np.ndarray] = {root.id: np.asarray(seed, dtype=np.float64)}
        for node in reversed(self.nodes[: root.id + 1]):
            adjoint = adjoints.get(node.id)
            if adjoint is None or node.vjp is None:
                continue
            parent_grads = node.vjp(adjoint)
            for parent, grad in zip(node.parents, parent_grads):
                if grad is None or not parent.requires_grad:
                    continue
                if parent.id in adjoints:
                    adjoints[parent.id] = adjoints[parent.id] + grad
                else:
                    adjoints[parent.id] = np.asarray(grad, dtype=np.float64)
        return adjoints

    def gradients(self, root: Node, wrt: Dict[str, Node]) -> Dict[str, np.ndarray]:
        adjoints = self.backward(root)
        return {
            name: adjoints.get(node.id, np.zeros_like(node.value)) for name, node in wrt.items()
        }

    def clear(self):
        logger.debug(f"Clearing tape with {len(self.nodes)} nodes")
        self.nodes = []
