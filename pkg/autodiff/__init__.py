from autodiff.complex import ComplexPair
from autodiff.linear import IdentityOperator, LinearOperator, MatrixOperator, linear_op_node
from autodiff.optim import Adam, AdamState, adam_step
from autodiff.tape import Node, Tape

__all__ = [
    "Adam",
    "AdamState",
    "ComplexPair",
    "IdentityOperator",
    "LinearOperator",
    "MatrixOperator",
    "Node",
    "Tape",
    "adam_step",
    "linear_op_node",
]
