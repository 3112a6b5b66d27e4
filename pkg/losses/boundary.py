import logging
from typing import Dict

import numpy as np

from autodiff import ops
from autodiff.tape import Node
from common.errors import ContractError
from jetnet.networks import JetNetwork
from pdezoo.base import PdeProblem

logger = logging.getLogger(__name__)


def _with_time(space: np.ndarray, t) -> np.ndarray:
    space = np.asarray(space, dtype=np.float64).reshape(space.shape[0], -1)
    times = np.broadcast_to(np.asarray(t, dtype=np.float64), (space.shape[0],))
    return np.concatenate([space, times[:, None]], axis=1)


def initial_loss(problem: PdeProblem, net: JetNetwork, bound: Dict[str, Node], x: np.ndarray) -> Node:
    """MSE of u_theta(x, t_start) - u_0(x) over all outputs."""
    tape = next(iter(bound.values())).tape
    prediction = net.forward(bound, _with_time(x, problem.domain.t_start))
    target = tape.constant(problem.initial_condition(x))
    return ops.mean(ops.square(ops.sub(prediction, target)))


def periodic_pairs(problem: PdeProblem, seeds: np.ndarray):
    """Matching points on opposite faces of the box: (left, right), each (n * d, d + 1)."""
    d = problem.spatial_dims
    left, right = [], []
    for axis in range(d):
        low, high = seeds.copy(), seeds.copy()
        low[:, axis] = problem.domain.lower[axis]
        high[:, axis] = problem.domain.upper[axis]
        left.append(low)
        right.append(high)
    return np.concatenate(left, axis=0), np.concatenate(right, axis=0)


def boundary_loss(problem: PdeProblem, net: JetNetwork, bound: Dict[str, Node], seeds: np.ndarray) -> Node:
    """Periodic mismatch on the square; Dirichlet data from the reference on the triangle's edges."""
    seeds = np.asarray(seeds, dtype=np.float64)
    if problem.domain.shape == "square":
        left, right = periodic_pairs(problem, seeds)
        mismatch = ops.sub(net.forward(bound, left), net.forward(bound, right))
        return ops.mean(ops.square(mismatch))

    reference = problem.reference
    if reference is None:
        raise ContractError("Triangular-domain boundary data needs a reference solution")
    t = seeds[:, -1]
    lo, hi = problem.domain.slice_bounds(t)
    edges = np.concatenate([np.stack([lo, t], axis=1), np.stack([hi, t], axis=1)], axis=0)
    tape = next(iter(bound.values())).tape
    target = tape.constant(reference.bilinear(edges)[:, None])
    return ops.mean(ops.square(ops.sub(net.forward(bound, edges), target)))


def boundary_initial_loss(
    problem: PdeProblem, net: JetNetwork, bound: Dict[str, Node], x: np.ndarray, seeds: np.ndarray
) -> Node:
    return ops.add(initial_loss(problem, net, bound, x), boundary_loss(problem, net, bound, seeds))
