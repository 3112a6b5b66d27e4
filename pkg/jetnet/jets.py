"""Input-derivative jets and the calculus that propagates them.

A derivative key is a string of variable letters in canonical order
(``x`` < ``y`` < ``t``): ``""`` is the value, ``"xx"`` is the second
x-derivative, ``"xt"`` the mixed space-time derivative. A component that
is ``None`` is exactly zero.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from autodiff import ops
from autodiff.tape import Node, Tape
from common.errors import ContractError, MissingJetComponentError, ShapeError, UnsupportedOrderError

logger = logging.getLogger(__name__)

VARIABLE_ORDER = "xyt"
EXTRA_KEYS = ("xt", "yt")

Component = Optional[Node]
Components = Dict[str, Component]
Factor = Union[Node, float, None]


def canonical_key(key: str) -> str:
    if any(ch not in VARIABLE_ORDER for ch in key):
        raise ContractError(f"Unknown derivative variable in key '{key}'")
    return "".join(sorted(key, key=VARIABLE_ORDER.index))


def _sub_keys(key: str) -> List[str]:
    subs = set()
    for mask in range(1 << len(key)):
        subs.add(canonical_key("".join(ch for i, ch in enumerate(key) if mask >> i & 1)))
    return sorted(subs, key=lambda k: (len(k), [VARIABLE_ORDER.index(c) for c in k]))


@dataclass(frozen=True)
class JetOrderSpec:
    spatial_dims: int = 1
    max_spatial_order: int = 2
    include_time: bool = True
    include_mixed: bool = False
    extra_keys: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.spatial_dims not in (1, 2):
            raise ContractError(f"Jets support 1 or 2 spatial dimensions, got {self.spatial_dims}")
        if self.max_spatial_order < 0:
            raise ContractError("max_spatial_order must be nonnegative")
        limit = 3 if self.spatial_dims == 1 else 2
        if self.max_spatial_order > limit:
            raise UnsupportedOrderError(
                f"Spatial order {self.max_spatial_order} is not supported in {self.spatial_dims}-D (max {limit})"
            )
        if self.include_mixed and self.spatial_dims != 2:
            raise ContractError("Mixed spatial derivatives only exist in 2-D")
        for key in self.extra_keys:
            if key not in EXTRA_KEYS:
                raise UnsupportedOrderError(f"Extra jet component '{key}' is not supported")
            if "y" in key and self.spatial_dims == 1:
                raise ContractError(f"Component '{key}' requires a 2-D spec")

    @property
    def variables(self) -> str:
        return "xt" if self.spatial_dims == 1 else "xyt"

    @property
    def input_dim(self) -> int:
        return self.spatial_dims + 1

    def column(self, variable: str) -> int:
        return self.variables.index(variable)

    def keys(self) -> Tuple[str, ...]:
        wanted = {""}
        spatial = "x" if self.spatial_dims == 1 else "xy"
        for order in range(1, self.max_spatial_order + 1):
            for var in spatial:
                wanted.add(var * order)
        if self.include_mixed and self.max_spatial_order >= 2:
            wanted.add("xy")
        if self.include_time:
            wanted.add("t")
        wanted.update(self.extra_keys)
        closed = set()
        for key in wanted:
            closed.update(_sub_keys(key))
        return tuple(sorted(closed, key=lambda k: (len(k), [VARIABLE_ORDER.index(c) for c in k])))

    @property
    def max_order(self) -> int:
        return max(len(k) for k in self.keys())


def _set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]


@lru_cache(maxsize=None)
def faa_di_bruno_terms(key: str) -> Tuple[Tuple[int, Tuple[str, ...], int], ...]:
    """Grouped terms ``(k, block keys, multiplicity)`` of d^key sigma(z)."""
    counts = Counter()
    for partition in _set_partitions(list(range(len(key)))):
        blocks = tuple(sorted(canonical_key("".join(key[i] for i in block)) for block in partition))
        counts[(len(partition), blocks)] += 1
    return tuple((k, blocks, n) for (k, blocks), n in sorted(counts.items()))


@lru_cache(maxsize=None)
def leibniz_terms(key: str) -> Tuple[Tuple[str, str, int], ...]:
    """Grouped terms ``(left key, right key, multiplicity)`` of d^key (a*b)."""
    counts = Counter()
    for mask in range(1 << len(key)):
        left = canonical_key("".join(ch for i, ch in enumerate(key) if mask >> i & 1))
        right = canonical_key("".join(ch for i, ch in enumerate(key) if not mask >> i & 1))
        counts[(left, right)] += 1
    return tuple((left, right, n) for (left, right), n in sorted(counts.items()))


def _product(factors: Sequence[Factor], multiplicity: int = 1) -> Component:
    coefficient = float(multiplicity)
    node = None
    for factor in factors:
        if factor is None:
            return None
        if isinstance(factor, Node):
            node = factor if node is None else ops.mul(node, factor)
        else:
            coefficient *= float(factor)
    if node is None:
        raise ContractError("Jet term without a tensor factor")
    if coefficient == 0.0:
        return None
    return node if coefficient == 1.0 else ops.scale(node, coefficient)


def _accumulate(terms: Sequence[Component]) -> Component:
    live = [t for t in terms if t is not None]
    if not live:
        return None
    return ops.total(live)


def jet_linear(h: Components, weight: Node, bias: Optional[Node] = None) -> Components:
    out = {}
    for key, component in h.items():
        if component is None:
            out[key] = None
            continue
        z = ops.matmul(component, weight)
        out[key] = ops.add(z, bias) if key == "" and bias is not None else z
    return out


def jet_activation(z: Components, derivatives: Sequence[Factor]) -> Components:
    """Faa di Bruno: ``derivatives[k]`` is sigma^(k) evaluated at ``z[""]``."""
    out = {"": derivatives[0]}
    for key in z:
        if key == "":
            continue
        terms = []
        for order, blocks, multiplicity in faa_di_bruno_terms(key):
            factors = [derivatives[order] if order < len(derivatives) else None]
            factors.extend(z.get(block) for block in blocks)
            terms.append(_product(factors, multiplicity))
        out[key] = _accumulate(terms)
    return out


def jet_mul(a: Components, b: Components) -> Components:
    out = {}
    for key in a:
        terms = [_product([a.get(left), b.get(right)], n) for left, right, n in leibniz_terms(key)]
        out[key] = _accumulate(terms)
    return out


def jet_add(a: Components, b: Components) -> Components:
    out = {}
    for key in a:
        x, y = a.get(key), b.get(key)
        if x is None:
            out[key] = y
        elif y is None:
            out[key] = x
        else:
            out[key] = ops.add(x, y)
    return out


def jet_sub(a: Components, b: Components) -> Components:
    out = {}
    for key in a:
        x, y = a.get(key), b.get(key)
        if y is None:
            out[key] = x
        elif x is None:
            out[key] = ops.neg(y)
        else:
            out[key] = ops.sub(x, y)
    return out


def input_jet(tape: Tape, points: np.ndarray, spec: JetOrderSpec) -> Components:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != spec.input_dim:
        raise ShapeError(f"Points must have shape (n, {spec.input_dim}), got {points.shape}")
    components: Components = {"": tape.constant(points)}
    for key in spec.keys():
        if len(key) == 1:
            seed = np.zeros_like(points)
            seed[:, spec.column(key)] = 1.0
            components[key] = tape.constant(seed)
        elif key:
            components[key] = None
    return components


def constant_jet(tape: Tape, arrays: Dict[str, np.ndarray], spec: JetOrderSpec) -> Components:
    return {key: (tape.constant(arrays[key]) if key in arrays else None) for key in spec.keys()}


class Jet:
    """Value plus input derivatives of a batch of outputs."""

    _ALIASES = {
        "u": "",
        "u_t": "t",
        "u_x": "x",
        "u_y": "y",
        "u_xx": "xx",
        "u_yy": "yy",
        "u_xy": "xy",
        "u_xxx": "xxx",
        "u_xt": "xt",
        "u_yt": "yt",
    }

    def __init__(self, components: Components, spec: JetOrderSpec):
        if components.get("") is None:
            raise ContractError("A jet needs its value component")
        self.spec = spec
        self.components = dict(components)
        self.tape = components[""].tape
        self.shape = components[""].shape
        for key, node in self.components.items():
            if node is not None and node.shape != self.shape:
                raise ShapeError(f"Jet component '{key}' has shape {node.shape}, value has {self.shape}")

    def has(self, key: str) -> bool:
        return canonical_key(key) in self.components

    def component(self, key: str) -> Node:
        key = canonical_key(key)
        if key not in self.components:
            raise MissingJetComponentError(f"Jet component '{key or 'value'}' was not requested")
        node = self.components[key]
        if node is None:
            node = self.tape.constant(np.zeros(self.shape))
            self.components[key] = node
        return node

    def is_zero(self, key: str) -> bool:
        return self.components.get(canonical_key(key)) is None

    def __getattr__(self, name):
        aliases = type(self)._ALIASES
        if name in aliases:
            return self.component(aliases[name])
        raise AttributeError(name)

    def output(self, index: int) -> "Jet":
        if len(self.shape) != 2:
            raise ShapeError("output() needs (n, outputs) components")
        picked = {
            key: (None if node is None else ops.getitem(node, (slice(None), index)))
            for key, node in self.components.items()
        }
        return Jet(picked, self.spec)

    def values(self) -> Dict[str, np.ndarray]:
        return {key: self.component(key).value for key in self.components}
