import logging
from typing import Dict, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from autodiff.tape import Node, Tape
from common.errors import ContractError, ShapeError
from jetnet.activations import get_activation
from jetnet.features import FourierFeatureMap, embed
from jetnet.jets import (
    Components,
    Jet,
    JetOrderSpec,
    input_jet,
    jet_activation,
    jet_add,
    jet_linear,
    jet_mul,
    jet_sub,
)

logger = logging.getLogger(__name__)


class NetworkConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    depth: int = Field(default=4, ge=0)
    width: int = Field(default=128, ge=1)
    activation: Literal["sin", "tanh", "identity", "square"] = "tanh"
    architecture: Literal["plain", "modified"] = "plain"
    embedding: Literal["none", "fourier"] = "none"
    fourier_sigma: float = Field(default=1.0, ge=0.0)
    fourier_features: int = Field(default=64, ge=1)
    fourier_omit_two_pi: bool = False
    output_dim: int = Field(default=1, ge=1, le=2)

    @model_validator(mode="after")
    def _check_architecture(self):
        if self.architecture == "modified" and self.depth < 1:
            raise ValueError("the modified MLP needs at least one gated layer (depth >= 1)")
        return self


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def modified_mlp_forward(
    params: Dict[str, Node],
    features: Components,
    depth: int,
    activation,
    order: int,
) -> Components:
    """Gated recurrence h <- U + sigma(h W_i + b_i) * (V - U) on jets."""

    def layer(h, w, b):
        z = jet_linear(h, params[w], params[b])
        return jet_activation(z, activation.derivatives(z[""], order))

    U = layer(features, "Wu", "bu")
    V = layer(features, "Wv", "bv")
    gap = jet_sub(V, U)
    h = features
    for i in range(depth):
        gate = layer(h, f"W{i}", f"b{i}")
        h = jet_add(U, jet_mul(gate, gap))
    return jet_linear(h, params["W_out"], params["b_out"])


class JetNetwork:
    """Coordinate MLP whose forward pass carries input-derivative jets."""

    def __init__(self, config: NetworkConfig, spatial_dims: int, rng: np.random.Generator):
        self.config = config
        self.spatial_dims = spatial_dims
        self.input_dim = spatial_dims + 1
        self.activation = get_activation(config.activation)

        self.feature_map: Optional[FourierFeatureMap] = None
        feature_dim = self.input_dim
        if config.embedding == "fourier":
            self.feature_map = FourierFeatureMap.sample(
                rng, config.fourier_features, self.input_dim, config.fourier_sigma, config.fourier_omit_two_pi
            )
            feature_dim = self.feature_map.output_dim

        self.params: Dict[str, np.ndarray] = self._init_params(rng, feature_dim)
        logger.info(
            f"Initialized {config.architecture} network: depth={config.depth}, width={config.width}, "
            f"activation={config.activation}, embedding={config.embedding}, parameters={self.parameter_count}"
        )

    def _init_params(self, rng, feature_dim) -> Dict[str, np.ndarray]:
        cfg = self.config
        params: Dict[str, np.ndarray] = {}
        if cfg.architecture == "modified":
            for name in ("u", "v"):
                params[f"W{name}"] = glorot_uniform(rng, feature_dim, cfg.width)
                params[f"b{name}"] = np.zeros(cfg.width)
        fan_in = feature_dim
        for i in range(cfg.depth):
            params[f"W{i}"] = glorot_uniform(rng, fan_in, cfg.width)
            params[f"b{i}"] = np.zeros(cfg.width)
            fan_in = cfg.width
        params["W_out"] = glorot_uniform(rng, fan_in, cfg.output_dim)
        params["b_out"] = np.zeros(cfg.output_dim)
        return params

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def set_params(self, params: Dict[str, np.ndarray]):
        for name, value in params.items():
            if name not in self.params:
                raise ContractError(f"Unknown parameter '{name}'")
            if value.shape != self.params[name].shape:
                raise ShapeError(f"Parameter '{name}' has shape {self.params[name].shape}, got {value.shape}")
        self.params = {name: np.array(params[name], dtype=np.float64) for name in self.params}

    def bind(self, tape: Tape) -> Dict[str, Node]:
        return {name: tape.leaf(value, name=name) for name, value in self.params.items()}

    def _input_components(self, tape: Tape, points: np.ndarray, spec: JetOrderSpec) -> Components:
        if self.feature_map is not None:
            if points.ndim != 2 or points.shape[1] != self.input_dim:
                raise ShapeError(f"Points must have shape (n, {self.input_dim}), got {points.shape}")
            return embed(tape, points, self.feature_map, spec)
        return input_jet(tape, points, spec)

    def forward_jet(self, bound: Dict[str, Node], points: np.ndarray, spec: JetOrderSpec) -> Jet:
        if spec.spatial_dims != self.spatial_dims:
            raise ContractError(f"Jet spec is {spec.spatial_dims}-D, network is {self.spatial_dims}-D")
        tape = next(iter(bound.values())).tape
        points = np.asarray(points, dtype=np.float64)
        order = spec.max_order
        h = self._input_components(tape, points, spec)

        if self.config.architecture == "modified":
            out = modified_mlp_forward(bound, h, self.config.depth, self.activation, order)
        else:
            for i in range(self.config.depth):
                z = jet_linear(h, bound[f"W{i}"], bound[f"b{i}"])
                h = jet_activation(z, self.activation.derivatives(z[""], order))
            out = jet_linear(h, bound["W_out"], bound["b_out"])
        return Jet(out, spec)

    def forward(self, bound: Dict[str, Node], points: np.ndarray) -> Node:
        spec = JetOrderSpec(self.spatial_dims, 0, include_time=False)
        return self.forward_jet(bound, points, spec).u

    def predict(self, points: np.ndarray, params: Optional[Dict[str, np.ndarray]] = None) -> np.ndarray:
        """Value-only numpy evaluation, independent of the tape."""
        p = self.params if params is None else params
        sigma = self.activation.numpy
        x = np.asarray(points, dtype=np.float64)
        if self.feature_map is not None:
            x = self.feature_map.features(x)
        if self.config.architecture == "modified":
            U = sigma(x @ p["Wu"] + p["bu"])
            V = sigma(x @ p["Wv"] + p["bv"])
            h = x
            for i in range(self.config.depth):
                g = sigma(h @ p[f"W{i}"] + p[f"b{i}"])
                h = (1.0 - g) * U + g * V
        else:
            h = x
            for i in range(self.config.depth):
                h = sigma(h @ p[f"W{i}"] + p[f"b{i}"])
        return h @ p["W_out"] + p["b_out"]

    def named_tensors(self) -> Dict[str, np.ndarray]:
        tensors = dict(self.params)
        if self.feature_map is not None:
            tensors["embedding.B"] = self.feature_map.B
        return tensors

    def load_tensors(self, tensors: Dict[str, np.ndarray]):
        if "embedding.B" in tensors:
            if self.feature_map is None:
                raise ContractError("Checkpoint carries a Fourier embedding the network does not use")
            self.feature_map = FourierFeatureMap(
                np.array(tensors["embedding.B"]), self.feature_map.sigma, self.feature_map.omit_two_pi
            )
        self.set_params({k: v for k, v in tensors.items() if k != "embedding.B"})


def parameter_vector(params: Dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([p.reshape(-1) for p in params.values()])
