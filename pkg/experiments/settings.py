import copy
import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from common.errors import ConfigError
from config import OUTPUT_ROOT, PRESETS_DIR
from jetnet.networks import NetworkConfig
from spectral.symbols import SpectralSymbol

logger = logging.getLogger(__name__)

PDE_NAMES = ("burgers", "allen_cahn", "kdv", "navier_stokes")
OUTPUT_DIMS = {"burgers": 1, "allen_cahn": 1, "kdv": 1, "navier_stokes": 2}


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProblemSection(Section):
    pde: Literal["burgers", "allen_cahn", "kdv", "navier_stokes"] = "allen_cahn"
    coefficients: Dict[str, Union[float, str]] = Field(default_factory=dict)
    domain: Literal["square", "triangle"] = "square"


class LossSection(Section):
    physics: float = Field(default=1.0, ge=0.0)
    boundary: float = Field(default=10.0, ge=0.0)
    fourier: float = Field(default=0.0, ge=0.0)
    mode: Literal["fixed", "grad_norm"] = "fixed"
    alpha_ema: float = Field(default=0.9, ge=0.0, le=1.0)
    tune_every: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _some_weight(self):
        if max(self.physics, self.boundary, self.fourier) <= 0.0:
            raise ValueError("at least one of loss.physics, loss.boundary, loss.fourier must be positive")
        return self


class QuantileSection(Section):
    enabled: bool = False
    tau: float = Field(default=0.925, gt=0.0, le=1.0)


class SymbolTermSection(Section):
    coefficient: Union[float, Tuple[float, float]] = 1.0
    order: float
    kind: Literal["signed", "radial"] = "signed"
    multi_index: Optional[List[int]] = None


class FourierSection(Section):
    path: Literal["grid", "mc", "off"] = "off"
    symbol: List[SymbolTermSection] = Field(default_factory=lambda: [SymbolTermSection(order=1)])
    cutoff: Optional[float] = Field(default=None, gt=0.0)
    normalization: Literal["linf", "none"] = "linf"
    grid_size_range: Tuple[int, int] = (64, 96)
    time_slices: int = Field(default=8, ge=1)
    mc_samples: int = Field(default=128, ge=1)

    @field_validator("grid_size_range")
    @classmethod
    def _check_range(cls, value):
        low, high = value
        if low < 2 or high < low:
            raise ValueError(f"grid_size_range must satisfy 2 <= low <= high, got {value}")
        return value

    @model_validator(mode="after")
    def _check_symbol(self):
        if not self.symbol:
            raise ValueError("fourier.symbol needs at least one term")
        self.build_symbol()
        return self

    def build_symbol(self) -> SpectralSymbol:
        return SpectralSymbol.from_terms(term.model_dump() for term in self.symbol)


class CollocationSection(Section):
    interior: int = Field(default=75, ge=1)
    initial: int = Field(default=64, ge=1)
    boundary: int = Field(default=64, ge=1)
    fixed: Literal["none", "space", "all"] = "none"


class OptimizerSection(Section):
    name: Literal["adam"] = "adam"
    lr: float = Field(default=1e-3, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
    iterations: int = Field(default=2000, ge=0)
    log_every: int = Field(default=100, ge=1)


class EvaluationSection(Section):
    every: int = Field(default=250, ge=1)
    space_points: int = Field(default=256, ge=2)
    time_points: int = Field(default=101, ge=2)


class ReferenceSection(Section):
    resolution: int = Field(default=512, ge=8)
    dt: float = Field(default=1e-4, gt=0.0)
    use_cache: bool = True
    gate: bool = False


class ExperimentConfig(Section):
    problem: ProblemSection = Field(default_factory=ProblemSection)
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    loss: LossSection = Field(default_factory=LossSection)
    quantile: QuantileSection = Field(default_factory=QuantileSection)
    fourier: FourierSection = Field(default_factory=FourierSection)
    collocation: CollocationSection = Field(default_factory=CollocationSection)
    optimizer: OptimizerSection = Field(default_factory=OptimizerSection)
    evaluation: EvaluationSection = Field(default_factory=EvaluationSection)
    reference: ReferenceSection = Field(default_factory=ReferenceSection)
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _check_consistency(self):
        pde = self.problem.pde
        if self.problem.domain == "triangle" and pde != "burgers":
            raise ValueError("triangular domains are available for burgers only")
        if self.fourier.path == "grid" and self.problem.domain != "square":
            raise ValueError("fourier.path = 'grid' needs a square domain; use 'mc' on the triangle")
        if self.network.output_dim != OUTPUT_DIMS[pde]:
            # outputs follow the PDE: (psi, omega) for Navier-Stokes, u otherwise
            self.network = self.network.model_copy(update={"output_dim": OUTPUT_DIMS[pde]})
        if self.network.activation not in ("sin", "tanh") and self.optimizer.iterations > 0:
            raise ValueError("training runs use sin or tanh activations; identity/square are diagnostic only")
        if (self.reference.resolution % self.evaluation.space_points) != 0:
            raise ValueError(
                f"reference.resolution ({self.reference.resolution}) must be a multiple of "
                f"evaluation.space_points ({self.evaluation.space_points})"
            )
        if self.output_dir is None:
            self.output_dir = os.path.join(OUTPUT_ROOT, f"{pde}_seed{self.seed}")
        return self

    @property
    def spatial_dims(self) -> int:
        return 2 if self.problem.pde == "navier_stokes" else 1

    def resolved(self) -> Dict[str, Any]:
        """Every setting with defaults materialized, JSON-serializable."""
        return self.model_dump(mode="json")


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, "rb") as f:
            if path.suffix == ".json":
                return json.load(f)
            return tomllib.load(f)
    except FileNotFoundError:
        logger.error(f"Config file not found: {path}")
        raise ConfigError(f"Config file not found: {path}") from None
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e


def load_preset(pde: str) -> Dict[str, Any]:
    if pde not in PDE_NAMES:
        raise ConfigError(f"Unknown PDE '{pde}'. Available: {list(PDE_NAMES)}")
    return read_config_file(os.path.join(PRESETS_DIR, f"{pde}.toml"))


def load_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """Preset for the PDE, deep-merged with the file, then command-line overrides, then validation."""
    raw = read_config_file(path) if path else {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    pde = overrides.get("pde") or raw.get("problem", {}).get("pde") or "allen_cahn"
    merged = deep_merge(load_preset(pde), raw)
    merged.setdefault("problem", {})["pde"] = pde
    if "seed" in overrides:
        merged["seed"] = overrides["seed"]
        merged.pop("output_dir", None)
    if "output_dir" in overrides:
        merged["output_dir"] = overrides["output_dir"]
    if "fourier" in overrides:
        merged.setdefault("fourier", {})["path"] = overrides["fourier"]
    try:
        config = ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {e}") from e
    logger.info(
        f"Loaded config: pde={config.problem.pde}, fourier={config.fourier.path}, seed={config.seed}, "
        f"iterations={config.optimizer.iterations}"
    )
    return config
