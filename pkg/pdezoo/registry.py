import logging
from typing import Any, Dict, Optional, Type

from common.errors import ConfigError
from pdezoo.allen_cahn import AllenCahn
from pdezoo.base import Domain, PdeProblem
from pdezoo.burgers import Burgers
from pdezoo.kdv import KdV
from pdezoo.navier_stokes import NavierStokes

logger = logging.getLogger(__name__)

PROBLEMS: Dict[str, Type[PdeProblem]] = {
    "burgers": Burgers,
    "allen_cahn": AllenCahn,
    "kdv": KdV,
    "navier_stokes": NavierStokes,
}


def build_problem(name: str, coefficients: Optional[Dict[str, Any]] = None, domain_shape: str = "square") -> PdeProblem:
    try:
        problem_cls = PROBLEMS[name]
    except KeyError:
        raise ConfigError(f"Unknown PDE '{name}'. Available: {sorted(PROBLEMS)}") from None

    coefficients = dict(coefficients or {})
    try:
        problem = problem_cls(**coefficients)
        if domain_shape != problem.domain.shape:
            if name != "burgers":
                raise ConfigError(f"Domain shape '{domain_shape}' is only available for Burgers")
            d = problem.domain
            problem = problem_cls(domain=Domain(d.lower, d.upper, d.t_start, d.t_end, domain_shape), **coefficients)
    except TypeError as e:
        raise ConfigError(f"Invalid coefficients for {name}: {e}") from e
    logger.info(f"Built problem {name} with coefficients {problem.coefficients()} on a {domain_shape} domain")
    return problem
