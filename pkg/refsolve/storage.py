import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np

from common.errors import ContractError
from config import REFERENCE_CACHE_DIR
from refsolve.solution import SolutionGrid

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _to_storage(values: np.ndarray) -> np.ndarray:
    # [time][x][y] in memory, [time][y][x] on disk
    return np.swapaxes(values, 1, 2) if values.ndim == 3 else values


def save_solution(grid: SolutionGrid, stem: PathLike) -> Path:
    """Write ``stem.json`` (metadata) and ``stem.bin`` (little-endian float64, row-major)."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    fields = ["values"] + sorted(grid.extras)
    sidecar = {
        "layout": "[time][x]" if grid.spatial_dims == 1 else "[time][y][x]",
        "dtype": "<f8",
        "fields": fields,
        "shape": list(_to_storage(grid.values).shape),
        "origin": grid.origin,
        "lengths": grid.lengths,
        "sizes": [int(a.size) for a in grid.axes],
        "times": grid.times.tolist(),
        "metadata": grid.metadata,
    }
    with open(stem.with_suffix(".bin"), "wb") as f:
        for name in fields:
            f.write(np.ascontiguousarray(_to_storage(grid.field(name)), dtype="<f8").tobytes())
    with open(stem.with_suffix(".json"), "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True, default=float)
    logger.debug(f"Saved solution {grid.values.shape} to {stem}.bin")
    return stem.with_suffix(".bin")


def load_solution(stem: PathLike) -> SolutionGrid:
    stem = Path(stem)
    try:
        with open(stem.with_suffix(".json"), "r", encoding="utf-8") as f:
            sidecar = json.load(f)
        raw = np.fromfile(stem.with_suffix(".bin"), dtype="<f8")
    except FileNotFoundError:
        logger.error(f"Solution files not found for {stem}")
        raise

    shape = tuple(sidecar["shape"])
    per_field = int(np.prod(shape))
    if raw.size != per_field * len(sidecar["fields"]):
        raise ContractError(f"{stem}.bin holds {raw.size} values, sidecar expects {per_field * len(sidecar['fields'])}")
    arrays = {
        name: _to_storage(raw[i * per_field : (i + 1) * per_field].reshape(shape))
        for i, name in enumerate(sidecar["fields"])
    }
    axes = [o + np.arange(n) * l / n for o, l, n in zip(sidecar["origin"], sidecar["lengths"], sidecar["sizes"])]
    values = arrays.pop("values")
    return SolutionGrid(axes, sidecar["lengths"], np.asarray(sidecar["times"]), values, sidecar["metadata"], arrays)


def export_csv(grid: SolutionGrid, path: PathLike) -> Path:
    """Long-format ``t,x,u`` table of a 1-D solution."""
    if grid.spatial_dims != 1:
        raise ContractError("CSV export is available for 1-D solutions only")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "x", "u"])
        for t, row in zip(grid.times, grid.values):
            for x, u in zip(grid.axes[0], row):
                writer.writerow([repr(float(t)), repr(float(x)), repr(float(u))])
    return path


def cache_key(payload: Dict) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=float)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class ReferenceCache:
    """Solutions on disk keyed by a hash of the solver inputs."""

    def __init__(self, directory: Optional[PathLike] = None):
        self.directory = Path(directory or REFERENCE_CACHE_DIR)

    def path_for(self, key: str) -> Path:
        return self.directory / key

    def get_or_solve(self, payload: Dict, solve_fn: Callable[[], SolutionGrid]) -> SolutionGrid:
        key = cache_key(payload)
        stem = self.path_for(key)
        if stem.with_suffix(".json").exists() and stem.with_suffix(".bin").exists():
            logger.info(f"Reference cache hit {key}")
            return load_solution(stem)
        logger.info(f"Reference cache miss {key}; solving")
        grid = solve_fn()
        try:
            save_solution(grid, stem)
        except OSError as e:
            logger.warning(f"Could not store reference {key} in {self.directory}: {e}")
        return grid
