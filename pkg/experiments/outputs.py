import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from analysis.metrics import ErrorPowerCurve, error_power_spectrum
from analysis.psd import FrequencyStats, PsdCurve, frequency_stats, radial_psd
from analysis.reports import write_error_power_csv, write_psd_csv, write_stats_csv
from experiments.settings import ExperimentConfig
from experiments.training import TERM_COLUMNS, RunRecord
from refsolve.solution import SolutionGrid
from refsolve.storage import save_solution

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RUN_COLUMNS = ("iteration",) + TERM_COLUMNS + (
    "relative_l2",
    "grid_sizes",
    "lambda_physics",
    "lambda_boundary",
    "lambda_fourier",
)


@dataclass
class RunAnalyses:
    psd: Optional[PsdCurve] = None
    stats: List[Tuple[str, FrequencyStats]] = field(default_factory=list)
    error_power: Optional[ErrorPowerCurve] = None


def error_psd(reference: SolutionGrid, prediction: SolutionGrid) -> PsdCurve:
    """Radial PSD of the error: the (time, x) plane for 1-D problems, slice-averaged for 2-D."""
    error = prediction.values - reference.values
    if error.ndim == 2:
        return radial_psd(error)
    curves = [radial_psd(s) for s in error]
    return PsdCurve(curves[0].frequencies, np.mean([c.power for c in curves], axis=0), curves[0].counts)


def analyze_run(reference: SolutionGrid, prediction: SolutionGrid, label: str) -> RunAnalyses:
    psd = error_psd(reference, prediction)
    stats = [(label, frequency_stats(psd))] if np.sum(psd.power) > 0 else []
    return RunAnalyses(psd, stats, error_power_spectrum(reference, prediction))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_row(record: RunRecord) -> List[str]:
    sizes = "x".join(str(n) for n in record.grid_sizes) if record.grid_sizes else None
    row = [str(record.iteration)]
    row += [_cell(record.losses.get(name)) for name in TERM_COLUMNS]
    row += [_cell(record.relative_l2), _cell(sizes)]
    row += [_cell(record.weights.get(name)) for name in ("physics", "boundary", "fourier")]
    return row


def write_run_csv(records: Sequence[RunRecord], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUN_COLUMNS)
        writer.writerows(record_row(r) for r in records)
    return path


def write_timing_csv(timings: Sequence[Tuple[int, float]], path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("iteration", "wall_seconds"))
        writer.writerows((i, f"{s:.6f}") for i, s in timings)
    return path


def emit_outputs(
    records: Sequence[RunRecord],
    analyses: Optional[RunAnalyses],
    out_dir: PathLike,
    resolved_config: Optional[Dict] = None,
    prediction: Optional[SolutionGrid] = None,
    reference: Optional[SolutionGrid] = None,
    timings: Optional[Sequence[Tuple[int, float]]] = None,
) -> List[Path]:
    """Write the run's tables and fields; missing inputs produce header-only tables."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"Cannot create output directory {out_dir}: {e}")
        raise
    analyses = analyses or RunAnalyses()

    written = [write_run_csv(records, out_dir / "run.csv")]
    written.append(write_timing_csv(timings or [], out_dir / "timing.csv"))
    empty = np.array([])
    written.append(write_psd_csv(analyses.psd or PsdCurve(empty, empty, empty), out_dir / "psd.csv"))
    written.append(write_stats_csv(analyses.stats, out_dir / "stats.csv"))
    power = analyses.error_power or ErrorPowerCurve(empty, empty)
    written.append(write_error_power_csv(power, out_dir / "error_power.csv"))
    if prediction is not None:
        written.append(save_solution(prediction, out_dir / "field"))
    if reference is not None:
        written.append(save_solution(reference, out_dir / "reference"))
    if resolved_config is not None:
        path = out_dir / "config.resolved.json"
        with open(path, "w", encoding="utf-8") as f:
            json.dump(resolved_config, f, indent=2, sort_keys=True)
        written.append(path)
    logger.info(f"Wrote {len(written)} output files to {out_dir}")
    return written


def run_label(config: ExperimentConfig) -> str:
    enhanced = config.fourier.path != "off" and config.loss.fourier > 0
    return f"{config.problem.pde}_{'enhanced' if enhanced else 'vanilla'}"
