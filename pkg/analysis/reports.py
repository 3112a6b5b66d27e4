import csv
import logging
from pathlib import Path
from typing import Iterable, Tuple, Union

import numpy as np

from analysis.metrics import ErrorPowerCurve
from analysis.ntk import NtkProbeResult
from analysis.psd import STATS_COLUMNS, FrequencyStats, PsdCurve

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _write_rows(path: PathLike, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug(f"Wrote {path}")
    return path


def _fmt(value: float) -> str:
    return repr(float(value))


def write_psd_csv(curve: PsdCurve, path: PathLike) -> Path:
    rows = ((_fmt(f), _fmt(p)) for f, p in zip(curve.frequencies, curve.power))
    return _write_rows(path, ("frequency", "power"), rows)


def write_stats_csv(rows: Iterable[Tuple[str, FrequencyStats]], path: PathLike) -> Path:
    body = ([label] + [_fmt(v) for v in stats.as_row().values()] for label, stats in rows)
    return _write_rows(path, ("scenario",) + STATS_COLUMNS, body)


def write_error_power_csv(curve: ErrorPowerCurve, path: PathLike) -> Path:
    rows = ((_fmt(k), _fmt(p)) for k, p in zip(curve.wavenumbers, curve.power))
    return _write_rows(path, ("wavenumber", "power"), rows)


def write_eigenvalues_csv(result: NtkProbeResult, path: PathLike) -> Path:
    rows = (
        (i, _fmt(a), _fmt(b))
        for i, (a, b) in enumerate(zip(result.eigenvalues, result.weighted_eigenvalues))
    )
    return _write_rows(path, ("index", "eigenvalue", "weighted_eigenvalue"), rows)


def write_modes_csv(result: NtkProbeResult, path: PathLike) -> Path:
    """Mode list with the weight used and the kernel diagonals."""
    d = result.modes.shape[1]
    header = tuple(f"xi_{i}" for i in range(d)) + ("omega_re", "omega_im", "k_diag", "kw_diag")
    rows = (
        [_fmt(v) for v in mode]
        + [_fmt(w.real), _fmt(w.imag), _fmt(np.real(k)), _fmt(np.real(kw))]
        for mode, w, k, kw in zip(
            result.modes, result.omega, np.diag(result.kernel), np.diag(result.weighted_kernel)
        )
    )
    return _write_rows(path, header, rows)


def write_alignment_csv(cosine: float, path: PathLike) -> Path:
    return _write_rows(path, ("cosine",), [(_fmt(cosine),)])
