from analysis.alignment import gradient_alignment
from analysis.metrics import ErrorPowerCurve, error_power_spectrum, relative_l2
from analysis.ntk import NtkProbeResult, ntk_probe, residual_jacobian, spectral_residual_on
from analysis.psd import STATS_COLUMNS, FrequencyStats, PsdCurve, frequency_stats, percentile_frequency, radial_psd
from analysis.reports import (
    write_alignment_csv,
    write_eigenvalues_csv,
    write_error_power_csv,
    write_modes_csv,
    write_psd_csv,
    write_stats_csv,
)

__all__ = [
    "ErrorPowerCurve",
    "FrequencyStats",
    "NtkProbeResult",
    "PsdCurve",
    "STATS_COLUMNS",
    "error_power_spectrum",
    "frequency_stats",
    "gradient_alignment",
    "ntk_probe",
    "percentile_frequency",
    "radial_psd",
    "relative_l2",
    "residual_jacobian",
    "spectral_residual_on",
    "write_alignment_csv",
    "write_eigenvalues_csv",
    "write_error_power_csv",
    "write_modes_csv",
    "write_psd_csv",
    "write_stats_csv",
]
