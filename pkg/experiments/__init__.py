from experiments.outputs import RUN_COLUMNS, RunAnalyses, analyze_run, emit_outputs, run_label
from experiments.reference import Evaluator, evaluation_mesh, solve_reference
from experiments.selftest import SUITES, CheckResult, run_selftest
from experiments.settings import ExperimentConfig, deep_merge, load_config, load_preset, read_config_file
from experiments.sweep import run_seed, run_sweep, write_sweep_csv
from experiments.training import TERM_COLUMNS, RunRecord, TrainResult, run_streams, run_train

__all__ = [
    "CheckResult",
    "Evaluator",
    "ExperimentConfig",
    "RUN_COLUMNS",
    "RunAnalyses",
    "RunRecord",
    "SUITES",
    "TERM_COLUMNS",
    "TrainResult",
    "analyze_run",
    "deep_merge",
    "emit_outputs",
    "evaluation_mesh",
    "load_config",
    "load_preset",
    "read_config_file",
    "run_label",
    "run_seed",
    "run_selftest",
    "run_streams",
    "run_sweep",
    "run_train",
    "solve_reference",
    "write_sweep_csv",
]
