import asyncio
import json
import os

import numpy as np
import pytest

import cli
from common.errors import ConfigError, NumericalError
from experiments.outputs import RUN_COLUMNS, analyze_run, emit_outputs, record_row, run_label
from experiments.selftest import SUITES, run_selftest
from experiments.settings import ExperimentConfig, deep_merge, load_config, load_preset
from experiments.sweep import run_sweep, write_sweep_csv
from experiments.training import RunRecord, run_streams, run_train

TINY = {
    "network": {"depth": 1, "width": 8, "embedding": "none"},
    "fourier": {"grid_size_range": [16, 20], "time_slices": 2, "mc_samples": 16},
    "collocation": {"interior": 16, "initial": 8, "boundary": 8},
    "optimizer": {"iterations": 3, "log_every": 1},
    "evaluation": {"every": 2, "space_points": 32, "time_points": 11},
    "reference": {"resolution": 64, "dt": 1e-3},
}


def write_config(tmp_path, name="tiny.json", **sections):
    path = tmp_path / name
    path.write_text(json.dumps(deep_merge(TINY, sections)))
    return path


def tiny_config(tmp_path, out="run", **sections):
    return load_config(write_config(tmp_path, f"{out}.json", **sections), {"output_dir": str(tmp_path / out)})


def test_presets_fill_every_section(isolated_outputs):
    config = load_config(overrides={"pde": "burgers"})
    assert config.problem.pde == "burgers"
    assert config.fourier.path == "mc"
    assert (config.network.depth, config.network.width) == (4, 128)
    assert config.evaluation.every == 250
    assert config.output_dir == os.path.join(str(isolated_outputs / "runs"), "burgers_seed0")


def test_overrides_take_precedence():
    config = load_config(overrides={"pde": "allen_cahn", "seed": 7, "fourier": "off"})
    assert config.seed == 7
    assert config.fourier.path == "off"
    assert config.output_dir.endswith("allen_cahn_seed7")


def test_navier_stokes_network_has_two_outputs():
    assert load_config(overrides={"pde": "navier_stokes"}).network.output_dim == 2


@pytest.mark.parametrize(
    "sections",
    [
        {"problem": {"pde": "allen_cahn", "domain": "triangle"}},
        {"problem": {"pde": "burgers", "domain": "triangle"}, "fourier": {"path": "grid"}},
        {"optimizer": {"lr": -1.0}},
        {"loss": {"physics": 0.0, "boundary": 0.0, "fourier": 0.0}},
        {"fourier": {"grid_size_range": [32, 16]}},
        {"reference": {"resolution": 100}},
        {"quantile": {"tau": 0.0}},
        {"training": {"epochs": 10}},
    ],
)
def test_invalid_configs_raise_config_error(tmp_path, sections):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, **sections))


def test_unreadable_config_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    broken = tmp_path / "broken.toml"
    broken.write_text("[problem\npde = ")
    with pytest.raises(ConfigError):
        load_config(broken)
    with pytest.raises(ConfigError):
        load_preset("heat")


def test_resolved_config_round_trips(tmp_path):
    config = tiny_config(tmp_path, problem={"pde": "burgers"})
    path = tmp_path / "config.resolved.json"
    path.write_text(json.dumps(config.resolved()))
    assert load_config(path).resolved() == config.resolved()


def test_deep_merge_leaves_inputs_alone():
    base = {"a": {"b": 1, "c": [1]}, "d": 2}
    merged = deep_merge(base, {"a": {"b": 3}})
    assert merged == {"a": {"b": 3, "c": [1]}, "d": 2}
    assert base["a"]["b"] == 1


def test_run_label():
    assert run_label(load_config(overrides={"pde": "allen_cahn"})) == "allen_cahn_enhanced"
    assert run_label(load_config(overrides={"pde": "allen_cahn", "fourier": "off"})) == "allen_cahn_vanilla"


def test_run_streams_are_reproducible_and_independent():
    first, second = run_streams(3), run_streams(3)
    assert set(first) == {"init", "collocation", "fourier", "reference"}
    draws = {name: rng.random(4) for name, rng in first.items()}
    for name, rng in second.items():
        np.testing.assert_array_equal(rng.random(4), draws[name])
    assert not np.array_equal(draws["init"], draws["collocation"])


def test_zero_iterations_evaluates_the_initial_network(tmp_path):
    config = tiny_config(tmp_path, optimizer={"iterations": 0})
    result = run_train(config)
    assert [r.iteration for r in result.records] == [0]
    assert np.isfinite(result.records[0].relative_l2)
    assert result.prediction.values.shape == (11, 32)
    assert result.checkpoint.exists()


def test_training_records_on_the_evaluation_cadence(tmp_path):
    seen = []
    result = run_train(tiny_config(tmp_path), on_record=seen.append)
    assert [r.iteration for r in result.records] == [0, 2, 3]
    assert seen == result.records
    assert [i for i, _ in result.timings] == [0, 2, 3]
    assert set(result.records[-1].losses) == {"physics", "initial", "boundary", "fourier", "total"}


def _run_csv(config):
    result = run_train(config)
    emit_outputs(result.records, None, config.output_dir)
    with open(os.path.join(config.output_dir, "run.csv"), "rb") as f:
        return f.read()


def test_runs_are_deterministic(tmp_path):
    first = _run_csv(tiny_config(tmp_path, out="a"))
    second = _run_csv(tiny_config(tmp_path, out="b"))
    assert first == second


def test_zero_fourier_weight_reproduces_the_vanilla_run(tmp_path):
    vanilla = run_train(tiny_config(tmp_path, out="off", fourier={"path": "off"}))
    zero = run_train(tiny_config(tmp_path, out="zero", fourier={"path": "grid"}, loss={"fourier": 0.0}))
    assert [(r.losses, r.relative_l2) for r in zero.records] == [(r.losses, r.relative_l2) for r in vanilla.records]
    np.testing.assert_array_equal(zero.prediction.values, vanilla.prediction.values)


def test_monte_carlo_run_on_the_triangle(tmp_path):
    config = tiny_config(
        tmp_path, problem={"pde": "burgers", "domain": "triangle"}, fourier={"path": "mc"}, loss={"fourier": 0.1}
    )
    result = run_train(config)
    assert np.isfinite(result.records[-1].relative_l2)
    assert result.records[-1].losses["fourier"] > 0


def test_grad_norm_weighting_moves_the_weights(tmp_path):
    config = tiny_config(tmp_path, loss={"mode": "grad_norm", "tune_every": 1, "fourier": 0.1})
    result = run_train(config)
    assert result.records[-1].weights != result.records[0].weights


def test_outputs_with_nothing_to_report_are_header_only(tmp_path):
    emit_outputs([], None, tmp_path / "empty")
    lines = {name: (tmp_path / "empty" / name).read_text().splitlines() for name in os.listdir(tmp_path / "empty")}
    assert lines["run.csv"] == [",".join(RUN_COLUMNS)]
    assert lines["timing.csv"] == ["iteration,wall_seconds"]
    assert lines["psd.csv"] == ["frequency,power"]
    assert lines["error_power.csv"] == ["wavenumber,power"]
    assert len(lines["stats.csv"]) == 1


def test_record_row_formats_missing_values():
    record = RunRecord(5, {"physics": 0.5, "total": 1.25}, None, (64,), {"physics": 1.0, "boundary": 10.0})
    row = dict(zip(RUN_COLUMNS, record_row(record)))
    assert row["iteration"] == "5"
    assert row["physics"] == "0.5"
    assert row["fourier"] == ""
    assert row["relative_l2"] == ""
    assert row["grid_sizes"] == "64"
    assert row["lambda_fourier"] == ""


def test_full_outputs_of_a_run(tmp_path):
    config = tiny_config(tmp_path)
    result = run_train(config)
    analyses = analyze_run(result.reference, result.prediction, run_label(config))
    emit_outputs(
        result.records,
        analyses,
        config.output_dir,
        config.resolved(),
        result.prediction,
        result.reference,
        result.timings,
    )
    out = tmp_path / "run"
    for name in ("run.csv", "timing.csv", "psd.csv", "stats.csv", "error_power.csv", "field.bin", "field.json"):
        assert (out / name).exists(), name
    assert (out / "reference.bin").exists() and (out / "checkpoint.bin").exists()
    stats = (out / "stats.csv").read_text().splitlines()
    assert stats[1].startswith("allen_cahn_enhanced,")
    assert json.loads((out / "config.resolved.json").read_text())["seed"] == 0


def test_selftest_suites_pass():
    results = run_selftest(0)
    assert len(results) == len(SUITES)
    failed = [(r.name, r.error) for r in results if not r.passed]
    assert not failed


def test_sweep_csv_is_sorted_by_seed(tmp_path):
    rows = [{"seed": 2, "iterations": 3, "relative_l2": 0.5}, {"seed": 0, "iterations": 3, "relative_l2": 0.25}]
    lines = write_sweep_csv(rows, tmp_path / "sweep.csv").read_text().splitlines()
    assert lines == ["seed,iterations,relative_l2", "0,3,0.25", "2,3,0.5"]


@pytest.mark.slow
def test_sweep_runs_each_seed(tmp_path):
    config = tiny_config(tmp_path, reference={"use_cache": False})
    results = asyncio.run(run_sweep(config, [0, 1], str(tmp_path / "sweep"), workers=2))
    assert sorted(r["seed"] for r in results) == [0, 1]
    assert (tmp_path / "sweep" / "sweep.csv").exists()
    assert (tmp_path / "sweep" / "seed_1" / "run.csv").exists()


@pytest.mark.slow
def test_navier_stokes_run(tmp_path):
    config = tiny_config(
        tmp_path,
        problem={"pde": "navier_stokes"},
        fourier={"path": "grid"},
        loss={"fourier": 0.1},
        reference={"resolution": 64, "dt": 1e-2},
        evaluation={"every": 2, "space_points": 16, "time_points": 5},
    )
    result = run_train(config)
    assert result.reference.values.shape == (5, 16, 16)
    assert set(result.records[-1].losses) >= {"physics", "compatibility", "fourier"}


# preset runs cut to a CI-sized step count; KdV keeps its full schedule
ACCEPTANCE_ITERATIONS = {"allen_cahn": 2000, "kdv": 2000}
ACCEPTANCE_SEEDS = range(5)


def preset_pair(tmp_path, pde, seed):
    """Enhanced and vanilla runs of a preset that differ only in the Fourier path."""
    path = tmp_path / f"{pde}.json"
    path.write_text(json.dumps({"optimizer": {"iterations": ACCEPTANCE_ITERATIONS[pde]}}))
    runs = {}
    for fourier in (None, "off"):
        out = tmp_path / f"{pde}_{fourier or 'on'}_seed{seed}"
        config = load_config(path, {"pde": pde, "seed": seed, "fourier": fourier, "output_dir": str(out)})
        runs[run_label(config).rsplit("_", 1)[-1]] = run_train(config)
    return runs["enhanced"], runs["vanilla"]


def top_quartile_log_power(result):
    curve = analyze_run(result.reference, result.prediction, "run").error_power
    high = curve.wavenumbers >= np.quantile(curve.wavenumbers, 0.75)
    return float(np.mean(np.log(curve.power[high] + 1e-300)))


@pytest.mark.slow
def test_allen_cahn_enhanced_median_error_is_no_worse(tmp_path):
    enhanced, vanilla = [], []
    for seed in ACCEPTANCE_SEEDS:
        with_fourier, without = preset_pair(tmp_path, "allen_cahn", seed)
        enhanced.append(with_fourier.records[-1].relative_l2)
        vanilla.append(without.records[-1].relative_l2)
    assert np.median(enhanced) <= np.median(vanilla)


@pytest.mark.slow
def test_kdv_enhanced_runs_shift_error_out_of_high_frequencies(tmp_path):
    lower_high_band, higher_mid_ratio = 0, 0
    for seed in ACCEPTANCE_SEEDS:
        enhanced, vanilla = preset_pair(tmp_path, "kdv", seed)
        lower_high_band += top_quartile_log_power(enhanced) < top_quartile_log_power(vanilla)
        ratios = [analyze_run(r.reference, r.prediction, "run").stats[0][1].ratio_high for r in (enhanced, vanilla)]
        higher_mid_ratio += ratios[0] > ratios[1]
    assert lower_high_band >= 3
    assert higher_mid_ratio >= 3


def test_cli_train_writes_outputs(tmp_path, capsys):
    path = write_config(tmp_path)
    code = cli.main(["train", "--config", str(path), "--out", str(tmp_path / "cli")])
    assert code == cli.EXIT_OK
    assert (tmp_path / "cli" / "run.csv").exists()
    assert "relative L2" in capsys.readouterr().out


def test_cli_analyze_psd_rereads_a_run(tmp_path):
    path = write_config(tmp_path)
    assert cli.main(["train", "--config", str(path), "--out", str(tmp_path / "cli")]) == cli.EXIT_OK
    assert cli.main(["analyze-psd", "--run", str(tmp_path / "cli"), "--out", str(tmp_path / "psd")]) == cli.EXIT_OK
    assert (tmp_path / "psd" / "stats.csv").exists()


def test_cli_reports_configuration_errors(tmp_path):
    path = write_config(tmp_path, problem={"pde": "kdv", "domain": "triangle"})
    assert cli.main(["train", "--config", str(path)]) == cli.EXIT_CONFIG
    assert cli.main(["train", "--config", str(tmp_path / "missing.toml")]) == cli.EXIT_CONFIG


def test_cli_reports_numerical_aborts(tmp_path, monkeypatch):
    def explode(config, *args, **kwargs):
        raise NumericalError("loss became nan")

    monkeypatch.setattr("experiments.training.run_train", explode)
    assert cli.main(["train", "--config", str(write_config(tmp_path))]) == cli.EXIT_NUMERICAL


def test_cli_missing_run_directory(tmp_path):
    assert cli.main(["analyze-psd", "--run", str(tmp_path / "nowhere")]) == cli.EXIT_FAILURE


def test_cli_ntk_probe(tmp_path):
    path = write_config(tmp_path, problem={"pde": "burgers"})
    code = cli.main(["ntk-probe", "--config", str(path), "--out", str(tmp_path / "ntk"), "--grid", "8"])
    assert code == cli.EXIT_OK
    lines = (tmp_path / "ntk" / "ntk_eigenvalues.csv").read_text().splitlines()
    assert len(lines) == 1 + 8


def test_cli_ntk_probe_reports_gradient_alignment(tmp_path, capsys):
    path = write_config(tmp_path, problem={"pde": "burgers"})
    argv = ["ntk-probe", "--config", str(path), "--out", str(tmp_path / "ntk"), "--grid", "8", "--alignment"]
    assert cli.main(argv) == cli.EXIT_OK
    lines = (tmp_path / "ntk" / "alignment.csv").read_text().splitlines()
    assert lines[0] == "cosine"
    assert -1.0 <= float(lines[1]) <= 1.0
    assert "cosine=" in capsys.readouterr().out


def test_cli_alignment_needs_a_gradient_residual(tmp_path):
    path = write_config(tmp_path, problem={"pde": "kdv"})
    argv = ["ntk-probe", "--config", str(path), "--out", str(tmp_path / "ntk"), "--grid", "8", "--alignment"]
    assert cli.main(argv) == cli.EXIT_CONFIG
    assert (tmp_path / "ntk" / "ntk_eigenvalues.csv").exists()
    assert not (tmp_path / "ntk" / "alignment.csv").exists()


def test_cli_solve_reference(tmp_path):
    path = write_config(tmp_path, problem={"pde": "burgers"})
    assert cli.main(["solve-reference", "--config", str(path), "--out", str(tmp_path / "ref")]) == cli.EXIT_OK
    assert (tmp_path / "ref" / "reference.bin").exists()
    assert (tmp_path / "ref" / "reference.csv").exists()


def test_cli_gate_is_one_dimensional_only(tmp_path):
    path = write_config(tmp_path, problem={"pde": "navier_stokes"})
    assert cli.main(["solve-reference", "--config", str(path), "--gate"]) == cli.EXIT_CONFIG


def test_config_model_rejects_negative_seed():
    with pytest.raises(ValueError):
        ExperimentConfig(seed=-1)
