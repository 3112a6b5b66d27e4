import argparse
import asyncio
import logging
import sys
from pathlib import Path

import numpy as np

from common.errors import ConfigError, ContractError, NumericalError, ParameterBudgetError
from config import setup_logging

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _config_from(args):
    from experiments.settings import load_config

    overrides = {
        "pde": getattr(args, "pde", None),
        "seed": getattr(args, "seed", None),
        "output_dir": getattr(args, "out", None),
        "fourier": getattr(args, "fourier", None),
    }
    return load_config(args.config, overrides)


def cmd_train(args) -> int:
    from experiments.outputs import analyze_run, emit_outputs, run_label
    from experiments.training import run_train

    config = _config_from(args)
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
    final = result.records[-1]
    print(f"{config.problem.pde}: iteration {final.iteration}, relative L2 {final.relative_l2:.6e}")
    print(f"Outputs in {config.output_dir}")
    return EXIT_OK


def cmd_solve_reference(args) -> int:
    from experiments.reference import solve_reference
    from experiments.training import build_problem_for, run_streams
    from refsolve.gate import accuracy_gate
    from refsolve.storage import export_csv, save_solution

    config = _config_from(args)
    problem = build_problem_for(config)
    out_dir = Path(config.output_dir)

    if args.gate:
        if problem.spatial_dims != 1:
            raise ConfigError("The accuracy gate is available for 1-D problems")
        report = accuracy_gate(problem, config.reference.resolution, config.reference.dt, tol=args.gate_tol)
        print(
            f"gate N={report.resolution}: max difference {report.max_difference:.3e} "
            f"(tolerance {report.tolerance:.1e}) {'PASSED' if report.passed else 'FAILED'}"
        )
        if not report.passed:
            raise NumericalError(f"Reference for {problem.name} is not resolved at N={report.resolution}")

    grid = solve_reference(config, problem, run_streams(config.seed)["reference"], use_cache=not args.no_cache)
    path = save_solution(grid, out_dir / "reference")
    print(f"Reference {grid.values.shape} written to {path}")
    if grid.spatial_dims == 1:
        print(f"CSV written to {export_csv(grid, out_dir / 'reference.csv')}")
    return EXIT_OK


def cmd_analyze_psd(args) -> int:
    from analysis.reports import write_error_power_csv, write_psd_csv, write_stats_csv
    from experiments.outputs import analyze_run
    from refsolve.storage import load_solution

    run_dir = Path(args.run)
    prediction = load_solution(run_dir / "field")
    reference = load_solution(run_dir / "reference")
    label = args.label or str(prediction.metadata.get("pde", run_dir.name))
    analyses = analyze_run(reference, prediction, label)
    out_dir = Path(args.out) if args.out else run_dir
    write_psd_csv(analyses.psd, out_dir / "psd.csv")
    write_stats_csv(analyses.stats, out_dir / "stats.csv")
    write_error_power_csv(analyses.error_power, out_dir / "error_power.csv")
    for name, stats in analyses.stats:
        print(f"{name}: " + ", ".join(f"{k}={v:.4e}" for k, v in stats.as_row().items()))
    print(f"PSD tables written to {out_dir}")
    return EXIT_OK


def cmd_ntk_probe(args) -> int:
    from analysis.ntk import ntk_probe
    from analysis.reports import write_eigenvalues_csv, write_modes_csv
    from experiments.training import build_problem_for, run_streams
    from jetnet.networks import JetNetwork
    from losses.fourier import grid_basis
    from spectral.weights import weight_build

    config = _config_from(args)
    problem = build_problem_for(config)
    network = config.network.model_copy(update={"width": args.width, "depth": args.depth, "embedding": "none"})
    net = JetNetwork(network, problem.spatial_dims, run_streams(config.seed)["init"])
    basis = grid_basis(problem, [args.grid] * problem.spatial_dims)
    weight = weight_build(config.fourier.build_symbol(), basis.xi, config.fourier.cutoff, config.fourier.normalization)
    times = np.linspace(problem.domain.t_start, problem.domain.t_end, args.slices + 2)[1:-1]

    result = ntk_probe(net, problem, basis, times, weight)
    out_dir = Path(config.output_dir)
    write_eigenvalues_csv(result, out_dir / "ntk_eigenvalues.csv")
    write_modes_csv(result, out_dir / "ntk_modes.csv")
    print(
        f"NTK on {result.kernel.shape[0]} entries: lambda_max={result.eigenvalues[0]:.4e}, "
        f"weighted lambda_max={result.weighted_eigenvalues[0]:.4e}"
    )
    if args.alignment:
        _report_alignment(config, problem, net, basis, times, weight, out_dir)
    print(f"Eigenvalues written to {out_dir}")
    return EXIT_OK


def _report_alignment(config, problem, net, basis, times, weight, out_dir: Path):
    from analysis.alignment import gradient_alignment
    from analysis.reports import write_alignment_csv
    from experiments.training import run_streams
    from losses.sampling import CollocationSampler

    try:
        problem.gradient_spec
    except ContractError as e:
        raise ConfigError(f"--alignment needs a physical-space gradient residual: {e}") from e
    sampler = CollocationSampler(problem.domain)
    points = sampler.interior(run_streams(config.seed)["collocation"], config.collocation.interior)
    cosine = gradient_alignment(problem, net, basis, times, weight, points)
    write_alignment_csv(cosine, out_dir / "alignment.csv")
    print(f"Gradient alignment (Fourier vs physical gradient-enhanced): cosine={cosine:.6f}")


def cmd_selftest(args) -> int:
    from experiments.selftest import run_selftest

    results = run_selftest(args.seed or 0)
    for r in results:
        print(f"  [{'PASS' if r.passed else 'FAIL'}] {r.name}: error {r.error:.3e} (tolerance {r.tolerance:.1e})")
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericalError(f"Self-test suites failed: {', '.join(failed)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from experiments.sweep import run_sweep

    config = _config_from(args)
    seeds = list(range(args.seeds)) if args.seed_list is None else args.seed_list
    out_dir = args.out or str(Path(config.output_dir).parent / f"{config.problem.pde}_sweep")
    results = asyncio.run(run_sweep(config, seeds, out_dir, args.workers))
    errors = np.array([r["relative_l2"] for r in results])
    print(f"{len(results)} runs: median relative L2 {np.median(errors):.6e}, summary in {out_dir}/sweep.csv")
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "solve-reference": cmd_solve_reference,
    "analyze-psd": cmd_analyze_psd,
    "ntk-probe": cmd_ntk_probe,
    "selftest": cmd_selftest,
    "sweep": cmd_sweep,
}


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="TOML or JSON experiment file (config.resolved.json is accepted)")
    parser.add_argument("--pde", choices=["burgers", "allen_cahn", "kdv", "navier_stokes"], help="PDE preset")
    parser.add_argument("--seed", type=int, help="Override the run seed")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--fourier", choices=["grid", "mc", "off"], help="Fourier loss path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Physics-informed networks with a Fourier-space residual loss")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_options(sub.add_parser("train", help="Train one network and write its run tables"))

    solve = sub.add_parser("solve-reference", help="Pseudo-spectral reference solution")
    _add_run_options(solve)
    solve.add_argument("--gate", action="store_true", help="Check the resolution against a doubled mesh first")
    solve.add_argument("--gate-tol", type=float, default=1e-5)
    solve.add_argument("--no-cache", action="store_true", help="Bypass the reference cache")

    psd = sub.add_parser("analyze-psd", help="Error PSD and frequency statistics of a finished run")
    psd.add_argument("--run", required=True, help="Run directory holding field.* and reference.*")
    psd.add_argument("--out", help="Where to write the tables (defaults to the run directory)")
    psd.add_argument("--label", help="Scenario name in stats.csv")

    ntk = sub.add_parser("ntk-probe", help="Neural tangent kernel of the Fourier residual on a small network")
    _add_run_options(ntk)
    ntk.add_argument("--width", type=int, default=8)
    ntk.add_argument("--depth", type=int, default=2)
    ntk.add_argument("--grid", type=int, default=16, help="Mesh points per spatial dimension")
    ntk.add_argument("--slices", type=int, default=1, help="Interior time slices")
    ntk.add_argument(
        "--alignment", action="store_true", help="Also report the cosine between Fourier and gradient-enhanced gradients"
    )

    selftest = sub.add_parser("selftest", help="FFT, Parseval, jet and adjoint checks")
    selftest.add_argument("--seed", type=int, default=0)

    sweep = sub.add_parser("sweep", help="Independent runs over several seeds")
    _add_run_options(sweep)
    sweep.add_argument("--seeds", type=int, default=5, help="Run seeds 0..n-1")
    sweep.add_argument("--seed-list", type=int, nargs="+", help="Explicit seeds")
    sweep.add_argument("--workers", type=int, help="Worker processes (defaults to SWEEP_WORKERS)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ParameterBudgetError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Numerical abort: {e}")
        print(f"Numerical abort: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as e:
        print(f"File not found: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
