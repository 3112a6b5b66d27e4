import dataclasses
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from autodiff.optim import Adam
from autodiff.tape import Tape
from common.errors import NumericalError
from experiments.reference import Evaluator, evaluation_mesh, solve_reference
from experiments.settings import ExperimentConfig
from jetnet.checkpoint import config_hash, save_checkpoint
from jetnet.networks import JetNetwork
from losses.assembler import FourierSettings, LossAssembler, group_gradient_norms
from losses.reduction import QuantileSpec
from losses.sampling import CollocationSampler
from losses.weights import LossWeights, grad_norm_tune
from pdezoo.base import PdeProblem
from pdezoo.registry import build_problem
from refsolve.solution import SolutionGrid

logger = logging.getLogger(__name__)

TERM_COLUMNS = ("physics", "compatibility", "initial", "boundary", "fourier", "total")


@dataclass
class RunRecord:
    iteration: int
    losses: Dict[str, float]
    relative_l2: Optional[float]
    grid_sizes: Optional[Tuple[int, ...]]
    weights: Dict[str, float]


@dataclass
class TrainResult:
    config: ExperimentConfig
    records: List[RunRecord]
    timings: List[Tuple[int, float]]
    net: JetNetwork
    reference: SolutionGrid
    prediction: SolutionGrid
    checkpoint: Optional[Path] = None


def run_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Independent generators so that switching one loss term off leaves the others' draws intact."""
    names = ("init", "collocation", "fourier", "reference")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def build_problem_for(config: ExperimentConfig) -> PdeProblem:
    return build_problem(config.problem.pde, config.problem.coefficients, config.problem.domain)


def build_assembler(config: ExperimentConfig, problem: PdeProblem, net: JetNetwork) -> LossAssembler:
    loss, fourier = config.loss, config.fourier
    weights = LossWeights(loss.physics, loss.boundary, loss.fourier, loss.mode, loss.alpha_ema)
    settings = FourierSettings(
        path=fourier.path,
        symbol=fourier.build_symbol(),
        cutoff=fourier.cutoff,
        normalization=fourier.normalization,
        grid_size_range=tuple(fourier.grid_size_range),
        time_slices=fourier.time_slices,
        mc_samples=fourier.mc_samples,
    )
    colloc = config.collocation
    return LossAssembler(
        problem,
        net,
        weights,
        QuantileSpec(config.quantile.tau, config.quantile.enabled),
        CollocationSampler(problem.domain, colloc.fixed),
        settings,
        colloc.interior,
        colloc.initial,
        colloc.boundary,
    )


def run_train(
    config: ExperimentConfig,
    on_record: Optional[Callable[[RunRecord], None]] = None,
    use_cache: Optional[bool] = None,
) -> TrainResult:
    """Seeded training loop: sample, evaluate losses, backpropagate, Adam step.

    The relative L2 error is evaluated every ``evaluation.every`` iterations and
    after the last one; ``iterations = 0`` evaluates the initial network only.
    """
    out_dir = Path(config.output_dir)
    streams = run_streams(config.seed)
    problem = build_problem_for(config)
    reference = solve_reference(config, problem, streams["reference"], use_cache)
    if problem.name == "navier_stokes" or problem.domain.shape == "triangle":
        problem = dataclasses.replace(problem, reference=reference)
    evaluator = Evaluator(problem, evaluation_mesh(config, reference))

    net = JetNetwork(config.network, problem.spatial_dims, streams["init"])
    assembler = build_assembler(config, problem, net)
    opt = config.optimizer
    optimizer = Adam(opt.lr, opt.beta1, opt.beta2, opt.eps)
    cfg_hash = config_hash(config.resolved())

    records: List[RunRecord] = []
    timings: List[Tuple[int, float]] = []
    last_good = dict(net.params)
    started = time.perf_counter()
    logger.info(
        f"Training {problem.name} for {opt.iterations} iterations: fourier={config.fourier.path}, "
        f"lambda={assembler.weights.as_dict()}, parameters={net.parameter_count}, seed={config.seed}"
    )

    for step in range(opt.iterations + 1):
        tape = Tape()
        try:
            bound = net.bind(tape)
            batch = assembler.draw(streams["collocation"], streams["fourier"])
            report = assembler.evaluate(bound, batch)
            total = report.total.item()
            if not np.isfinite(total):
                raise NumericalError(f"Loss became {total} at iteration {step}")
        except NumericalError as e:
            net.params = last_good
            path = save_checkpoint(
                out_dir / "checkpoint.bin",
                net.named_tensors(),
                config.seed,
                cfg_hash,
                {"iteration": step, "aborted": True},
            )
            logger.error(f"Numerical failure at iteration {step}: {e}. Last good parameters saved to {path}")
            raise

        evaluate = step % config.evaluation.every == 0 or step == opt.iterations
        if evaluate:
            record = RunRecord(
                step,
                report.scalars(),
                evaluator.relative_l2(net),
                batch.sizes,
                assembler.weights.as_dict(),
            )
            records.append(record)
            timings.append((step, time.perf_counter() - started))
            if on_record is not None:
                on_record(record)
        if step % opt.log_every == 0 or evaluate:
            scalars = ", ".join(f"{k}={v:.4e}" for k, v in report.scalars().items())
            error = f", rel_l2={records[-1].relative_l2:.4e}" if evaluate else ""
            logger.info(f"[{step}/{opt.iterations}] {scalars}{error}, grid={batch.sizes}")
        if step == opt.iterations:
            break

        if assembler.weights.mode == "grad_norm" and step % config.loss.tune_every == 0:
            norms = group_gradient_norms(tape, report, bound)
            assembler.weights = grad_norm_tune(norms, assembler.weights)
            logger.debug(f"Retuned loss weights at {step}: {assembler.weights.as_dict()} from norms {norms}")

        grads = tape.gradients(report.total, bound)
        last_good = net.params
        net.params = optimizer.step(net.params, grads)

    checkpoint = save_checkpoint(
        out_dir / "checkpoint.bin",
        net.named_tensors(),
        config.seed,
        cfg_hash,
        {"iteration": opt.iterations},
    )
    logger.info(f"Finished {problem.name}: final relative L2 {records[-1].relative_l2:.4e}")
    return TrainResult(
        config,
        records,
        timings,
        net,
        evaluator.mesh,
        evaluator.prediction_grid(net),
        checkpoint,
    )
