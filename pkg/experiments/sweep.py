import asyncio
import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from config import SWEEP_WORKERS
from experiments.outputs import analyze_run, emit_outputs, run_label
from experiments.settings import ExperimentConfig
from experiments.training import run_train

logger = logging.getLogger(__name__)


def run_seed(resolved: Dict, seed: int, out_dir: str) -> Dict:
    """One training run in a worker process; returns its final metrics."""
    config = ExperimentConfig.model_validate(dict(resolved, seed=seed, output_dir=out_dir))
    result = run_train(config)
    emit_outputs(
        result.records,
        analyze_run(result.reference, result.prediction, run_label(config)),
        out_dir,
        config.resolved(),
        result.prediction,
        result.reference,
        result.timings,
    )
    final = result.records[-1]
    return {"seed": seed, "iterations": final.iteration, "relative_l2": final.relative_l2}


async def run_sweep(
    config: ExperimentConfig, seeds: Sequence[int], out_dir: str, workers: Optional[int] = None
) -> List[Dict]:
    """Independent runs, one per seed, dispatched to a process pool from the event loop."""
    workers = workers or SWEEP_WORKERS
    resolved = config.resolved()
    loop = asyncio.get_running_loop()
    logger.info(f"Sweeping {len(seeds)} seeds of {config.problem.pde} with {workers} worker(s)")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            loop.run_in_executor(pool, run_seed, resolved, seed, os.path.join(out_dir, f"seed_{seed}"))
            for seed in seeds
        ]
        results = await asyncio.gather(*futures)
    path = write_sweep_csv(results, Path(out_dir) / "sweep.csv")
    logger.info(f"Sweep finished; summary in {path}")
    return list(results)


def write_sweep_csv(results: Sequence[Dict], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("seed", "iterations", "relative_l2"))
        for row in sorted(results, key=lambda r: r["seed"]):
            writer.writerow((row["seed"], row["iterations"], repr(float(row["relative_l2"]))))
    return path
