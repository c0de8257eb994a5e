"""Desk-scale experiment suites: optimizer comparison, pruning speedup with
paired seeds, and batch-size runtime tables. Each suite emits a CSV."""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .optimize import Constraint, Objective, OptimizerConfig, run
from .pruning import BaseDataset, PruningConfig, pruned_run
from .runtime_cost import (average_total_runtime, default_runtime_model,
                           estimate_runtime)
from .space import load_builtin_space
from .surrogate import SurrogateConfig, simulate
from .workloads import get_workload

__all__ = [
    "evals_to_threshold",
    "optimizer_comparison",
    "pruning_speedup",
    "batch_runtime_table",
    "run_suite",
]


def evals_to_threshold(result, threshold: float, offset: int = 0) -> Optional[int]:
    """Evaluations charged up to the first iteration whose running best
    reached ``threshold``; ``offset`` skips trace prefix entries (e.g. a
    projection-fitting charge) when aligning the best curve with the trace.
    Returns None if the threshold was never reached."""
    counts = result.trace.counts
    for i, value in enumerate(result.history.best_curve):
        if value >= threshold:
            return sum(counts[:i + 1 + offset])
    return None


def _evaluator(space_name: str, workload_name: str, sim_cfg=None):
    workload = get_workload(workload_name)
    cfg = sim_cfg or SurrogateConfig()
    return lambda pt: simulate(pt, workload, cfg)


def _write_rows(out_csv, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def optimizer_comparison(out_csv, space_name: str = "resnet50_22nm",
                         workload: str = "resnet50",
                         seeds: Sequence[int] = tuple(range(10)),
                         iterations: int = 80, batch_size: int = 32,
                         objective_metric: str = "fom",
                         constraints: Mapping[str, float] = ()) -> list:
    """Best objective and convergence speed for each algorithm over seeds."""
    space = load_builtin_space(space_name)
    evaluator = _evaluator(space_name, workload)
    objective = Objective(objective_metric)
    cons = [Constraint(k, v) for k, v in sorted(dict(constraints).items())]
    model = default_runtime_model()
    rows = []
    for algorithm in ("rs", "sa", "ga", "tpe"):
        for seed in seeds:
            cfg = OptimizerConfig(algorithm=algorithm, iterations=iterations,
                                  batch_size=batch_size, seed=seed)
            t0 = time.perf_counter()
            result = run(space, objective, cons, cfg, evaluator,
                         runtime_model=model)
            elapsed = time.perf_counter() - t0
            best = (objective.value(result.best_record)
                    if result.best_record else float("nan"))
            rows.append([algorithm, seed, result.status, repr(best),
                         result.first_best_iteration, len(result.history),
                         repr(result.estimated_runtime_minutes),
                         f"{elapsed:.3f}"])
    _write_rows(out_csv, ["algorithm", "seed", "status", "best_objective",
                          "first_best_iteration", "unique_evaluations",
                          "estimated_runtime_minutes", "wall_seconds"], rows)
    return rows


def pruning_speedup(out_csv, target_space_name: str = "swint_22nm",
                    target_workload: str = "swint",
                    base_space_name: str = "vitb_22nm",
                    base_workload: str = "vitb",
                    seeds: Sequence[int] = tuple(range(10)),
                    iterations: int = 25, batch_size: int = 128,
                    objective_metric: str = "fom",
                    constraints: Mapping[str, float] = (),
                    prune_cfg: Optional[PruningConfig] = None,
                    base: Optional[BaseDataset] = None) -> list:
    """Paired-seed comparison of unpruned vs pruned runs on the same target.

    Per seed and variant the CSV records, besides the best objective, the
    number of unique evaluations spent until the run first reached within
    1% of the exhaustively enumerated target optimum (empty if never).
    """
    target = load_builtin_space(target_space_name)
    evaluator = _evaluator(target_space_name, target_workload)
    objective = Objective(objective_metric)
    cons = [Constraint(k, v) for k, v in sorted(dict(constraints).items())]
    model = default_runtime_model()
    prune_cfg = prune_cfg or PruningConfig()
    if base is None:
        base_space = load_builtin_space(base_space_name)
        base = BaseDataset.build(base_space,
                                 _evaluator(base_space_name, base_workload))
    optimum = max(objective.value(evaluator(pt)) for pt in target.iter_points())
    rows = []
    for seed in seeds:
        cfg = OptimizerConfig(algorithm="sa", iterations=iterations,
                              batch_size=batch_size, seed=seed)
        plain = run(target, objective, cons, cfg, evaluator, runtime_model=model)
        pruned, audit = pruned_run(target, base, objective, cons, cfg,
                                   prune_cfg, evaluator, runtime_model=model)
        for label, result, offset in (("unpruned", plain, 0), ("pruned", pruned, 1)):
            best = (objective.value(result.best_record)
                    if result.best_record else float("nan"))
            hit = evals_to_threshold(result, 0.99 * optimum, offset=offset)
            rows.append([seed, label, result.status, repr(best),
                         "" if hit is None else hit,
                         result.first_best_iteration, len(result.history),
                         repr(result.estimated_runtime_minutes)])
    _write_rows(out_csv, ["seed", "variant", "status", "best_objective",
                          "evals_to_within_1pct", "first_best_iteration",
                          "unique_evaluations", "estimated_runtime_minutes"],
                rows)
    return rows


def batch_runtime_table(out_csv, space_name: str = "resnet50_22nm",
                        workload: str = "resnet50", seed: int = 0,
                        iterations: int = 40,
                        batch_sizes: Sequence[int] = (16, 32, 48)) -> list:
    """Unique-sample counts per algorithm and the resulting estimated total
    runtime, averaged over the heuristic algorithms, per batch size."""
    space = load_builtin_space(space_name)
    evaluator = _evaluator(space_name, workload)
    objective = Objective("fom")
    model = default_runtime_model()
    rows = []
    for batch_size in batch_sizes:
        samples = {}
        for algorithm in ("sa", "ga", "tpe"):
            cfg = OptimizerConfig(algorithm=algorithm, iterations=iterations,
                                  batch_size=batch_size, seed=seed)
            result = run(space, objective, [], cfg, evaluator)
            samples[algorithm] = len(result.history)
        t_batch, _ = model.batch_minutes(batch_size)
        avg = average_total_runtime(samples, batch_size, t_batch)
        rows.append([batch_size, samples["sa"], samples["ga"], samples["tpe"],
                     repr(t_batch), repr(avg)])
    _write_rows(out_csv, ["batch_size", "samples_sa", "samples_ga",
                          "samples_tpe", "batch_minutes",
                          "average_total_runtime_minutes"], rows)
    return rows


SUITES = {
    "optimizer_comparison": optimizer_comparison,
    "pruning_speedup": pruning_speedup,
    "batch_runtime": batch_runtime_table,
}


def run_suite(config_path) -> list:
    """Config file: {"suite": name, "out": csv path, ...keyword overrides}."""
    with open(config_path) as fh:
        cfg = json.load(fh)
    suite = cfg.pop("suite")
    out = cfg.pop("out")
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if "prune_cfg" in cfg:
        cfg["prune_cfg"] = PruningConfig.from_json(cfg["prune_cfg"])
    return SUITES[suite](out, **cfg)
