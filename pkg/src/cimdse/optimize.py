"""Constraint-aware heuristic search over a discrete design space.

Every algorithm follows the same batched loop: generate up to ``batch_size``
candidates from the currently active space, evaluate only points not already
in the history buffer, then update algorithm state. Infeasible points are
kept in history (they inform TPE's bad set and SA rejection) but rank as
-inf and are never reported as best.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence

from .runtime_cost import RunTrace, RuntimeCostModel, estimate_runtime
from .space import DesignPoint, DesignSpace, is_valid
from .surrogate import PpaRecord

__all__ = [
    "Objective",
    "Constraint",
    "SaConfig",
    "GaConfig",
    "TpeConfig",
    "OptimizerConfig",
    "HistoryBuffer",
    "OptResult",
    "OptimizerError",
    "feasible",
    "run",
    "sa_propose",
    "ga_step",
    "tpe_propose",
    "metropolis_accept",
    "write_convergence_csv",
]

OBJECTIVE_METRICS = ("fom", "energy_eff", "compute_eff", "throughput")
CONSTRAINT_METRICS = ("area", "power")


class OptimizerError(ValueError):
    pass


@dataclass(frozen=True)
class Objective:
    metric: str = "fom"  # always maximized

    def __post_init__(self):
        if self.metric not in OBJECTIVE_METRICS:
            raise OptimizerError(f"unknown objective metric {self.metric!r}")

    def value(self, record: PpaRecord) -> float:
        return record.metric(self.metric)


@dataclass(frozen=True)
class Constraint:
    metric: str  # area (mm^2) or power (mW), upper bound
    threshold: float

    def __post_init__(self):
        if self.metric not in CONSTRAINT_METRICS:
            raise OptimizerError(f"unknown constraint metric {self.metric!r}")
        if self.threshold <= 0:
            raise OptimizerError("constraint threshold must be > 0")


def feasible(record: PpaRecord, constraints: Sequence[Constraint]) -> bool:
    """True iff every constrained metric is at or below its threshold."""
    return all(record.metric(c.metric) <= c.threshold for c in constraints)


@dataclass(frozen=True)
class SaConfig:
    initial_temp: Optional[float] = None  # None: 10% of initial best objective
    cooling: float = 0.95


@dataclass(frozen=True)
class GaConfig:
    parent_pool: int = 8
    mutation_rate: float = 0.15
    crossover_rate: float = 0.9


@dataclass(frozen=True)
class TpeConfig:
    quantile: float = 0.2  # good/bad split
    pool_size: int = 64


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: str = "rs"  # rs | sa | ga | tpe
    iterations: int = 80
    batch_size: int = 32
    seed: int = 0
    sa: SaConfig = field(default_factory=SaConfig)
    ga: GaConfig = field(default_factory=GaConfig)
    tpe: TpeConfig = field(default_factory=TpeConfig)

    def __post_init__(self):
        if self.algorithm not in ("rs", "sa", "ga", "tpe"):
            raise OptimizerError(f"unknown algorithm {self.algorithm!r}")
        if self.iterations < 1 or self.batch_size < 1:
            raise OptimizerError("iterations and batch_size must be >= 1")
        for rate in (self.ga.mutation_rate, self.ga.crossover_rate, self.sa.cooling,
                     self.tpe.quantile):
            if not (0 < rate <= 1):
                raise OptimizerError("rates must lie in (0, 1]")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj) -> "OptimizerConfig":
        kw = dict(obj)
        if "sa" in kw:
            kw["sa"] = SaConfig(**kw["sa"])
        if "ga" in kw:
            kw["ga"] = GaConfig(**kw["ga"])
        if "tpe" in kw:
            kw["tpe"] = TpeConfig(**kw["tpe"])
        return cls(**kw)


class HistoryBuffer:
    """Deduplicating evaluation cache plus best-feasible tracking."""

    def __init__(self, objective: Objective):
        self.objective = objective
        self.entries: dict[DesignPoint, tuple[PpaRecord, bool]] = {}
        self.best_point: Optional[DesignPoint] = None
        self.best_record: Optional[PpaRecord] = None
        self.iteration_counts: list[int] = []
        self.best_curve: list[float] = []  # best-so-far objective per iteration

    def __contains__(self, point: DesignPoint) -> bool:
        return point in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def record(self, point: DesignPoint, record: PpaRecord, is_feasible: bool) -> None:
        if point in self.entries:
            return
        self.entries[point] = (record, is_feasible)
        if is_feasible:
            val = self.objective.value(record)
            # ties keep the first-discovered point (stable across reruns)
            if self.best_record is None or val > self.objective.value(self.best_record):
                self.best_point, self.best_record = point, record

    def score(self, point: DesignPoint) -> float:
        record, ok = self.entries[point]
        return self.objective.value(record) if ok else float("-inf")

    def top_feasible(self, k: int) -> list[DesignPoint]:
        pts = [p for p, (_, ok) in self.entries.items() if ok]
        pts.sort(key=self.score, reverse=True)
        return pts[:k]

    @property
    def trace(self) -> RunTrace:
        return RunTrace(tuple(self.iteration_counts))


@dataclass
class OptResult:
    status: str  # ok | exhausted_infeasible
    best_point: Optional[DesignPoint]
    best_record: Optional[PpaRecord]
    history: HistoryBuffer
    trace: RunTrace
    first_best_iteration: Optional[int]
    estimated_runtime_minutes: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "best_point": self.best_point.assignments if self.best_point else None,
            "best_record": self.best_record.to_json() if self.best_record else None,
            "first_best_iteration": self.first_best_iteration,
            "estimated_runtime_minutes": self.estimated_runtime_minutes,
            "trace": list(self.trace.counts),
            "best_curve": list(self.history.best_curve),
            "notes": list(self.notes),
            "history": [
                {"point": p.assignments, "record": r.to_json(), "feasible": ok}
                for p, (r, ok) in self.history.entries.items()
            ],
        }


def metropolis_accept(delta: float, temperature: float, rng: random.Random) -> bool:
    """Accept a candidate worse by ``delta`` (>= 0) with prob exp(-delta/T)."""
    if delta <= 0:
        return True
    if temperature <= 0:
        return False
    return rng.random() < math.exp(-delta / temperature)


def sa_propose(current: DesignPoint, space: DesignSpace, rng: random.Random,
               max_tries: int = 64) -> DesignPoint:
    """Perturb 1..2 parameters to random admissible values; always differs
    from ``current`` in at least one parameter and is valid in ``space``."""
    names = [p.name for p in space.params if len(p.values) > 1]
    if not names:
        return current
    for _ in range(max_tries):
        k = min(rng.randint(1, 2), len(names))
        chosen = rng.sample(names, k)
        candidate = current
        for i, name in enumerate(chosen):
            values = list(space.param(name).values)
            if i == 0:
                cur = current[name] if name in current else None
                values = [v for v in values if v != cur] or values
            candidate = candidate.replace(name, rng.choice(values))
        if candidate != current and is_valid(candidate, space):
            return candidate
    return space.random_point(rng)  # random restart


def _mutate(child: dict, space: DesignSpace, rate: float, rng: random.Random) -> dict:
    for p in space.params:
        if rng.random() < rate:
            child[p.name] = rng.choice(p.values)
    return child


def ga_step(parents: Sequence[DesignPoint], space: DesignSpace, cfg: GaConfig,
            batch_size: int, rng: random.Random, max_tries: int = 64) -> list[DesignPoint]:
    """Uniform crossover of two sampled parents, then per-parameter mutation."""
    if len(parents) < 2:
        raise OptimizerError("ga_step needs at least 2 parents")
    children = []
    for _ in range(batch_size):
        for _ in range(max_tries):
            pa, pb = rng.sample(list(parents), 2)
            if rng.random() < cfg.crossover_rate:
                child = {p.name: (pa if rng.random() < 0.5 else pb)[p.name]
                         for p in space.params}
            else:
                child = {p.name: pa[p.name] for p in space.params}
            child = _mutate(child, space, cfg.mutation_rate, rng)
            point = DesignPoint.of(child)
            if is_valid(point, space):
                children.append(point)
                break
        else:
            children.append(space.random_point(rng))
    return children


def _smoothed_density(points: Sequence[DesignPoint], param) -> dict:
    # add-one smoothing over the parameter's admissible values
    counts = {v: 1.0 for v in param.values}
    for pt in points:
        if param.name in pt and pt[param.name] in counts:
            counts[pt[param.name]] += 1.0
    total = sum(counts.values())
    return {v: c / total for v, c in counts.items()}


def tpe_propose(history: HistoryBuffer, space: DesignSpace, cfg: TpeConfig,
                batch_size: int, rng: random.Random) -> tuple[list[DesignPoint], bool]:
    """Candidates sampled from the good-set density, ranked by good/bad
    density ratio. Returns (points, uniform_fallback_flag)."""
    if not history.entries:
        raise OptimizerError("tpe_propose needs a nonempty history")
    feasible_pts = [p for p, (_, ok) in history.entries.items() if ok]
    if not feasible_pts:
        return ([space.random_point(rng) for _ in range(batch_size)], True)

    ranked = sorted(history.entries, key=history.score, reverse=True)
    n_good = max(1, math.ceil(cfg.quantile * len(ranked)))
    good, bad = ranked[:n_good], ranked[n_good:]
    g = {p.name: _smoothed_density(good, p) for p in space.params}
    b = {p.name: _smoothed_density(bad, p) for p in space.params}

    def draw(density: dict):
        values = list(density)
        weights = [density[v] for v in values]
        return rng.choices(values, weights=weights, k=1)[0]

    pool = []
    seen = set()
    for _ in range(cfg.pool_size * 4):
        if len(pool) >= cfg.pool_size:
            break
        pt = DesignPoint.of({p.name: draw(g[p.name]) for p in space.params})
        if pt in seen or not is_valid(pt, space):
            continue
        seen.add(pt)
        pool.append(pt)
    if not pool:
        return ([space.random_point(rng) for _ in range(batch_size)], True)

    def ratio(pt: DesignPoint) -> float:
        score = 0.0
        for p in space.params:
            score += math.log(g[p.name][pt[p.name]]) - math.log(b[p.name][pt[p.name]])
        return score

    pool.sort(key=ratio, reverse=True)
    return pool[:batch_size], False


class _RsState:
    """Shuffled exhaustive order over the active space; re-enumerates when
    the active space changes so full-coverage budgets hit every point."""

    def __init__(self):
        self.space = None
        self.order: list[DesignPoint] = []
        self.pos = 0

    def propose(self, space: DesignSpace, batch_size: int, history: HistoryBuffer,
                rng: random.Random) -> list[DesignPoint]:
        if space is not self.space:
            self.space = space
            self.order = list(space.iter_points())
            rng.shuffle(self.order)
            self.pos = 0
        out = []
        while len(out) < batch_size and self.pos < len(self.order):
            pt = self.order[self.pos]
            self.pos += 1
            if pt not in history:
                out.append(pt)
        while len(out) < batch_size and self.order:
            out.append(rng.choice(self.order))  # space exhausted: cached resamples
        return out


def run(space: DesignSpace, objective: Objective, constraints: Sequence[Constraint],
        cfg: OptimizerConfig, evaluator: Callable[[DesignPoint], PpaRecord],
        runtime_model: Optional[RuntimeCostModel] = None,
        iteration_hook: Optional[Callable] = None,
        history: Optional[HistoryBuffer] = None) -> OptResult:
    """Execute the batched search loop.

    ``iteration_hook(i, history, active_space) -> (active_space, extra_evals)``
    lets middleware swap the active space per iteration (pruning/recovery) and
    charge verification evaluations to the iteration's unique-eval count.
    """
    rng = random.Random(cfg.seed)
    history = history if history is not None else HistoryBuffer(objective)
    notes: list = []

    sa_current: Optional[DesignPoint] = None
    sa_temp: Optional[float] = None
    rs_state = _RsState()
    active = space

    def evaluate_batch(points: Sequence[DesignPoint]) -> int:
        new = 0
        seen = set()
        for pt in points:
            if pt in history or pt in seen:
                continue
            seen.add(pt)
            record = evaluator(pt)
            history.record(pt, record, feasible(record, constraints))
            new += 1
        return new

    for i in range(1, cfg.iterations + 1):
        extra = 0
        if iteration_hook is not None:
            active, extra = iteration_hook(i, history, active)

        if cfg.algorithm == "rs":
            candidates = rs_state.propose(active, cfg.batch_size, history, rng)
        elif cfg.algorithm == "sa":
            if sa_current is None or not is_valid(sa_current, active):
                sa_current = active.random_point(rng)
            candidates = [sa_propose(sa_current, active, rng)
                          for _ in range(cfg.batch_size)]
        elif cfg.algorithm == "ga":
            parents = history.top_feasible(cfg.ga.parent_pool)
            if len(parents) >= 2:
                candidates = ga_step(parents, active, cfg.ga, cfg.batch_size, rng)
            else:
                candidates = [active.random_point(rng) for _ in range(cfg.batch_size)]
        else:  # tpe
            if history.entries:
                candidates, fallback = tpe_propose(history, active, cfg.tpe,
                                                   cfg.batch_size, rng)
                if fallback and "tpe_uniform_fallback" not in notes:
                    notes.append("tpe_uniform_fallback")
            else:
                candidates = [active.random_point(rng) for _ in range(cfg.batch_size)]

        new_evals = evaluate_batch(candidates)
        history.iteration_counts.append(new_evals + extra)

        # state update
        if cfg.algorithm == "sa":
            if sa_current not in history:
                # seed chain on first iteration
                record = evaluator(sa_current)
                history.record(sa_current, record, feasible(record, constraints))
                history.iteration_counts[-1] += 1
            if sa_temp is None:
                base = cfg.sa.initial_temp
                if base is None:
                    ref = history.best_record
                    scale = abs(objective.value(ref)) if ref is not None else 1.0
                    base = 0.1 * scale if scale > 0 else 1.0
                sa_temp = base
            cur_score = history.score(sa_current)
            accepted = []
            for pt in candidates:
                if pt not in history:
                    continue
                cand = history.score(pt)
                delta = cur_score - cand  # >0 means worse
                if cand == float("-inf"):
                    continue
                if metropolis_accept(max(delta, 0.0), sa_temp, rng):
                    accepted.append(pt)
            if accepted:
                sa_current = max(accepted, key=history.score)
            sa_temp *= cfg.sa.cooling

        best = objective.value(history.best_record) if history.best_record else float("nan")
        history.best_curve.append(best)

    if history.best_point is None:
        result = OptResult("exhausted_infeasible", None, None, history,
                           history.trace, None, notes=notes)
    else:
        target = objective.value(history.best_record)
        first = next(i + 1 for i, v in enumerate(history.best_curve)
                     if v == target)
        result = OptResult("ok", history.best_point, history.best_record, history,
                           history.trace, first, notes=notes)
    if runtime_model is not None:
        result.estimated_runtime_minutes = estimate_runtime(result.trace, runtime_model)
    return result


def write_convergence_csv(result: OptResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_so_far"])
        for i, v in enumerate(result.history.best_curve, start=1):
            writer.writerow([i, repr(v)])
