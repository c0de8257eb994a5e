"""Transfer-driven design-space pruning.

Three stages wrap any optimizer run:

1. constraint projection: fit per-(memory type, constraint) power laws
   ``Y = exp(a0) * X**a1`` mapping base-space metrics to target-space
   metrics, from boundary-combination samples (OLS in log-log domain);
2. Top-K pruning: project constraints over the enumerated shared space,
   drop predicted violators, then restrict each shared target parameter to
   the value bins frequent among the top base-space performers;
3. stochastic de-pruning: periodically verify excluded values by
   substituting them into top-performing baselines and restore each with
   probability min(win_rate * gamma, 1); at the recovery iteration the full
   space returns.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .optimize import (Constraint, HistoryBuffer, Objective, OptResult,
                       OptimizerConfig, feasible, run)
from .runtime_cost import RuntimeCostModel
from .space import (DesignPoint, DesignSpace, complete_point, discretize_bins,
                    intersection, is_valid)
from .surrogate import PpaRecord

__all__ = [
    "BaseDataset",
    "ProjectionModel",
    "PruningConfig",
    "DepruneReport",
    "PruningError",
    "DegenerateFitError",
    "ProjectionInfeasibleError",
    "fit_projection",
    "project",
    "topk_prune",
    "deprune",
    "pruned_run",
    "restore_probability",
]

FIT_KEYS = ("rowACIM", "colACIM", "typeADC", "levelADC", "muxColADC",
            "rowDCIM", "colDCIM")


class PruningError(ValueError):
    pass


class DegenerateFitError(PruningError):
    """Fewer than 2 distinct X values for some (memory type, constraint)."""


class ProjectionInfeasibleError(PruningError):
    """No shared design point survives projected-constraint filtering."""


class BaseDataset:
    """Complete PPA records for every valid point of a base space."""

    def __init__(self, space: DesignSpace, records: Mapping[DesignPoint, PpaRecord]):
        self.space = space
        self.records = dict(records)

    @classmethod
    def build(cls, space: DesignSpace, evaluator) -> "BaseDataset":
        return cls(space, {pt: evaluator(pt) for pt in space.iter_points()})

    def fetch(self, point: DesignPoint) -> PpaRecord:
        return self.records[point]

    def fetch_partial(self, partial: Mapping) -> PpaRecord:
        """Fetch by a partial assignment, completing base-only parameters
        with schema defaults."""
        return self.records[complete_point(partial, self.space)]

    def validate_complete(self) -> None:
        missing = [pt for pt in self.space.iter_points() if pt not in self.records]
        if missing:
            raise PruningError(f"{len(missing)} points missing from base dataset")

    def save(self, path, schema_name: str = "") -> None:
        path = Path(path)
        with open(path, "w") as fh:
            for pt, rec in self.records.items():
                fh.write(json.dumps({"point": pt.assignments,
                                     "record": rec.to_json()}) + "\n")
        manifest = {"schema": schema_name, "space": self.space.to_json(),
                    "records": len(self.records)}
        with open(path.with_suffix(path.suffix + ".manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2)

    @classmethod
    def load(cls, path) -> "BaseDataset":
        path = Path(path)
        with open(path.with_suffix(path.suffix + ".manifest.json")) as fh:
            manifest = json.load(fh)
        space = DesignSpace.from_json(manifest["space"])
        records = {}
        with open(path) as fh:
            for line in fh:
                obj = json.loads(line)
                records[DesignPoint.of(obj["point"])] = PpaRecord.from_json(obj["record"])
        return cls(space, records)


@dataclass(frozen=True)
class ProjectionModel:
    coeffs: tuple  # of ((memory_type, constraint_metric), (a0, a1))
    diagnostics: tuple = ()  # of ((m, c), {"samples": n, "rss": float})

    def get(self, memory_type: str, metric: str) -> tuple[float, float]:
        for (m, c), ab in self.coeffs:
            if m == memory_type and c == metric:
                return ab
        raise PruningError(f"no projection for ({memory_type}, {metric})")

    def to_json(self) -> dict:
        return {
            "coeffs": [{"memory_type": m, "metric": c, "a0": a0, "a1": a1}
                       for (m, c), (a0, a1) in self.coeffs],
            "diagnostics": [{"memory_type": m, "metric": c, **d}
                            for (m, c), d in self.diagnostics],
        }


@dataclass(frozen=True)
class PruningConfig:
    rho: float = 0.2  # Top-K ratio
    tau: float = 0.85  # bin retention threshold
    fit_budget: int = 32  # samples per memory type for projection fitting
    verify_budget: int = 8  # de-prune verification evaluations per call
    gamma0: float = 1.0
    gamma_mult: float = 3.0
    deprune_interval: int = 2
    deprune_stop_iter: int = 8
    recovery_iter: int = 20
    baseline_pool: int = 5  # top feasible history entries used as baselines
    tau_mode: str = "cumulative"  # cumulative | per_bin

    def __post_init__(self):
        if not (0 < self.rho <= 1) or not (0 < self.tau <= 1):
            raise PruningError("rho and tau must lie in (0, 1]")
        if self.deprune_stop_iter > self.recovery_iter:
            raise PruningError("deprune_stop_iter must be <= recovery_iter")
        if min(self.fit_budget, self.verify_budget, self.deprune_interval,
               self.baseline_pool) < 1:
            raise PruningError("budgets and intervals must be >= 1")
        if self.tau_mode not in ("cumulative", "per_bin"):
            raise PruningError(f"unknown tau_mode {self.tau_mode!r}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj) -> "PruningConfig":
        return cls(**obj)


@dataclass
class DepruneReport:
    entries: list = field(default_factory=list)
    evaluations: int = 0
    gamma: float = 1.0

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "evaluations": self.evaluations,
                "entries": list(self.entries)}


def restore_probability(n_win: int, n_samples: int, gamma: float) -> float:
    """min(win_rate * gamma, 1.0)."""
    if n_samples < 1:
        return 0.0
    return min(n_win / n_samples * gamma, 1.0)


def project(x: float, a0: float, a1: float) -> float:
    """Power-law projection exp(a0) * x**a1."""
    if x <= 0:
        raise PruningError(f"projection input must be > 0, got {x}")
    return math.exp(a0) * x ** a1


def _ols_loglog(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Fit ln y = a1 ln x + a0; returns (a0, a1, rss in log domain)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    design = np.column_stack([np.ones_like(lx), lx])
    sol, *_ = np.linalg.lstsq(design, ly, rcond=None)
    a0, a1 = float(sol[0]), float(sol[1])
    rss = float(np.sum((ly - design @ sol) ** 2))
    return a0, a1, rss


def _boundary_combos(inter: DesignSpace, memory_type: str,
                     base_space: DesignSpace, target_space: DesignSpace) -> list[dict]:
    """All boundary-value combinations of the fit keys present in the shared
    space, completed with defaults elsewhere; combos whose completions are
    invalid in either full space are dropped."""
    keys = [k for k in FIT_KEYS if k in inter]
    axes = []
    for k in keys:
        values = inter.param(k).values
        bounds = (values[0],) if len(values) == 1 else (values[0], values[-1])
        axes.append([(k, v) for v in bounds])
    combos = []
    for combo in itertools.product(*axes):
        partial = dict(combo)
        if "memCellType" in inter:
            partial["memCellType"] = memory_type
        base_pt = complete_point(partial, base_space)
        target_pt = complete_point(partial, target_space)
        if is_valid(base_pt, base_space) and is_valid(target_pt, target_space):
            combos.append(partial)
    return combos


def fit_projection(base: BaseDataset, target_space: DesignSpace,
                   target_evaluator: Callable[[DesignPoint], PpaRecord],
                   constraints: Sequence[Constraint], budget: int,
                   rng: random.Random) -> tuple[DesignSpace, ProjectionModel, int]:
    """Fit per-(memory type, constraint) power laws from boundary samples.

    Base metrics come from the stored dataset; target metrics from at most
    ``budget`` simulations per memory type. Returns the shared space, the
    model, and the number of target evaluations performed.
    """
    inter = intersection(base.space, target_space)
    if not constraints:
        # nothing to project: no target characterization needed
        return inter, ProjectionModel((), ()), 0
    if "memCellType" in inter:
        memory_types = inter.param("memCellType").values
    else:
        memory_types = (None,)

    coeffs = []
    diagnostics = []
    evals = 0
    for m in memory_types:
        combos = _boundary_combos(inter, m, base.space, target_space)
        if not combos:
            raise PruningError(f"no valid boundary samples for memory type {m!r}")
        if len(combos) > budget:
            combos = rng.sample(combos, budget)
        base_recs = [base.fetch_partial(c) for c in combos]
        target_recs = []
        for c in combos:
            target_recs.append(target_evaluator(complete_point(c, target_space)))
            evals += 1
        for constraint in constraints:
            xs = [r.metric(constraint.metric) for r in base_recs]
            ys = [r.metric(constraint.metric) for r in target_recs]
            if any(v <= 0 for v in xs + ys):
                raise PruningError(
                    f"nonpositive metric in log-domain fit for ({m}, {constraint.metric})")
            if len(set(xs)) < 2:
                raise DegenerateFitError(
                    f"fewer than 2 distinct base values for ({m}, {constraint.metric})")
            a0, a1, rss = _ols_loglog(xs, ys)
            coeffs.append(((m, constraint.metric), (a0, a1)))
            diagnostics.append(((m, constraint.metric),
                                {"samples": len(xs), "rss": rss}))
    return inter, ProjectionModel(tuple(coeffs), tuple(diagnostics)), evals


def _select_bins(bin_freq: list, tau: float, mode: str):
    """bin_freq: list of (label, frequency). Cumulative mode keeps the
    smallest set of highest-frequency bins covering >= tau; per-bin mode
    keeps bins individually >= tau (top bin if none qualify)."""
    order = sorted(range(len(bin_freq)), key=lambda i: (-bin_freq[i][1], i))
    if mode == "per_bin":
        chosen = [bin_freq[i][0] for i in order if bin_freq[i][1] >= tau]
        return chosen or [bin_freq[order[0]][0]]
    chosen, total = [], 0.0
    for i in order:
        chosen.append(bin_freq[i][0])
        total += bin_freq[i][1]
        if total >= tau - 1e-12:
            break
    return chosen


def topk_prune(base: BaseDataset, inter: DesignSpace, target_space: DesignSpace,
               model: ProjectionModel, constraints: Sequence[Constraint],
               objective: Objective, rho: float, tau: float,
               tau_mode: str = "cumulative") -> tuple[DesignSpace, dict]:
    """Restrict shared target parameters to the bins frequent among the
    projected-feasible top performers of the base dataset. Uses only stored
    base metrics plus the projection model; never simulates the target."""
    valid: list[tuple[DesignPoint, float]] = []
    for pt in inter.iter_points():
        rec = base.fetch_partial(pt.assignments)
        m = pt["memCellType"] if "memCellType" in pt else None
        ok = True
        for c in constraints:
            a0, a1 = model.get(m, c.metric)
            if project(rec.metric(c.metric), a0, a1) > c.threshold:
                ok = False
                break
        if ok:
            valid.append((pt, objective.value(rec)))
    if not valid:
        raise ProjectionInfeasibleError("no shared point survives projected constraints")

    k = math.ceil(rho * len(valid))
    top = sorted(valid, key=lambda t: -t[1])[:k]
    top_points = [pt for pt, _ in top]

    audit = {"omega_valid": len(valid), "k": k, "tau_mode": tau_mode, "params": {}}
    subsets = {}
    for p in inter.params:
        counts = {v: 0 for v in p.values}
        for pt in top_points:
            counts[pt[p.name]] += 1
        num_bins = min(3, len(p.values), len(target_space.param(p.name).values))
        base_bins = discretize_bins(p, num_bins)
        bin_freq = [(label, sum(counts[v] for v in members) / len(top_points))
                    for label, members in base_bins.bins]
        chosen = _select_bins(bin_freq, tau, tau_mode)
        target_bins = discretize_bins(target_space.param(p.name), num_bins)
        kept = [v for label, members in target_bins.bins
                for v in members if label in chosen]
        subsets[p.name] = kept
        audit["params"][p.name] = {
            "bin_frequencies": bin_freq, "chosen_bins": chosen, "kept_values": kept,
        }
    return target_space.restrict(subsets), audit


def deprune(pruned: DesignSpace, full: DesignSpace, history: HistoryBuffer,
            baselines: Sequence[DesignPoint], constraints: Sequence[Constraint],
            objective: Objective, n_total: int, gamma: float,
            evaluator: Callable[[DesignPoint], PpaRecord],
            rng: random.Random) -> tuple[DesignSpace, DepruneReport]:
    """Verify excluded values against top baselines; restore each with
    probability min(win_rate * gamma, 1). New evaluations are cached into
    ``history`` and counted in the report (at most ``n_total``)."""
    report = DepruneReport(gamma=gamma)
    missing = [(p.name, v) for p in full.params
               if p.name in pruned
               for v in p.values if v not in pruned.param(p.name).values]
    if not missing or not baselines:
        return pruned, report

    per_value = max(n_total // len(missing), 1)
    budget = n_total
    restored: dict[str, list] = {}
    for name, value in missing:
        n_samples = min(per_value, len(baselines))
        omega = rng.sample(list(baselines), n_samples)
        n_win = 0
        evals_here = 0
        for s_b in omega:
            candidate = s_b.replace(name, value)
            if not is_valid(candidate, full):
                continue  # counts as a loss
            if candidate in history:
                record, ok = history.entries[candidate]
            else:
                if budget <= 0:
                    continue  # budget exhausted: unverified, counts as a loss
                record = evaluator(candidate)
                ok = feasible(record, constraints)
                history.record(candidate, record, ok)
                budget -= 1
                evals_here += 1
            if ok and objective.value(record) > history.score(s_b):
                n_win += 1
        prob = restore_probability(n_win, len(omega), gamma)
        hit = rng.random() < prob
        if hit:
            restored.setdefault(name, []).append(value)
        report.entries.append({
            "parameter": name, "value": value, "n_win": n_win,
            "samples": len(omega), "restore_probability": prob,
            "restored": hit, "evaluations": evals_here,
        })
        report.evaluations += evals_here

    if not restored:
        return pruned, report
    subsets = {p.name: list(p.values) for p in pruned.params}
    for name, values in restored.items():
        subsets[name] = subsets[name] + values
    return full.restrict(subsets), report


def pruned_run(target_space: DesignSpace, base: BaseDataset, objective: Objective,
               constraints: Sequence[Constraint], opt_cfg: OptimizerConfig,
               prune_cfg: PruningConfig,
               evaluator: Callable[[DesignPoint], PpaRecord],
               runtime_model: Optional[RuntimeCostModel] = None
               ) -> tuple[OptResult, dict]:
    """Projection + Top-K pruning before the first iteration, periodic
    de-pruning during the run, full-space recovery at ``recovery_iter``.
    Fitting and verification simulations are charged to the run trace."""
    prune_rng = random.Random(f"pruning-{opt_cfg.seed}")
    audit: dict = {"warnings": [], "deprune_reports": [], "recovery_iteration": None}

    try:
        inter, model, fit_evals = fit_projection(
            base, target_space, evaluator, constraints, prune_cfg.fit_budget, prune_rng)
        audit["projection"] = model.to_json()
        audit["fit_evaluations"] = fit_evals
        pruned_space, prune_audit = topk_prune(
            base, inter, target_space, model, constraints, objective,
            prune_cfg.rho, prune_cfg.tau, prune_cfg.tau_mode)
        audit["topk"] = prune_audit
    except (ProjectionInfeasibleError, DegenerateFitError) as exc:
        audit["warnings"].append(f"pruning disabled: {exc}")
        result = run(target_space, objective, constraints, opt_cfg, evaluator,
                     runtime_model=runtime_model)
        return result, audit

    state = {"space": pruned_space, "gamma": prune_cfg.gamma0, "calls": 0}

    def hook(i: int, history: HistoryBuffer, active: DesignSpace):
        extra = 0
        if i >= prune_cfg.recovery_iter:
            if audit["recovery_iteration"] is None:
                audit["recovery_iteration"] = i
                state["space"] = target_space
            return target_space, 0
        if (i > 1 and i % prune_cfg.deprune_interval == 0
                and i <= prune_cfg.deprune_stop_iter):
            baselines = history.top_feasible(prune_cfg.baseline_pool)
            if baselines:
                new_space, report = deprune(
                    state["space"], target_space, history, baselines, constraints,
                    objective, prune_cfg.verify_budget, state["gamma"],
                    evaluator, prune_rng)
                state["space"] = new_space
                state["gamma"] *= prune_cfg.gamma_mult
                state["calls"] += 1
                audit["deprune_reports"].append({"iteration": i, **report.to_json()})
                extra = report.evaluations
        return state["space"], extra

    # fitting cost is charged as a prefix entry in the trace
    result = run(target_space, objective, constraints, opt_cfg, evaluator,
                 iteration_hook=hook)
    counts = (fit_evals,) + tuple(result.trace.counts)
    result.trace = type(result.trace)(counts)
    if runtime_model is not None:
        from .runtime_cost import estimate_runtime
        result.estimated_runtime_minutes = estimate_runtime(result.trace, runtime_model)
    audit["pruned_space"] = pruned_space.to_json()
    return result, audit
