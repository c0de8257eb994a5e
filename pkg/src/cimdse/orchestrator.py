"""Session and job management: ties the request workflow to the simulator and
optimizers with confirmation gating, JSON-file persistence, and a poll-based
execution model."""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from . import request_engine as re_
from .optimize import (Constraint, Objective, OptimizerConfig, run,
                       write_convergence_csv)
from .runtime_cost import default_runtime_model
from .space import DesignSpace, check_validity, complete_point, load_builtin_space
from .surrogate import PpaRecord, SurrogateConfig, simulate
from .workloads import get_workload

__all__ = [
    "Orchestrator",
    "Session",
    "Job",
    "SessionStateError",
    "NotFoundError",
    "SESSION_STATES",
]

SESSION_STATES = ("awaiting_request", "awaiting_adjustment",
                  "awaiting_confirmation", "running", "done", "failed")

# request-level model name -> (builtin space schema, workload key)
MODEL_MAP = {
    "VGG8": ("resnet50_22nm", "vgg8"),
    "ResNet-18": ("resnet50_22nm", "resnet18"),
    "ResNet-50": ("resnet50_22nm", "resnet50"),
    "Swin-T": ("swint_22nm", "swint"),
    "ViT-B": ("vitb_22nm", "vitb"),
}
REFERENCE_NODE_NM = 22


class SessionStateError(RuntimeError):
    pass


class NotFoundError(KeyError):
    pass


@dataclass
class Session:
    id: str
    state: str = "awaiting_request"
    messages: list = field(default_factory=list)  # {"role", "text"}
    parsed: Optional[re_.ParsedRequest] = None
    job_id: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "messages": list(self.messages),
            "parsed": self.parsed.to_json() if self.parsed else None,
            "job_id": self.job_id,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Session":
        parsed = obj.get("parsed")
        return cls(id=obj["id"], state=obj["state"],
                   messages=list(obj.get("messages", [])),
                   parsed=re_.ParsedRequest.from_json(parsed) if parsed else None,
                   job_id=obj.get("job_id"))


@dataclass
class Job:
    id: str
    session_id: str
    plan_hash: str
    category: str
    state: str = "running"  # running | done | failed
    statuses: list = field(default_factory=list)  # per testbench
    results: list = field(default_factory=list)  # PpaRecord or OptResult JSON
    configs: list = field(default_factory=list)  # resolved per-testbench params
    logs: list = field(default_factory=list)
    convergence_csv: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "session_id": self.session_id,
            "plan_hash": self.plan_hash,
            "category": self.category,
            "state": self.state,
            "statuses": list(self.statuses),
            "results": list(self.results),
            "configs": [dict(sorted(c.items())) for c in self.configs],
            "logs": list(self.logs),
            "convergence_csv": self.convergence_csv,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Job":
        return cls(id=obj["id"], session_id=obj["session_id"],
                   plan_hash=obj["plan_hash"], category=obj["category"],
                   state=obj["state"], statuses=list(obj.get("statuses", [])),
                   results=list(obj.get("results", [])),
                   configs=[dict(c) for c in obj.get("configs", [])],
                   logs=list(obj.get("logs", [])),
                   convergence_csv=obj.get("convergence_csv"))


def _dump(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")
    tmp.replace(path)


def space_for_model(model: str) -> DesignSpace:
    if model not in MODEL_MAP:
        raise NotFoundError(f"unknown model {model!r}")
    return load_builtin_space(MODEL_MAP[model][0])


def surrogate_for(config: Mapping, seed: int = 0) -> SurrogateConfig:
    node = config.get("tech_node", REFERENCE_NODE_NM)
    return SurrogateConfig(seed=seed, tech_scale=node / REFERENCE_NODE_NM)


def design_point_for(config: Mapping, space: DesignSpace):
    partial = {name: config[name] for name in space.names if name in config}
    point = complete_point(partial, space)
    verdict = check_validity(point, space)
    if verdict != "valid":
        raise ValueError(f"configuration is {verdict}")
    return point


class Orchestrator:
    """State machine per session plus bounded in-process job execution."""

    def __init__(self, data_dir, backend=None, schema: Optional[re_.ParamSchema] = None,
                 seed: int = 0, run_async: bool = False, max_workers: int = 4):
        self.data_dir = Path(data_dir)
        self.backend = backend or re_.RuleBackend()
        self.schema = schema or re_.load_default_schema()
        self.seed = seed
        self.run_async = run_async
        self.runtime_model = default_runtime_model()
        self._sessions: dict[str, Session] = {}
        self._jobs: dict[str, Job] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=max_workers) if run_async else None
        self._load_existing()

    # -- persistence -------------------------------------------------------

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("sessions/*.json")):
            obj = json.loads(path.read_text())
            self._sessions[obj["id"]] = Session.from_json(obj)
        for path in sorted(self.data_dir.glob("jobs/*.json")):
            obj = json.loads(path.read_text())
            self._jobs[obj["id"]] = Job.from_json(obj)

    def _save_session(self, session: Session) -> None:
        _dump(self.data_dir / "sessions" / f"{session.id}.json", session.to_json())

    def _save_job(self, job: Job) -> None:
        _dump(self.data_dir / "jobs" / f"{job.id}.json", job.to_json())

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- session lifecycle -------------------------------------------------

    def create_session(self) -> Session:
        session = Session(id=uuid.uuid4().hex[:12])
        with self._registry_lock:
            self._sessions[session.id] = session
        self._save_session(session)
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"no session {session_id!r}") from None

    def get_job(self, job_id: str) -> Job:
        try:
            return self._jobs[job_id]
        except KeyError:
            raise NotFoundError(f"no job {job_id!r}") from None

    def submit(self, session_id: str, text: str) -> dict:
        """Classify + parse a request; reports missing/invalid entries."""
        session = self.get_session(session_id)
        with self._lock(session_id):
            if session.state not in ("awaiting_request", "awaiting_adjustment",
                                     "awaiting_confirmation"):
                raise SessionStateError(f"cannot submit in state {session.state}")
            session.messages.append({"role": "user", "text": text})
            if not text.strip():
                turn = {"role": "system", "error": "empty request",
                        "state": session.state}
                session.messages.append(turn)
                self._save_session(session)
                return turn
            try:
                category, rationale = self.backend.classify(text)
                if category == re_.RequestCategory.UNKNOWN:
                    turn = {"role": "system", "category": category,
                            "clarification": rationale, "state": session.state}
                    session.messages.append(turn)
                    self._save_session(session)
                    return turn
                parsed = self.backend.parse(text, category, self.schema)
            except re_.BackendError as exc:
                turn = {"role": "system", "error": str(exc), "state": session.state}
                session.messages.append(turn)
                self._save_session(session)
                return turn
            session.parsed = parsed
            session.state = ("awaiting_adjustment"
                             if parsed.missing or parsed.invalid
                             else "awaiting_confirmation")
            turn = self._report_turn(session, rationale)
            session.messages.append(turn)
            self._save_session(session)
            return turn

    def adjust(self, session_id: str, ops: Sequence[Mapping]) -> dict:
        session = self.get_session(session_id)
        with self._lock(session_id):
            if session.state not in ("awaiting_adjustment", "awaiting_confirmation"):
                raise SessionStateError(f"cannot adjust in state {session.state}")
            adj = re_.AdjustmentRequest(list(ops))
            try:
                session.parsed = re_.adjust(session.parsed, adj, self.schema)
            except re_.AdjustmentError as exc:
                turn = {"role": "system", "error": str(exc), "state": session.state}
                session.messages.append(turn)
                self._save_session(session)
                return turn
            session.state = ("awaiting_adjustment"
                             if session.parsed.missing or session.parsed.invalid
                             else "awaiting_confirmation")
            turn = self._report_turn(session, "adjustment applied")
            session.messages.append(turn)
            self._save_session(session)
            return turn

    def _report_turn(self, session: Session, rationale: str) -> dict:
        parsed = session.parsed
        return {
            "role": "system",
            "category": parsed.category,
            "rationale": rationale,
            "parsed": parsed.to_json(),
            "missing": [list(m) for m in parsed.missing],
            "invalid": [list(i) for i in parsed.invalid],
            "state": session.state,
        }

    def confirm(self, session_id: str) -> Job:
        session = self.get_session(session_id)
        with self._lock(session_id):
            if session.state != "awaiting_confirmation":
                raise SessionStateError(
                    f"confirm requires awaiting_confirmation, not {session.state}")
            plan = re_.make_plan(session.parsed, self.schema)
            job = Job(id=uuid.uuid4().hex[:12], session_id=session.id,
                      plan_hash=plan.plan_hash, category=plan.category,
                      statuses=["pending"] * len(plan.testbenches),
                      configs=[dict(tb) for tb in plan.testbenches])
            with self._registry_lock:
                self._jobs[job.id] = job
            session.job_id = job.id
            session.state = "running"
            self._save_session(session)
            self._save_job(job)
        if self._pool is not None:
            self._pool.submit(self._execute, job.id, plan)
        else:
            self._execute(job.id, plan)
        return job

    # -- execution ---------------------------------------------------------

    def _execute(self, job_id: str, plan: re_.ExecutionPlan) -> None:
        job = self.get_job(job_id)
        session = self.get_session(job.session_id)
        try:
            if plan.category == re_.RequestCategory.OPTIMIZE:
                self._run_optimization(job, plan)
            else:
                self._run_simulations(job, plan)
        except Exception as exc:  # job must record failures, not raise
            job.state = "failed"
            job.logs.append(f"job error: {exc}")
        session.state = "done" if job.state == "done" else "failed"
        self._save_job(job)
        self._save_session(session)

    def _run_simulations(self, job: Job, plan: re_.ExecutionPlan) -> None:
        failed = False
        for i, config in enumerate(plan.testbenches):
            if failed:
                job.statuses[i] = "skipped"
                continue
            try:
                space = space_for_model(config["model"])
                workload = get_workload(MODEL_MAP[config["model"]][1])
                point = design_point_for(config, space)
                cfg = surrogate_for(config, seed=self.seed)
                record = simulate(point, workload, cfg)
                if config.get("sim_mode") == "accuracy":
                    job.logs.append(
                        f"testbench {i + 1}: accuracy model not included; "
                        f"reporting hardware metrics only")
                job.results.append({"point": point.assignments,
                                    "record": record.to_json()})
                job.statuses[i] = "done"
                job.logs.append(f"testbench {i + 1}: done")
            except Exception as exc:
                job.statuses[i] = "failed"
                job.logs.append(f"testbench {i + 1}: failed: {exc}")
                failed = True
        job.state = "failed" if failed else "done"

    def _run_optimization(self, job: Job, plan: re_.ExecutionPlan) -> None:
        opt = plan.optimizer or {}
        config = plan.testbenches[0]
        space = space_for_model(config["model"])
        workload = get_workload(MODEL_MAP[config["model"]][1])
        sim_cfg = surrogate_for(config, seed=self.seed)
        objective = Objective(opt.get("objective", "fom"))
        constraints = [Constraint(metric, threshold)
                       for metric, threshold in sorted(
                           opt.get("constraints", {}).items())]
        opt_cfg = OptimizerConfig(algorithm=opt.get("algorithm", "sa"),
                                  iterations=int(opt.get("iterations", 80)),
                                  batch_size=int(opt.get("batch_size", 32)),
                                  seed=self.seed)
        result = run(space, objective, constraints, opt_cfg,
                     lambda pt: simulate(pt, workload, sim_cfg),
                     runtime_model=self.runtime_model)
        csv_path = self.data_dir / "jobs" / f"{job.id}_convergence.csv"
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        write_convergence_csv(result, csv_path)
        job.convergence_csv = str(csv_path)
        job.results.append(result.to_json())
        job.statuses[0] = "done" if result.status == "ok" else result.status
        job.logs.append(f"optimization {result.status}: "
                        f"{len(result.history)} unique evaluations")
        job.state = "done"

    # -- results -----------------------------------------------------------

    def results(self, job_id: str) -> dict:
        job = self.get_job(job_id)
        out = {"id": job.id, "state": job.state, "category": job.category,
               "statuses": list(job.statuses)}
        if job.state == "running":
            return out
        out["logs"] = list(job.logs)
        out["configs"] = [dict(sorted(c.items())) for c in job.configs]
        out["results"] = list(job.results)
        if job.convergence_csv:
            out["convergence_csv"] = job.convergence_csv
        return out

    def shutdown(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
