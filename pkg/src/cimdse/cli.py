"""Command-line entry points: request execution, optimization, enumeration,
base-dataset generation, experiment suites, and the API server."""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from . import request_engine as re_
from .experiments import run_suite
from .optimize import Constraint, Objective, OptimizerConfig, run, write_convergence_csv
from .orchestrator import Orchestrator
from .pruning import BaseDataset, PruningConfig, pruned_run
from .runtime_cost import default_runtime_model
from .space import builtin_schema_path, enumerate_points, load_space
from .surrogate import SurrogateConfig, simulate
from .workloads import get_workload


def _resolve_space(ref: str):
    path = Path(ref)
    if not path.exists():
        path = builtin_schema_path(ref)
    return load_space(path)


def _parse_constraint(text: str) -> Constraint:
    if "=" not in text:
        raise argparse.ArgumentTypeError("constraint must look like area=2500")
    metric, value = text.split("=", 1)
    return Constraint(metric.strip(), float(value))


def cmd_run(args) -> int:
    text = Path(args.request_file).read_text()
    schema = (re_.ParamSchema.from_json(json.loads(Path(args.schema).read_text()))
              if args.schema else re_.load_default_schema())
    with tempfile.TemporaryDirectory() as tmp:
        orch = Orchestrator(args.data_dir or tmp, schema=schema, seed=args.seed)
        session = orch.create_session()
        turn = orch.submit(session.id, text)
        if turn.get("error") or turn.get("category") == re_.RequestCategory.UNKNOWN:
            json.dump(turn, sys.stdout, indent=2)
            print()
            return 1
        if session.parsed.missing or session.parsed.invalid:
            orch.adjust(session.id, [{"op": "use_defaults", "scope": "common"}])
        if session.state != "awaiting_confirmation":
            json.dump({"error": "request still incomplete",
                       "missing": session.parsed.missing,
                       "invalid": session.parsed.invalid}, sys.stdout, indent=2)
            print()
            return 1
        job = orch.confirm(session.id)
        json.dump(orch.results(job.id), sys.stdout, indent=2)
        print()
        return 0 if orch.get_job(job.id).state == "done" else 1


def cmd_optimize(args) -> int:
    space = _resolve_space(args.space)
    workload = get_workload(args.workload)
    sim_cfg = SurrogateConfig(seed=args.seed)
    evaluator = lambda pt: simulate(pt, workload, sim_cfg)
    objective = Objective(args.objective)
    constraints = list(args.constraint)
    cfg = OptimizerConfig(algorithm=args.algorithm, iterations=args.iterations,
                          batch_size=args.batch, seed=args.seed)
    model = default_runtime_model()
    audit = None
    if args.prune:
        if not args.base_dataset:
            print("--prune requires --base-dataset", file=sys.stderr)
            return 2
        base = BaseDataset.load(args.base_dataset)
        prune_cfg = PruningConfig(
            rho=args.rho, tau=args.tau, deprune_interval=args.deprune_interval,
            deprune_stop_iter=args.deprune_stop, recovery_iter=args.recovery)
        result, audit = pruned_run(space, base, objective, constraints, cfg,
                                   prune_cfg, evaluator, runtime_model=model)
    else:
        result = run(space, objective, constraints, cfg, evaluator,
                     runtime_model=model)
    out = result.to_json()
    if audit is not None:
        out["audit"] = audit
    if args.convergence_csv:
        write_convergence_csv(result, args.convergence_csv)
        out["convergence_csv"] = args.convergence_csv
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0 if result.status == "ok" else 1


def cmd_enumerate(args) -> int:
    space = _resolve_space(args.space)
    points = enumerate_points(space)
    if args.count_only:
        print(len(points))
    else:
        json.dump({"count": len(points),
                   "points": [p.assignments for p in points]},
                  sys.stdout, indent=2)
        print()
    return 0


def cmd_basegen(args) -> int:
    space = _resolve_space(args.space)
    workload = get_workload(args.workload)
    sim_cfg = SurrogateConfig(seed=args.seed)
    base = BaseDataset.build(space, lambda pt: simulate(pt, workload, sim_cfg))
    base.save(args.out, schema_name=args.space)
    print(f"wrote {len(base.records)} records to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    rows = run_suite(args.config)
    print(f"suite finished: {len(rows)} rows")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    orch = Orchestrator(args.data_dir, seed=args.seed, run_async=True)
    uvicorn.run(create_app(orch), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cimdse")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a free-text request end to end")
    p.add_argument("--schema", help="request schema JSON (default: built-in)")
    p.add_argument("--request-file", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-dir", help="persistence directory (default: temp)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("optimize", help="search a design space")
    p.add_argument("--space", required=True, help="schema path or built-in name")
    p.add_argument("--workload", default="resnet50")
    p.add_argument("--objective", default="fom")
    p.add_argument("--constraint", action="append", default=[],
                   type=_parse_constraint,
                   help="metric=threshold, repeatable (area mm^2, power mW)")
    p.add_argument("--algorithm", choices=("rs", "sa", "ga", "tpe"), default="sa")
    p.add_argument("--iterations", type=int, default=80)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prune", action="store_true")
    p.add_argument("--base-dataset")
    p.add_argument("--rho", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=0.85)
    p.add_argument("--deprune-interval", type=int, default=2)
    p.add_argument("--deprune-stop", type=int, default=8)
    p.add_argument("--recovery", type=int, default=20)
    p.add_argument("--convergence-csv")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("enumerate", help="list all valid points of a space")
    p.add_argument("--space", required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("basegen", help="exhaustively evaluate a space to a dataset")
    p.add_argument("--space", required=True)
    p.add_argument("--workload", default="resnet50")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_basegen)

    p = sub.add_parser("experiment", help="run a suite from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", default="cimdse_data")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
