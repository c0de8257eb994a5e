"""Design-space exploration toolkit for compute-in-memory accelerators:
schema-driven request parsing, an analytic hardware surrogate, heuristic
optimizers with transfer-driven space pruning, and a session/job API."""

from .space import (BinPartition, DesignPoint, DesignSpace, ParameterDef,
                    check_validity, discretize_bins, enumerate_points,
                    intersection, load_builtin_space, load_space)
from .surrogate import LayerDesc, PpaRecord, SurrogateConfig, Workload, simulate
from .runtime_cost import (RunTrace, RuntimeCostModel, default_runtime_model,
                           estimate_runtime, total_runtime_minutes)
from .optimize import (Constraint, HistoryBuffer, Objective, OptimizerConfig,
                       OptResult, run, write_convergence_csv)
from .pruning import (BaseDataset, DepruneReport, ProjectionModel,
                      PruningConfig, deprune, fit_projection, pruned_run,
                      restore_probability, topk_prune)
from .request_engine import (AdjustmentRequest, ExecutionPlan, ParamSchema,
                             ParsedRequest, RequestCategory, RuleBackend,
                             adjust, classify, load_default_schema, make_plan,
                             parse_params)
from .orchestrator import Job, Orchestrator, Session

__version__ = "0.1.0"
