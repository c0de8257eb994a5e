"""Characterization-based runtime cost model.

Wall-clock DSE cost is dominated by simulator batches. The model holds
measured mean batch runtimes at a few characterized batch sizes and linearly
interpolates between them; batch sizes outside the characterized range clamp
to the nearest endpoint (extrapolated runtimes would be unvalidated).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

__all__ = [
    "RuntimeCostModel",
    "RunTrace",
    "RuntimeEstimate",
    "estimate_runtime",
    "estimate_runtime_report",
    "total_runtime_minutes",
    "average_total_runtime",
    "default_runtime_model",
]


class RuntimeModelError(ValueError):
    pass


@dataclass(frozen=True)
class RunTrace:
    """Unique design points evaluated per iteration."""

    counts: tuple

    def __post_init__(self):
        if any(n < 0 for n in self.counts):
            raise ValueError("per-iteration counts must be >= 0")

    def __len__(self):
        return len(self.counts)


@dataclass(frozen=True)
class RuntimeCostModel:
    characterized: tuple  # of (batch_size, minutes), batch sizes strictly increasing
    logic_overhead: float = 0.0  # minutes per iteration

    def __post_init__(self):
        pts = self.characterized
        if len(pts) < 2:
            raise RuntimeModelError("need at least 2 characterized points")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise RuntimeModelError("batch sizes must be strictly increasing")
        if any(t < 0 for _, t in pts) or any(b[1] < a[1] for a, b in zip(pts, pts[1:])):
            raise RuntimeModelError("batch runtimes must be nonnegative and nondecreasing")

    def batch_minutes(self, n: int) -> tuple[float, bool]:
        """Interpolated batch runtime and a clamped flag."""
        pts = self.characterized
        if n <= pts[0][0]:
            return pts[0][1], n < pts[0][0]
        if n >= pts[-1][0]:
            return pts[-1][1], n > pts[-1][0]
        for (n0, t0), (n1, t1) in zip(pts, pts[1:]):
            if n0 <= n <= n1:
                return t0 + (t1 - t0) * (n - n0) / (n1 - n0), False
        raise AssertionError("unreachable")

    def to_json(self) -> dict:
        return {
            "characterized": [{"batch_size": n, "minutes": t}
                              for n, t in self.characterized],
            "logic_overhead_minutes": self.logic_overhead,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RuntimeCostModel":
        pts = tuple((e["batch_size"], e["minutes"]) for e in obj["characterized"])
        return cls(pts, obj.get("logic_overhead_minutes", 0.0))

    @classmethod
    def load(cls, path) -> "RuntimeCostModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class RuntimeEstimate:
    minutes: float
    clamp_events: int


def estimate_runtime_report(trace: RunTrace, model: RuntimeCostModel) -> RuntimeEstimate:
    if not trace.counts:
        raise RuntimeModelError("trace must be nonempty")
    total = 0.0
    clamps = 0
    for n in trace.counts:
        total += model.logic_overhead
        if n == 0:
            continue
        minutes, clamped = model.batch_minutes(n)
        total += minutes
        clamps += clamped
    return RuntimeEstimate(total, clamps)


def estimate_runtime(trace: RunTrace, model: RuntimeCostModel) -> float:
    """Total estimated minutes: per iteration, logic overhead plus the
    interpolated batch runtime for that iteration's unique-evaluation count."""
    return estimate_runtime_report(trace, model).minutes


def total_runtime_minutes(samples: int, batch_size: int, t_batch: float) -> float:
    """(samples / batch_size) * batch runtime."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    return samples / batch_size * t_batch


def average_total_runtime(samples_by_alg: Mapping[str, int], batch_size: int,
                          t_batch: float) -> float:
    """Mean of ``total_runtime_minutes`` over the provided algorithms."""
    if not samples_by_alg:
        raise ValueError("need at least one algorithm")
    totals = [total_runtime_minutes(s, batch_size, t_batch)
              for s in samples_by_alg.values()]
    return sum(totals) / len(totals)


_DEFAULT_PATH = Path(__file__).parent / "data" / "runtime_model_default.json"


def default_runtime_model() -> RuntimeCostModel:
    return RuntimeCostModel.load(_DEFAULT_PATH)
