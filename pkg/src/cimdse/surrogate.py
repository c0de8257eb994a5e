"""Analytic CIM PPA model.

A deterministic, first-order stand-in for a full circuit-level simulator:
fast enough for exhaustive enumeration, structured enough (monotone ADC /
array scaling, device-specific cell costs, pipeline-bubble trade-off) that
search algorithms see a realistic landscape.

Model sketch, per analog (ACIM) layer with an R x C 8-bit weight matrix:

* weights occupy ``ceil(R/rows)`` row groups by ``ceil(8C/cols)`` column
  strips (1-bit cells, 8 columns per weight);
* each column strip carries ``cols/mux`` ADCs shared across its row groups
  by time multiplexing, so ADC area scales with columns, not rows;
* Flash ADC area/energy scale with 2^precision, SAR with precision;
* a conversion group activates 2^precision rows at once, so per-bit cycle
  count is ``mux * ceil(rows/2^prec) * ceil(R/rows)``.

Attention layers map to digital (DCIM) subarrays with per-cell adder-tree
cost and no ADCs. Latency follows a pipeline-depth model: slowest stage plus
a bubble term proportional to total stage time; weight duplication multiplies
conv tile area by a configured factor and divides the conv bubble by it.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Mapping, Optional, Sequence

from .space import DesignPoint

__all__ = [
    "LayerDesc",
    "Workload",
    "PpaRecord",
    "SurrogateConfig",
    "ModelConfigError",
    "simulate",
    "batch_simulate",
    "adc_conversion_energy_fj",
]

JSON_FIELDS = {
    "area_mm2": "area_mm2",
    "power_mw": "power_mW",
    "latency_ms": "latency_ms",
    "energy_eff": "energy_eff_TOPS_per_W",
    "compute_eff": "compute_eff_TOPS_per_mm2",
    "throughput": "throughput_TOPS",
    "fom": "fom",
}


class ModelConfigError(ValueError):
    """A coefficient or intermediate quantity is nonpositive."""


@dataclass(frozen=True)
class LayerDesc:
    kind: str  # conv | linear | attention
    weight_rows: int
    weight_cols: int
    ops: int  # 8-bit operations
    activations: int = 1

    def __post_init__(self):
        if self.kind not in ("conv", "linear", "attention"):
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if min(self.weight_rows, self.weight_cols, self.ops, self.activations) < 1:
            raise ValueError("layer counts must be >= 1")


@dataclass(frozen=True)
class Workload:
    name: str
    layers: tuple
    uses_dcim: bool = False

    def __post_init__(self):
        if not self.layers:
            raise ValueError("workload needs at least one layer")
        has_attention = any(l.kind == "attention" for l in self.layers)
        if has_attention != self.uses_dcim:
            raise ValueError("uses_dcim must match presence of attention layers")

    @property
    def total_ops(self) -> int:
        return sum(l.ops for l in self.layers)


@dataclass(frozen=True)
class PpaRecord:
    area_mm2: float
    power_mw: float
    latency_ms: float
    energy_eff: float  # TOPS/W
    compute_eff: float  # TOPS/mm^2
    throughput: float  # TOPS
    fom: float  # TOPS^2/W/mm^2

    def __post_init__(self):
        vals = asdict(self)
        for k, v in vals.items():
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"{k} must be finite and > 0, got {v}")
        if not math.isclose(self.fom, self.energy_eff * self.compute_eff,
                            rel_tol=1e-12):
            raise ValueError("fom must equal energy_eff * compute_eff")

    def metric(self, name: str) -> float:
        alias = {"area": "area_mm2", "power": "power_mw", "latency": "latency_ms"}
        return getattr(self, alias.get(name, name))

    def to_json(self) -> dict:
        return {json_key: getattr(self, attr) for attr, json_key in JSON_FIELDS.items()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "PpaRecord":
        return cls(**{attr: obj[json_key] for attr, json_key in JSON_FIELDS.items()})


@dataclass(frozen=True)
class SurrogateConfig:
    """Coefficients of the analytic model. All strictly positive."""

    cell_area_um2: tuple = (("SRAM", 0.060), ("RRAM", 0.014), ("FeFET", 0.022))
    cell_read_fj: tuple = (("SRAM", 3.0), ("RRAM", 18.0), ("FeFET", 13.5))
    adc_area_base_um2: tuple = (("Flash", 16.0), ("SAR", 560.0))
    adc_energy_base_fj: tuple = (("Flash", 2.0), ("SAR", 56.0))
    adc_conversion_overhead_fj: float = 0.0  # fixed sense/sample cost per conversion
    dcim_cell_area_um2: float = 0.11
    dcim_cell_energy_fj: float = 0.6
    # read energy grows with line capacitance: multiplier
    # 1 + slope_row * rows + slope_col * cols on the per-cell read energy
    line_energy_per_row: float = 0.004
    line_energy_per_col: float = 0.004
    dcim_line_energy: float = 0.0005
    dcim_cycle_ns: float = 1.6
    cycle_ns: float = 2.0
    bubble_factor: float = 0.30
    dup_area_factor: float = 2.0
    input_bits: int = 8
    noise_sigma: float = 0.0  # multiplicative log-normal; 0 disables
    seed: int = 0
    tech_scale: float = 1.0  # area x scale^2, energy x scale (non-22nm nodes)

    def __post_init__(self):
        coeffs = [v for _, v in (self.cell_area_um2 + self.cell_read_fj +
                                 self.adc_area_base_um2 + self.adc_energy_base_fj)]
        coeffs += [self.dcim_cell_area_um2, self.dcim_cell_energy_fj,
                   self.dcim_cycle_ns, self.cycle_ns, self.bubble_factor,
                   self.dup_area_factor, self.input_bits, self.tech_scale]
        if any(c <= 0 for c in coeffs):
            raise ModelConfigError("all surrogate coefficients must be > 0")

    def lookup(self, table_name: str, key: str) -> float:
        table = dict(getattr(self, table_name))
        if key not in table:
            raise ModelConfigError(f"no {table_name} entry for {key!r}")
        return table[key]

    def to_json(self) -> dict:
        d = asdict(self)
        for k in ("cell_area_um2", "cell_read_fj", "adc_area_base_um2",
                  "adc_energy_base_fj"):
            d[k] = dict(d[k])
        return d

    @classmethod
    def from_json(cls, obj: Mapping) -> "SurrogateConfig":
        kw = dict(obj)
        for k in ("cell_area_um2", "cell_read_fj", "adc_area_base_um2",
                  "adc_energy_base_fj"):
            if k in kw:
                kw[k] = tuple(kw[k].items())
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "SurrogateConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _adc_scale(adc_type: str, precision: int) -> int:
    return 2 ** precision if adc_type == "Flash" else precision


def adc_conversion_energy_fj(cfg: SurrogateConfig, adc_type: str, precision: int) -> float:
    return (cfg.adc_conversion_overhead_fj
            + cfg.lookup("adc_energy_base_fj", adc_type) * _adc_scale(adc_type, precision))


def _acim_layer(layer: LayerDesc, p: dict, cfg: SurrogateConfig):
    rows, cols = p["rowACIM"], p["colACIM"]
    mux, prec, adc = p["muxColADC"], p["levelADC"], p["typeADC"]
    device = p["memCellType"]
    row_groups = math.ceil(layer.weight_rows / rows)
    col_strips = math.ceil(8 * layer.weight_cols / cols)
    mapped_cells = row_groups * rows * col_strips * cols
    n_adc = col_strips * max(cols // mux, 1)

    area_um2 = (mapped_cells * cfg.lookup("cell_area_um2", device)
                + n_adc * cfg.lookup("adc_area_base_um2", adc) * _adc_scale(adc, prec))

    read_groups = math.ceil(rows / 2 ** prec) * row_groups
    cycles = cfg.input_bits * mux * read_groups
    t_ns = cycles * cfg.cycle_ns * layer.activations

    conversions = cfg.input_bits * read_groups * col_strips * cols * layer.activations
    line_factor = 1 + cfg.line_energy_per_row * rows + cfg.line_energy_per_col * cols
    e_fj = (mapped_cells * cfg.lookup("cell_read_fj", device) * line_factor
            * cfg.input_bits * layer.activations
            + conversions * adc_conversion_energy_fj(cfg, adc, prec))
    return area_um2, t_ns, e_fj


def _dcim_layer(layer: LayerDesc, p: dict, cfg: SurrogateConfig):
    rows, cols = p["rowDCIM"], p["colDCIM"]
    row_groups = math.ceil(layer.weight_rows / rows)
    col_strips = math.ceil(layer.weight_cols / cols)
    cells = row_groups * rows * col_strips * cols
    area_um2 = cells * cfg.dcim_cell_area_um2
    # column strips are separate arrays operating in parallel, as in the
    # analog path; only row groups serialize
    t_ns = cfg.input_bits * row_groups * cfg.dcim_cycle_ns * layer.activations
    line_factor = 1 + cfg.dcim_line_energy * (rows + cols)
    e_fj = (cells * cfg.dcim_cell_energy_fj * line_factor
            * cfg.input_bits * layer.activations)
    return area_um2, t_ns, e_fj


def simulate(point: DesignPoint, workload: Workload, cfg: SurrogateConfig) -> PpaRecord:
    """Pure function of (point, workload, cfg)."""
    p = point.assignments
    dup = p.get("weightDup", 0)

    area_um2 = 0.0
    energy_fj = 0.0
    stage_ns = []
    conv_ns = 0.0
    for layer in workload.layers:
        if layer.kind == "attention":
            if "rowDCIM" not in p:
                raise ModelConfigError(
                    "attention layer requires rowDCIM/colDCIM in the design point"
                )
            a, t, e = _dcim_layer(layer, p, cfg)
        else:
            a, t, e = _acim_layer(layer, p, cfg)
            if layer.kind == "conv" and dup == 1:
                a *= cfg.dup_area_factor
        area_um2 += a
        energy_fj += e
        stage_ns.append(t)
        if layer.kind == "conv":
            conv_ns += t

    bubble_ns = cfg.bubble_factor * sum(stage_ns)
    if dup == 1 and conv_ns > 0:
        bubble_ns -= cfg.bubble_factor * conv_ns * (1 - 1 / cfg.dup_area_factor)
    latency_ns = max(stage_ns) + bubble_ns

    area_um2 *= cfg.tech_scale ** 2
    energy_fj *= cfg.tech_scale

    if cfg.noise_sigma > 0:
        g = random.Random(f"{cfg.seed}|{point.items}|{workload.name}")
        area_um2 *= math.exp(cfg.noise_sigma * g.gauss(0, 1))
        energy_fj *= math.exp(cfg.noise_sigma * g.gauss(0, 1))
        latency_ns *= math.exp(cfg.noise_sigma * g.gauss(0, 1))

    area_mm2 = area_um2 / 1e6
    latency_ms = latency_ns / 1e6
    energy_uj = energy_fj / 1e9
    if min(area_mm2, latency_ms, energy_uj) <= 0:
        raise ModelConfigError("nonpositive intermediate in surrogate model")

    ops = workload.total_ops
    power_mw = energy_uj / latency_ms
    throughput = ops / (latency_ms * 1e9)  # TOPS
    energy_eff = ops / (energy_uj * 1e6)  # TOPS/W
    compute_eff = throughput / area_mm2
    return PpaRecord(
        area_mm2=area_mm2,
        power_mw=power_mw,
        latency_ms=latency_ms,
        energy_eff=energy_eff,
        compute_eff=compute_eff,
        throughput=throughput,
        fom=energy_eff * compute_eff,
    )


def batch_simulate(points: Sequence[DesignPoint], workload: Workload,
                   cfg: SurrogateConfig, parallelism: int = 1) -> list:
    """Element-wise ``simulate``; result order matches input order."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    if parallelism == 1 or len(points) <= 1:
        out = []
        for i, pt in enumerate(points):
            try:
                out.append(simulate(pt, workload, cfg))
            except Exception as exc:
                raise type(exc)(f"batch element {i}: {exc}") from exc
        return out
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [pool.submit(simulate, pt, workload, cfg) for pt in points]
    out = []
    for i, fut in enumerate(futures):
        try:
            out.append(fut.result())
        except Exception as exc:
            raise type(exc)(f"batch element {i}: {exc}") from exc
    return out
