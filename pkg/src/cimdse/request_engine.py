"""Schema-driven request workflow: categorize a free-text request, extract
parameters into specialized (per-testbench) and common groups, validate
against the schema, apply structured adjustments, and emit an execution plan.

The deterministic backend is a rule/pattern interpreter over normalized text
with unit-aware matching; it never invents values. An external-LLM backend
implements the same interface behind HTTP+JSON but is excluded from
correctness gating.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

__all__ = [
    "RequestCategory",
    "ParamSchema",
    "ParsedRequest",
    "AdjustmentRequest",
    "ExecutionPlan",
    "RuleBackend",
    "LlmBackend",
    "BackendError",
    "AdjustmentError",
    "NotReadyError",
    "classify",
    "parse_params",
    "adjust",
    "make_plan",
    "audit_extractions",
    "load_default_schema",
]

CATEGORIES = ("SingleCall", "MultipleCall", "TestbenchAutoDesign",
              "PpaOptimization", "Unknown")
SWEEP_CAP = 8


class BackendError(RuntimeError):
    """The parsing backend itself failed (distinct from Unknown)."""


class AdjustmentError(ValueError):
    pass


class NotReadyError(ValueError):
    pass


class RequestCategory:
    SINGLE = "SingleCall"
    MULTIPLE = "MultipleCall"
    AUTO = "TestbenchAutoDesign"
    OPTIMIZE = "PpaOptimization"
    UNKNOWN = "Unknown"


class ParamSchema:
    """Canonical parameter entries with values/ranges, defaults, units and
    an injective alias map."""

    def __init__(self, entries: Mapping[str, Mapping], required: Mapping[str, Sequence[str]]):
        self.entries = {k: dict(v) for k, v in entries.items()}
        self.required = {k: list(v) for k, v in required.items()}
        self.alias_map: dict[str, str] = {}
        for name, entry in self.entries.items():
            for alias in entry.get("aliases", ()):
                key = alias.lower()
                if key in self.alias_map and self.alias_map[key] != name:
                    raise ValueError(f"alias {alias!r} maps to multiple entries")
                self.alias_map[key] = name

    def canonical(self, name: str) -> str:
        return self.alias_map.get(name.lower(), name)

    def default(self, name: str):
        return self.entries[name].get("default")

    def group(self, name: str) -> str:
        return self.entries[name].get("group", "simulation")

    def required_for(self, category: str) -> list[str]:
        return self.required.get(category, [])

    def validate(self, name: str, value) -> Optional[str]:
        """None if valid, else a reason string."""
        if name not in self.entries:
            return f"unknown parameter {name!r}"
        entry = self.entries[name]
        if "values" in entry:
            if value not in entry["values"]:
                return f"{value!r} not among supported values {entry['values']}"
        elif "range" in entry:
            lo, hi = entry["range"]
            try:
                ok = lo <= value <= hi
            except TypeError:
                return f"{value!r} is not comparable to range [{lo}, {hi}]"
            if not ok:
                return f"{value!r} outside supported range [{lo}, {hi}]"
        return None

    @classmethod
    def from_json(cls, obj: Mapping) -> "ParamSchema":
        return cls(obj["entries"], obj.get("required", {}))


def load_default_schema() -> ParamSchema:
    path = Path(__file__).parent / "schemas" / "request_schema.json"
    with open(path) as fh:
        return ParamSchema.from_json(json.load(fh))


@dataclass
class ParsedRequest:
    category: str
    testbenches: list = field(default_factory=list)  # list of dicts
    common_params: dict = field(default_factory=dict)
    missing: list = field(default_factory=list)  # (location, name)
    invalid: list = field(default_factory=list)  # (location, name, value, reason)
    notes: list = field(default_factory=list)
    schema_sourced: list = field(default_factory=list)  # params whose values came from the schema

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "testbenches": [dict(sorted(tb.items())) for tb in self.testbenches],
            "common_params": dict(sorted(self.common_params.items())),
            "missing": [list(m) for m in self.missing],
            "invalid": [list(i) for i in self.invalid],
            "notes": list(self.notes),
            "schema_sourced": sorted(self.schema_sourced),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ParsedRequest":
        return cls(
            category=obj["category"],
            testbenches=[dict(tb) for tb in obj.get("testbenches", [])],
            common_params=dict(obj.get("common_params", {})),
            missing=[tuple(m) for m in obj.get("missing", [])],
            invalid=[tuple(i) for i in obj.get("invalid", [])],
            notes=list(obj.get("notes", [])),
            schema_sourced=list(obj.get("schema_sourced", [])),
        )


@dataclass
class AdjustmentRequest:
    """Ordered structured edits. Each op is a dict:
    {"op": "set", "location": "common"|index, "name": ..., "value": ...}
    {"op": "remove", "location": ..., "name": ...}
    {"op": "add_testbench", "params": {...}}
    {"op": "remove_testbench", "index": n}
    {"op": "use_defaults", "scope": "common"|"all"}
    """

    ops: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ops": list(self.ops)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "AdjustmentRequest":
        return cls(list(obj.get("ops", [])))


@dataclass
class ExecutionPlan:
    category: str
    testbenches: list  # fully-resolved parameter dicts
    optimizer: Optional[dict] = None
    plan_hash: str = ""

    def canonical_json(self) -> str:
        body = {
            "category": self.category,
            "testbenches": [dict(sorted(tb.items())) for tb in self.testbenches],
            "optimizer": (dict(sorted(self.optimizer.items()))
                          if self.optimizer else None),
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    def compute_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "testbenches": [dict(sorted(tb.items())) for tb in self.testbenches],
            "optimizer": self.optimizer,
            "plan_hash": self.plan_hash,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ExecutionPlan":
        return cls(obj["category"], [dict(tb) for tb in obj["testbenches"]],
                   obj.get("optimizer"), obj.get("plan_hash", ""))


# --------------------------------------------------------------------------
# deterministic extraction
# --------------------------------------------------------------------------

_MODEL_TOKENS = {
    "vgg8": "VGG8", "vgg-8": "VGG8",
    "resnet-18": "ResNet-18", "resnet18": "ResNet-18", "resnet 18": "ResNet-18",
    "resnet-50": "ResNet-50", "resnet50": "ResNet-50", "resnet 50": "ResNet-50",
    "swin-t": "Swin-T", "swin transformer tiny": "Swin-T", "swin-tiny": "Swin-T",
    "vit-b": "ViT-B", "vision transformer base": "ViT-B", "vit-base": "ViT-B",
}
_DATASET_TOKENS = {
    "cifar-10": "CIFAR-10", "cifar10": "CIFAR-10",
    "cifar-100": "CIFAR-100", "cifar100": "CIFAR-100",
    "imagenet": "ImageNet",
}
_DEVICE_TOKENS = {"sram": "SRAM", "rram": "RRAM", "fefet": "FeFET"}
_ALGO_TOKENS = [
    ("simulated annealing", "SA"), ("simulate annealing", "SA"),
    ("genetic algorithm", "GA"), ("genetic", "GA"),
    ("tree-structured parzen", "TPE"), ("parzen", "TPE"), ("tpe", "TPE"),
    ("random search", "RS"), ("bayesian", "TPE"),
]
_OBJECTIVE_TOKENS = [
    ("figure of merit", "fom"), ("fom", "fom"),
    ("energy efficiency", "energy_eff"), ("minimum power", "energy_eff"),
    ("lowest power", "energy_eff"), ("minimum energy", "energy_eff"),
    ("compute efficiency", "compute_eff"), ("area efficiency", "compute_eff"),
    ("throughput", "throughput"), ("highest performance", "throughput"),
]
_SWEEP_CUES = ("different", "various", "sweep", "sweeping", "across", "varying",
               "scaling")
_SWEEP_TARGETS = [
    # phrase fragment -> swept canonical parameters
    ("input and weight quantization", ("input_precision", "weight_precision")),
    ("quantization precision", ("input_precision", "weight_precision")),
    ("adc precision", ("levelADC",)),
    ("adc resolution", ("levelADC",)),
    ("subarray size", ("rowACIM", "colACIM")),
    ("tech node", ("tech_node",)),
    ("technology node", ("tech_node",)),
    ("technology scaling", ("tech_node",)),
    ("memory device", ("memCellType",)),
    ("device type", ("memCellType",)),
    ("mux", ("muxColADC",)),
]
_OPT_CUES = ("optimiz", "minimize", "maximize", "best configuration",
             "optimal", "find out the optimal", "constraint")


def _normalize(text: str) -> str:
    t = text.lower()
    t = t.replace("×", "x").replace("’", "'")
    t = t.replace("mm$^2$", "mm2").replace("cm$^2$", "cm2")
    t = t.replace("mm^2", "mm2").replace("cm^2", "cm2")
    t = t.replace("mm²", "mm2").replace("cm²", "cm2")
    t = re.sub(r"\s+", " ", t)
    return t


def _dedup(seq):
    out = []
    for v in seq:
        if v not in out:
            out.append(v)
    return out


def _find_tokens(text: str, table: Mapping[str, str]) -> list:
    found = []
    for token, canon in table.items():
        if re.search(r"(?<![a-z0-9])" + re.escape(token) + r"(?![a-z0-9])", text):
            found.append(canon)
    return _dedup(found)


def extract_values(text: str) -> tuple[dict, list, list]:
    """Returns (values: name -> ordered value list, swept param names, notes).

    Only values literally present in the text are extracted; swept names are
    cue phrases with no explicit values.
    """
    t = _normalize(text)
    values: dict[str, list] = {}
    notes: list[str] = []

    def put(name, vals):
        if vals:
            values[name] = _dedup(values.get(name, []) + list(vals))

    put("model", _find_tokens(t, _MODEL_TOKENS))
    put("dataset", _find_tokens(t, _DATASET_TOKENS))
    put("memCellType", _find_tokens(t, _DEVICE_TOKENS))

    put("tech_node", [int(m) for m in re.findall(r"(\d+)\s*nm", t)])

    sub = re.findall(r"(\d+)\s*x\s*(\d+)", t)
    if sub:
        put("rowACIM", [int(r) for r, _ in sub])
        put("colACIM", [int(c) for _, c in sub])

    # ADC precision: "ADC precision 7bit", "7b ADC", "ADC precisions of 4b, 5b and 6b"
    adc_vals = []
    # each list element must not be the start of another bit-width phrase
    # ("8b quantization", "4bit cell precision")
    _adc_item = (r"(?!\d+\s*-?\s*b(?:it)?\s+(?:quantization|cell|input|weight))"
                 r"\d+\s*-?\s*b(?:it)?\s*(?:,|and|or|\s)*")
    for m in re.finditer(r"adc (?:precision|resolution)s?\s*(?:of|is|are|:)?\s*"
                         r"((?:" + _adc_item + r")+)", t):
        adc_vals += [int(x) for x in re.findall(r"(\d+)\s*-?\s*b", m.group(1))]
    adc_vals += [int(x) for x in re.findall(r"(\d+)\s*-?\s*b(?:it)?\s+adc", t)]
    put("levelADC", adc_vals)

    put("typeADC", [{"flash": "Flash", "sar": "SAR"}[m]
                    for m in re.findall(r"\b(flash|sar)\b", t)])

    put("cell_precision", [int(x) for x in re.findall(r"(\d+)\s*-?\s*b(?:it)?\s+cell", t)])

    quant = [int(x) for x in
             re.findall(r"(\d+)\s*-?\s*b(?:it)?\s+quantization", t)]
    quant += [int(x) for x in
              re.findall(r"(\d+)\s*-?\s*b(?:it)?\s+(?:for\s+)?(?:both\s+)?input", t)]
    if quant:
        if "input" in t:
            put("input_precision", quant)
        if "weight" in t:
            put("weight_precision", quant)

    mux = [int(x) for x in re.findall(r"(\d+)\s+columns? per adc", t)]
    mux += [int(x) for x in re.findall(r"mux (?:of |is |= ?)?(\d+)", t)]
    put("muxColADC", mux)

    if re.search(r"(?:with|enable[d]?) weight duplication", t):
        put("weightDup", [1])
    elif re.search(r"(?:no|without|disable[d]?) weight duplication", t):
        put("weightDup", [0])

    put("num_batches", [int(x) for x in re.findall(r"(\d+) batches", t)])
    put("sim_batch_size", [int(x) for x in re.findall(r"batch size (?:of |is )?(\d+)", t)])

    cond = [float(x) for x in re.findall(r"(\d+(?:\.\d+)?)\s*us", t)]
    if len(cond) >= 2:
        put("conductance_on_us", [max(cond[0], cond[1])])
        put("conductance_off_us", [min(cond[0], cond[1])])
    elif len(cond) == 1:
        put("conductance_on_us", [cond[0]])
    if re.search(r"no variations?", t):
        put("variation", [0])
    else:
        put("variation", [float(x) for x in
                          re.findall(r"(\d+(?:\.\d+)?)\s*%? variations?", t)])

    only_ppa = re.search(r"only.{0,30}ppa|ppa estimation only|without (?:the )?accuracy", t)
    only_acc = re.search(r"only.{0,40}accuracy|accuracy only|without (?:the )?ppa", t)
    if only_ppa and not only_acc:
        put("sim_mode", ["ppa"])
    elif only_acc:
        put("sim_mode", ["accuracy"])
    elif "accuracy" in t and "ppa" in t:
        put("sim_mode", ["both"])

    for phrase, algo in _ALGO_TOKENS:
        if phrase in t:
            put("algorithm", [algo])
            break
    put("iterations", [int(x) for x in
                       re.findall(r"(\d+)\s*(?:episodes|iterations)", t)])
    for phrase, obj in _OBJECTIVE_TOKENS:
        if phrase in t:
            put("objective", [obj])
            break

    area = re.findall(r"(?:within|under|below|at most|less than)\s+"
                      r"(\d+(?:\.\d+)?)\s*(mm2|cm2)", t)
    for num, unit in area:
        v = float(num) * (100.0 if unit == "cm2" else 1.0)
        put("area_constraint_mm2", [v])
    power = re.findall(r"(?:within|under|below|at most|less than)\s+"
                       r"(\d+(?:\.\d+)?)\s*(mw|w)(?![a-z])", t)
    for num, unit in power:
        v = float(num) * (1000.0 if unit == "w" else 1.0)
        put("power_constraint_mw", [v])

    # sweep cues: a cue word near a target phrase whose parameter has no
    # explicit extracted values
    swept = []
    for phrase, params in _SWEEP_TARGETS:
        idx = t.find(phrase)
        if idx < 0:
            continue
        window = t[max(0, idx - 60):idx + len(phrase) + 30]
        if any(cue in window for cue in _SWEEP_CUES):
            for p in params:
                if p not in values and p not in swept:
                    swept.append(p)
    if swept:
        notes.append(f"sweep cues detected for: {', '.join(swept)}")
    return values, swept, notes


# --------------------------------------------------------------------------
# backends
# --------------------------------------------------------------------------

class RuleBackend:
    """Deterministic pattern interpreter; the test target."""

    def classify(self, text: str) -> tuple[str, str]:
        if not text.strip():
            raise ValueError("empty request")
        t = _normalize(text)
        values, swept, _ = extract_values(text)
        if any(cue in t for cue in _OPT_CUES) and (
                "algorithm" in values or "optimal" in t or "optimiz" in t
                or "minimize" in t or "maximize" in t):
            return (RequestCategory.OPTIMIZE,
                    "optimization intent: objective/constraint/algorithm wording")
        multi = [k for k, v in values.items() if len(v) > 1
                 and k not in ("conductance_on_us", "conductance_off_us")]
        if multi:
            return (RequestCategory.MULTIPLE,
                    f"multiple explicit values for: {', '.join(sorted(multi))}")
        if swept:
            return (RequestCategory.AUTO,
                    f"sweep intent without explicit values for: {', '.join(swept)}")
        if "model" in values and len(values) >= 3:
            return (RequestCategory.SINGLE,
                    "one fully-specified configuration")
        return (RequestCategory.UNKNOWN,
                "could not determine intent; please name a model, dataset and "
                "the parameters to simulate or optimize")

    def parse(self, text: str, category: str, schema: ParamSchema) -> ParsedRequest:
        if category == RequestCategory.UNKNOWN:
            raise ValueError("cannot parse an Unknown-category request")
        values, swept, notes = extract_values(text)
        parsed = ParsedRequest(category=category, notes=notes)

        if category == RequestCategory.AUTO:
            for name in swept:
                entry = schema.entries.get(name, {})
                sweep_vals = list(entry.get("values", []))
                if not sweep_vals and "range" in entry:
                    sweep_vals = []
                if len(sweep_vals) > SWEEP_CAP:
                    sweep_vals = sweep_vals[:SWEEP_CAP]
                    parsed.notes.append(f"sweep of {name} capped at {SWEEP_CAP} values")
                if sweep_vals:
                    values[name] = sweep_vals
                    parsed.schema_sourced.append(name)

        # validity screen: invalid values are reported, not placed
        clean: dict[str, list] = {}
        for name, vals in values.items():
            kept = []
            for v in vals:
                reason = schema.validate(name, v)
                if reason is None:
                    kept.append(v)
                else:
                    parsed.invalid.append(("common", name, v, reason))
            if kept:
                clean[name] = kept

        specialized = {k: v for k, v in clean.items() if len(v) > 1}
        if specialized:
            n = max(len(v) for v in specialized.values())
            for k, v in list(specialized.items()):
                if len(v) != n:
                    parsed.notes.append(
                        f"{k} lists {len(v)} values but {n} testbenches were "
                        f"implied; last value broadcast")
                    specialized[k] = v + [v[-1]] * (n - len(v))
            parsed.testbenches = [
                {k: specialized[k][i] for k in specialized} for i in range(n)
            ]
        else:
            parsed.testbenches = [{}]
        parsed.common_params = {k: v[0] for k, v in clean.items()
                                if k not in specialized}
        refresh_missing(parsed, schema)
        return parsed


class LlmBackend:
    """HTTP+JSON adapter for a hosted model; same interface, excluded from
    correctness gating. Endpoint and API key come from configuration."""

    def __init__(self, endpoint: str, api_key_env: str = "CIMDSE_LLM_API_KEY",
                 timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def _post(self, task: str, payload: dict) -> dict:
        import urllib.request

        body = json.dumps({"task": task, "payload": payload}).encode()
        req = urllib.request.Request(
            f"{self.endpoint}/{task}", data=body,
            headers={"Content-Type": "application/json",
                     "Authorization": f"Bearer {os.environ.get(self.api_key_env, '')}"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode())
        except Exception as exc:
            raise BackendError(f"LLM backend unreachable: {exc}") from exc

    def classify(self, text: str) -> tuple[str, str]:
        out = self._post("classify", {"request": text})
        category = out.get("category", RequestCategory.UNKNOWN)
        if category not in CATEGORIES:
            raise BackendError(f"backend returned unknown category {category!r}")
        return category, out.get("rationale", "")

    def parse(self, text: str, category: str, schema: ParamSchema) -> ParsedRequest:
        out = self._post("parse", {"request": text, "category": category})
        return ParsedRequest.from_json(out)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def classify(text: str, backend=None) -> tuple[str, str]:
    backend = backend or RuleBackend()
    return backend.classify(text)


def parse_params(text: str, category: str, schema: ParamSchema,
                 backend=None) -> ParsedRequest:
    backend = backend or RuleBackend()
    return backend.parse(text, category, schema)


def refresh_missing(parsed: ParsedRequest, schema: ParamSchema) -> None:
    parsed.missing = []
    specialized = set()
    for tb in parsed.testbenches:
        specialized |= set(tb)
    for name in schema.required_for(parsed.category):
        if name in parsed.common_params:
            continue
        if name in specialized:
            for i, tb in enumerate(parsed.testbenches, start=1):
                if name not in tb:
                    parsed.missing.append((i, name))
        else:
            parsed.missing.append(("common", name))


def _renormalize(parsed: ParsedRequest, schema: ParamSchema) -> None:
    """Promote parameters identical across all testbenches to common scope;
    demote common parameters that were overridden per testbench."""
    if parsed.testbenches:
        shared = set(parsed.testbenches[0])
        for tb in parsed.testbenches[1:]:
            shared &= set(tb)
        for name in sorted(shared):
            vals = [tb[name] for tb in parsed.testbenches]
            if all(v == vals[0] for v in vals):
                for tb in parsed.testbenches:
                    del tb[name]
                parsed.common_params[name] = vals[0]
    # a name present in any testbench must not stay common
    per_tb = set()
    for tb in parsed.testbenches:
        per_tb |= set(tb)
    for name in list(parsed.common_params):
        if name in per_tb:
            base = parsed.common_params.pop(name)
            for tb in parsed.testbenches:
                tb.setdefault(name, base)
    refresh_missing(parsed, schema)


def adjust(parsed: ParsedRequest, adj: AdjustmentRequest,
           schema: ParamSchema) -> ParsedRequest:
    """Apply ops in order, then re-derive scopes, indices and reports."""
    out = ParsedRequest.from_json(parsed.to_json())  # deep copy
    for op_index, op in enumerate(adj.ops):
        kind = op.get("op")
        if kind == "set":
            loc, name, value = op["location"], op["name"], op["value"]
            name = schema.canonical(name)
            if loc == "common":
                out.common_params[name] = value
            else:
                _tb(out, loc, op_index)[name] = value
        elif kind == "remove":
            loc, name = op["location"], schema.canonical(op["name"])
            if loc == "common":
                out.common_params.pop(name, None)
            else:
                _tb(out, loc, op_index).pop(name, None)
        elif kind == "add_testbench":
            out.testbenches.append(dict(op.get("params", {})))
        elif kind == "remove_testbench":
            idx = op["index"]
            if not (1 <= idx <= len(out.testbenches)):
                raise AdjustmentError(f"op {op_index}: no testbench {idx}")
            del out.testbenches[idx - 1]
        elif kind == "use_defaults":
            scope = op.get("scope", "common")
            for name in schema.required_for(out.category):
                if name not in out.common_params and not any(
                        name in tb for tb in out.testbenches):
                    default = schema.default(name)
                    if default is not None:
                        out.common_params[name] = default
                        if name not in out.schema_sourced:
                            out.schema_sourced.append(name)
            if scope == "all":
                for name, entry in schema.entries.items():
                    if (schema.group(name) == "simulation"
                            and entry.get("default") is not None
                            and name not in out.common_params
                            and not any(name in tb for tb in out.testbenches)):
                        out.common_params[name] = entry["default"]
                        if name not in out.schema_sourced:
                            out.schema_sourced.append(name)
        else:
            raise AdjustmentError(f"op {op_index}: unknown op {kind!r}")
    if not out.testbenches:
        out.testbenches = [{}]

    # recompute invalid from current assignments
    out.invalid = []
    for name, value in out.common_params.items():
        reason = schema.validate(name, value)
        if reason:
            out.invalid.append(("common", name, value, reason))
    for i, tb in enumerate(out.testbenches, start=1):
        for name, value in tb.items():
            reason = schema.validate(name, value)
            if reason:
                out.invalid.append((i, name, value, reason))
    _renormalize(out, schema)
    return out


def _tb(parsed: ParsedRequest, loc, op_index: int) -> dict:
    if not isinstance(loc, int) or not (1 <= loc <= len(parsed.testbenches)):
        raise AdjustmentError(f"op {op_index}: no testbench {loc!r}")
    return parsed.testbenches[loc - 1]


def make_plan(parsed: ParsedRequest, schema: ParamSchema) -> ExecutionPlan:
    """Resolve every testbench fully; requires no missing/invalid entries."""
    if parsed.missing or parsed.invalid:
        raise NotReadyError(
            f"missing={parsed.missing} invalid={parsed.invalid}")

    resolved = []
    for tb in parsed.testbenches:
        merged = {}
        for name, entry in schema.entries.items():
            if schema.group(name) == "simulation" and entry.get("default") is not None:
                merged[name] = entry["default"]
        merged.update(parsed.common_params)
        merged.update(tb)
        resolved.append(merged)

    optimizer = None
    if parsed.category == RequestCategory.OPTIMIZE:
        get = lambda n: parsed.common_params.get(n, schema.default(n))
        optimizer = {
            "algorithm": (get("algorithm") or "SA").lower(),
            "iterations": int(get("iterations") or 80),
            "batch_size": int(get("opt_batch_size") or 32),
            "objective": get("objective") or "fom",
            "constraints": {},
        }
        if "area_constraint_mm2" in parsed.common_params:
            optimizer["constraints"]["area"] = parsed.common_params["area_constraint_mm2"]
        if "power_constraint_mw" in parsed.common_params:
            optimizer["constraints"]["power"] = parsed.common_params["power_constraint_mw"]

    plan = ExecutionPlan(parsed.category, resolved, optimizer)
    plan.plan_hash = plan.compute_hash()
    return plan


def audit_extractions(parsed: ParsedRequest, text: str) -> list:
    """Extracted values whose normalized string form does not occur in the
    request text (schema-sourced sweep values excluded). Empty list = clean."""
    t = _normalize(text)
    misses = []

    def check(name, value):
        if name in parsed.schema_sourced:
            return
        forms = [_normalize(str(value))]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            # unit-scaled constraint values (cm2 -> mm2, W -> mW)
            for scaled in (value, value / 100.0, value / 1000.0):
                forms.append(str(scaled))
                if scaled == int(scaled):
                    forms.append(str(int(scaled)))
        if not any(f in t for f in forms):
            misses.append((name, value))

    defaults = {"sim_mode", "variation", "weightDup", "objective", "algorithm",
                "conductance_on_us", "conductance_off_us"}
    for name, value in parsed.common_params.items():
        if name not in defaults:
            check(name, value)
    for tb in parsed.testbenches:
        for name, value in tb.items():
            check(name, value)
    return misses
