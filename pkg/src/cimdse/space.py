"""Discrete hardware design spaces: typed parameters, validity rules,
enumeration, intersection, boundary extraction and value binning.

A design space is an ordered collection of named discrete parameters plus a
set of named validity rules (joint predicates). Everything here is immutable
after construction, so spaces and points can be shared freely across parallel
evaluators.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

__all__ = [
    "ParameterDef",
    "DesignSpace",
    "DesignPoint",
    "BinPartition",
    "ValidityRule",
    "SchemaError",
    "PartitionError",
    "TransferInfeasibleError",
    "RULES",
    "enumerate_points",
    "check_validity",
    "intersection",
    "boundary_values",
    "discretize_bins",
    "load_space",
    "builtin_schema_path",
]

BIN_LABELS = ("small", "mid", "large")


class SchemaError(ValueError):
    """A parameter definition or point references something undeclared."""


class PartitionError(ValueError):
    """Requested binning cannot partition the value list."""


class TransferInfeasibleError(ValueError):
    """Two spaces share no parameters; no transfer is possible."""


@dataclass(frozen=True)
class ParameterDef:
    """One discrete parameter with an ordered list of admissible values.

    ``kind`` is ``"categorical"`` (declared order is the order) or
    ``"ordinal"`` (values must be strictly increasing numbers).
    """

    name: str
    kind: str
    values: tuple
    default: Any = None
    unit: Optional[str] = None
    aliases: tuple = ()

    def __post_init__(self):
        if self.kind not in ("categorical", "ordinal"):
            raise SchemaError(f"unknown parameter kind {self.kind!r}")
        if not self.values:
            raise SchemaError(f"parameter {self.name!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise SchemaError(f"parameter {self.name!r} has duplicate values")
        if self.kind == "ordinal":
            if any(b <= a for a, b in zip(self.values, self.values[1:])):
                raise SchemaError(
                    f"ordinal parameter {self.name!r} values must be strictly increasing"
                )
        if self.default is not None and self.default not in self.values:
            raise SchemaError(
                f"default {self.default!r} of {self.name!r} not among its values"
            )

    def default_or_first(self):
        return self.default if self.default is not None else self.values[0]


@dataclass(frozen=True)
class ValidityRule:
    """Named predicate over a joint assignment; applies only when all of
    ``refs`` are present in the space."""

    name: str
    refs: tuple
    predicate: Callable[[Mapping[str, Any]], bool]


def _rule_row_ge_parallel_read(a: Mapping[str, Any]) -> bool:
    # Parallel read activates 2^(ADC precision) rows at once; a subarray with
    # fewer rows than that cannot realize the configuration.
    return a["rowACIM"] >= 2 ** a["levelADC"]


RULES: dict[str, ValidityRule] = {
    "row_ge_parallel_read": ValidityRule(
        "row_ge_parallel_read", ("rowACIM", "levelADC"), _rule_row_ge_parallel_read
    ),
}


@dataclass(frozen=True)
class DesignPoint:
    """A full assignment of values to parameters. Hashable; equality ignores
    the order in which assignments were supplied."""

    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(sorted(self.items)))

    @classmethod
    def of(cls, assignments: Mapping[str, Any]) -> "DesignPoint":
        return cls(tuple(assignments.items()))

    @property
    def assignments(self) -> dict:
        return dict(self.items)

    def __getitem__(self, name: str):
        for k, v in self.items:
            if k == name:
                return v
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(k == name for k, _ in self.items)

    def replace(self, name: str, value: Any) -> "DesignPoint":
        return DesignPoint(
            tuple((k, value if k == name else v) for k, v in self.items)
        )

    def names(self) -> tuple:
        return tuple(k for k, _ in self.items)


@dataclass(frozen=True)
class BinPartition:
    """Contiguous partition of one parameter's ordered value list."""

    parameter: str
    bins: tuple  # of (label, tuple_of_values)

    def label_of(self, value) -> str:
        for label, members in self.bins:
            if value in members:
                return label
        raise KeyError(f"{value!r} not in any bin of {self.parameter!r}")

    def members(self, label: str) -> tuple:
        for lab, mem in self.bins:
            if lab == label:
                return mem
        raise KeyError(label)

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.bins)


@dataclass(frozen=True)
class DesignSpace:
    """Ordered parameters plus named validity rules."""

    params: tuple  # of ParameterDef, declaration order
    rules: tuple = ()  # of rule names registered in RULES

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate parameter names")
        for rule in self.rules:
            if rule not in RULES:
                raise SchemaError(f"unknown validity rule {rule!r}")

    @property
    def names(self) -> tuple:
        return tuple(p.name for p in self.params)

    def param(self, name: str) -> ParameterDef:
        for p in self.params:
            if p.name == name:
                return p
        raise SchemaError(f"unknown parameter {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(p.name == name for p in self.params)

    def active_rules(self) -> tuple:
        """Rules whose referenced parameters are all declared here."""
        return tuple(
            RULES[r] for r in self.rules if all(ref in self for ref in RULES[r].refs)
        )

    def size(self) -> int:
        """Number of valid points (validity rules applied)."""
        return sum(1 for _ in self.iter_points())

    def iter_points(self) -> Iterator[DesignPoint]:
        rules = self.active_rules()
        value_lists = [p.values for p in self.params]
        names = self.names
        for combo in itertools.product(*value_lists):
            assignment = dict(zip(names, combo))
            if all(rule.predicate(assignment) for rule in rules):
                yield DesignPoint.of(assignment)

    def random_point(self, rng, max_tries: int = 10000) -> DesignPoint:
        """Uniform sample over the raw product, rejection-sampled to validity."""
        for _ in range(max_tries):
            assignment = {p.name: rng.choice(p.values) for p in self.params}
            if all(r.predicate(assignment) for r in self.active_rules()):
                return DesignPoint.of(assignment)
        raise SchemaError("could not sample a valid point (rules too tight?)")

    def restrict(self, value_subsets: Mapping[str, Sequence]) -> "DesignSpace":
        """New space with some parameters restricted to value subsets
        (base order preserved)."""
        new_params = []
        for p in self.params:
            if p.name in value_subsets:
                keep = tuple(v for v in p.values if v in set(value_subsets[p.name]))
                if not keep:
                    raise SchemaError(f"restriction empties parameter {p.name!r}")
                default = p.default if p.default in keep else None
                new_params.append(
                    ParameterDef(p.name, p.kind, keep, default, p.unit, p.aliases)
                )
            else:
                new_params.append(p)
        return DesignSpace(tuple(new_params), self.rules)

    def is_subspace_of(self, other: "DesignSpace") -> bool:
        return all(
            p.name in other and set(p.values) <= set(other.param(p.name).values)
            for p in self.params
        )

    def to_json(self) -> dict:
        return {
            "params": [
                {
                    "name": p.name,
                    "kind": p.kind,
                    "values": list(p.values),
                    "default": p.default,
                    "unit": p.unit,
                    "aliases": list(p.aliases),
                }
                for p in self.params
            ],
            "rules": list(self.rules),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DesignSpace":
        params = tuple(
            ParameterDef(
                name=e["name"],
                kind=e.get("kind", "categorical"),
                values=tuple(e["values"]),
                default=e.get("default"),
                unit=e.get("unit"),
                aliases=tuple(e.get("aliases", ())),
            )
            for e in obj["params"]
        )
        return cls(params, tuple(obj.get("rules", ())))


def enumerate_points(space: DesignSpace) -> list[DesignPoint]:
    """All valid points, lexicographic over declared parameter order."""
    return list(space.iter_points())


def check_validity(point: DesignPoint, space: DesignSpace) -> str:
    """Return ``"valid"`` or ``"violated:<rule>"`` for the first violated rule
    in declaration order. Unknown parameters or values raise SchemaError."""
    assignment = point.assignments
    for name in assignment:
        if name not in space:
            raise SchemaError(f"point assigns unknown parameter {name!r}")
    for p in space.params:
        if p.name not in assignment:
            raise SchemaError(f"point missing parameter {p.name!r}")
        if assignment[p.name] not in p.values:
            raise SchemaError(
                f"value {assignment[p.name]!r} not admissible for {p.name!r}"
            )
    for rule in self_rules(space):
        if not rule.predicate(assignment):
            return f"violated:{rule.name}"
    return "valid"


def self_rules(space: DesignSpace) -> tuple:
    return space.active_rules()


def is_valid(point: DesignPoint, space: DesignSpace) -> bool:
    return check_validity(point, space) == "valid"


def intersection(base: DesignSpace, target: DesignSpace) -> DesignSpace:
    """Shared parameters (base order) with value-set intersection, plus the
    union of rules whose referenced parameters all survive."""
    params = []
    for p in base.params:
        if p.name not in target:
            continue
        other = target.param(p.name)
        shared = tuple(v for v in p.values if v in set(other.values))
        if not shared:
            continue
        default = p.default if p.default in shared else None
        params.append(ParameterDef(p.name, p.kind, shared, default, p.unit, p.aliases))
    if not params:
        raise TransferInfeasibleError("spaces share no parameters")
    names = {p.name for p in params}
    rules = []
    for r in tuple(base.rules) + tuple(target.rules):
        if r not in rules and all(ref in names for ref in RULES[r].refs):
            rules.append(r)
    return DesignSpace(tuple(params), tuple(rules))


def boundary_values(space: DesignSpace, keys: Sequence[str]) -> dict:
    """Per key, the first and last admissible values (declared order)."""
    out = {}
    for k in keys:
        p = space.param(k)  # raises SchemaError if absent
        out[k] = {"min": p.values[0], "max": p.values[-1]}
    return out


def discretize_bins(param: ParameterDef, num_bins: int = 3) -> BinPartition:
    """Contiguous partition into near-equal bins; earlier bins take the extra
    element when sizes cannot be equal."""
    k = len(param.values)
    if num_bins < 1:
        raise PartitionError("num_bins must be >= 1")
    if num_bins > k:
        raise PartitionError(f"cannot split {k} values into {num_bins} bins")
    base, extra = divmod(k, num_bins)
    labels = (
        BIN_LABELS[:num_bins]
        if num_bins <= len(BIN_LABELS)
        else tuple(f"bin{i}" for i in range(num_bins))
    )
    bins = []
    start = 0
    for i in range(num_bins):
        size = base + (1 if i < extra else 0)
        bins.append((labels[i], tuple(param.values[start : start + size])))
        start += size
    return BinPartition(param.name, tuple(bins))


def complete_point(partial: Mapping[str, Any], space: DesignSpace) -> DesignPoint:
    """Fill unassigned parameters of ``space`` with defaults (or first value)."""
    assignment = dict(partial)
    for p in space.params:
        assignment.setdefault(p.name, p.default_or_first())
    return DesignPoint.of({k: v for k, v in assignment.items() if k in space.names})


_SCHEMA_DIR = Path(__file__).parent / "schemas"


def builtin_schema_path(name: str) -> Path:
    return _SCHEMA_DIR / f"{name}.json"


def load_space(path) -> DesignSpace:
    with open(path) as fh:
        return DesignSpace.from_json(json.load(fh))


def load_builtin_space(name: str) -> DesignSpace:
    return load_space(builtin_schema_path(name))
