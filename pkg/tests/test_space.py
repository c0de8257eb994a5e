import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimdse.space import (BinPartition, DesignPoint, DesignSpace, ParameterDef,
                          PartitionError, SchemaError, boundary_values,
                          check_validity, complete_point, discretize_bins,
                          enumerate_points, intersection, is_valid,
                          load_builtin_space)

from conftest import tiny_space


# ---------------------------------------------------------------------------
# parameter and point basics

def test_parameter_rejects_empty_values():
    with pytest.raises(SchemaError):
        ParameterDef("p", "ordinal", ())


def test_parameter_rejects_duplicates():
    with pytest.raises(SchemaError):
        ParameterDef("p", "categorical", ("a", "a"))


def test_ordinal_values_must_increase():
    with pytest.raises(SchemaError):
        ParameterDef("p", "ordinal", (2, 1, 3))


def test_default_must_be_admissible():
    with pytest.raises(SchemaError):
        ParameterDef("p", "ordinal", (1, 2), default=3)


def test_unknown_kind_rejected():
    with pytest.raises(SchemaError):
        ParameterDef("p", "continuous", (1, 2))


def test_point_equality_ignores_insertion_order():
    a = DesignPoint.of({"x": 1, "y": 2})
    b = DesignPoint.of({"y": 2, "x": 1})
    assert a == b and hash(a) == hash(b)


def test_point_replace_and_lookup():
    p = DesignPoint.of({"x": 1, "y": 2})
    q = p.replace("x", 9)
    assert q["x"] == 9 and q["y"] == 2 and p["x"] == 1
    assert "x" in q and "z" not in q
    with pytest.raises(KeyError):
        p["z"]


# ---------------------------------------------------------------------------
# enumeration

def naive_product_count(space: DesignSpace) -> int:
    # independent nested-loop oracle, no shared code with iter_points
    count = 0
    for combo in itertools.product(*[p.values for p in space.params]):
        count += 1
    return count


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=5))
def test_enumeration_count_matches_product_without_rules(sizes):
    params = tuple(
        ParameterDef(f"p{i}", "ordinal", tuple(range(n)))
        for i, n in enumerate(sizes)
    )
    space = DesignSpace(params)
    assert len(enumerate_points(space)) == naive_product_count(space)


def test_enumeration_deterministic(resnet50_space):
    assert enumerate_points(resnet50_space) == enumerate_points(resnet50_space)


def test_validity_rule_filters_enumeration():
    space = tiny_space(rule=True)
    pts = enumerate_points(space)
    assert all(p["rowACIM"] >= 2 ** p["levelADC"] for p in pts)
    # 32 supports level 5; 64 supports 5-6; 128 supports 5-7; times 2 devices
    assert len(pts) == (1 + 2 + 3) * 2


def test_check_validity_labels():
    space = tiny_space(rule=True)
    good = DesignPoint.of({"rowACIM": 128, "levelADC": 7, "memCellType": "SRAM"})
    bad = DesignPoint.of({"rowACIM": 32, "levelADC": 7, "memCellType": "SRAM"})
    assert check_validity(good, space) == "valid"
    assert check_validity(bad, space) == "violated:row_ge_parallel_read"


def test_check_validity_rejects_unknown_parameter():
    space = tiny_space()
    with pytest.raises(SchemaError):
        check_validity(DesignPoint.of({"bogus": 1}), space)


def test_check_validity_rejects_missing_parameter():
    space = tiny_space()
    with pytest.raises(SchemaError):
        check_validity(DesignPoint.of({"rowACIM": 32}), space)


def test_check_validity_rejects_inadmissible_value():
    space = tiny_space()
    pt = DesignPoint.of({"rowACIM": 99, "levelADC": 5, "memCellType": "SRAM"})
    with pytest.raises(SchemaError):
        check_validity(pt, space)


# ---------------------------------------------------------------------------
# intersection

def test_intersection_commutative_and_idempotent(swint_space, vitb_space):
    ab = intersection(swint_space, vitb_space)
    ba = intersection(vitb_space, swint_space)
    assert {p.name: set(p.values) for p in ab.params} == \
           {p.name: set(p.values) for p in ba.params}
    again = intersection(ab, ab)
    assert {p.name: tuple(p.values) for p in again.params} == \
           {p.name: tuple(p.values) for p in ab.params}


def test_intersection_drops_unshared_parameters(resnet50_space, swint_space):
    inter = intersection(resnet50_space, swint_space)
    assert "weightDup" not in inter
    assert "rowDCIM" not in inter
    assert "rowACIM" in inter


def test_intersection_keeps_applicable_rules(swint_space, vitb_space):
    inter = intersection(swint_space, vitb_space)
    assert "row_ge_parallel_read" in inter.rules


# ---------------------------------------------------------------------------
# binning

@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=12))
def test_bin_partition_properties(k, num_bins):
    param = ParameterDef("p", "ordinal", tuple(range(k)))
    if num_bins > k:
        with pytest.raises(PartitionError):
            discretize_bins(param, num_bins)
        return
    part = discretize_bins(param, num_bins)
    flattened = [v for _, members in part.bins for v in members]
    assert flattened == list(param.values)  # full cover, order preserved
    sizes = [len(members) for _, members in part.bins]
    assert max(sizes) - min(sizes) <= 1
    assert sizes == sorted(sizes, reverse=True)  # earlier bins take the extra


def test_three_bin_examples():
    p = ParameterDef("rows", "ordinal", (32, 64, 128, 256, 512))
    part = discretize_bins(p, 3)
    assert part.bins == (("small", (32, 64)), ("mid", (128, 256)), ("large", (512,)))
    q = ParameterDef("levels", "ordinal", (3, 4, 5, 6, 7))
    assert discretize_bins(q, 3).bins == \
        (("small", (3, 4)), ("mid", (5, 6)), ("large", (7,)))


def test_single_bin_contains_everything():
    p = ParameterDef("p", "categorical", ("a", "b", "c"))
    part = discretize_bins(p, 1)
    assert part.bins == (("small", ("a", "b", "c")),)


def test_bin_lookup_helpers():
    p = ParameterDef("p", "ordinal", (1, 2, 3, 4))
    part = discretize_bins(p, 2)
    assert part.label_of(1) == "small" and part.label_of(4) == "mid"
    assert part.members("small") == (1, 2)
    with pytest.raises(KeyError):
        part.label_of(99)
    with pytest.raises(KeyError):
        part.members("huge")


# ---------------------------------------------------------------------------
# restriction, completion, boundaries, serialization

def test_restrict_subsets_and_subspace(swint_space):
    sub = swint_space.restrict({"rowACIM": [32, 64], "typeADC": ["Flash"]})
    assert sub.param("rowACIM").values == (32, 64)
    assert sub.param("typeADC").values == ("Flash",)
    assert sub.is_subspace_of(swint_space)
    assert not swint_space.is_subspace_of(sub)


def test_restrict_empty_subset_rejected(swint_space):
    with pytest.raises(SchemaError):
        swint_space.restrict({"rowACIM": [999]})


def test_complete_point_fills_defaults():
    space = tiny_space()
    pt = complete_point({"rowACIM": 128}, space)
    assert pt["levelADC"] == 5 and pt["memCellType"] == "SRAM"


def test_complete_point_drops_foreign_keys():
    space = tiny_space()
    pt = complete_point({"rowACIM": 32, "foreign": 1}, space)
    assert "foreign" not in pt


def test_boundary_values(swint_space):
    b = boundary_values(swint_space, ["rowACIM", "typeADC"])
    assert b["rowACIM"] == {"min": 32, "max": 512}
    assert b["typeADC"] == {"min": "Flash", "max": "SAR"}
    with pytest.raises(SchemaError):
        boundary_values(swint_space, ["nope"])


def test_space_json_round_trip(swint_space):
    clone = DesignSpace.from_json(json.loads(json.dumps(swint_space.to_json())))
    assert clone == swint_space


def test_random_point_is_valid(swint_space, rng):
    for _ in range(50):
        assert is_valid(swint_space.random_point(rng), swint_space)
