import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimdse.space import DesignPoint, is_valid
from cimdse.surrogate import (LayerDesc, ModelConfigError, PpaRecord,
                              SurrogateConfig, Workload, batch_simulate,
                              adc_conversion_energy_fj, simulate)
from cimdse.workloads import WORKLOADS, get_workload


# ---------------------------------------------------------------------------
# type validation

def test_layer_kind_validation():
    with pytest.raises(ValueError):
        LayerDesc("pooling", 8, 8, 100)


def test_layer_counts_positive():
    with pytest.raises(ValueError):
        LayerDesc("conv", 0, 8, 100)


def test_workload_needs_layers():
    with pytest.raises(ValueError):
        Workload("w", ())


def test_uses_dcim_must_match_layers():
    with pytest.raises(ValueError):
        Workload("w", (LayerDesc("attention", 8, 8, 100),), uses_dcim=False)
    with pytest.raises(ValueError):
        Workload("w", (LayerDesc("conv", 8, 8, 100),), uses_dcim=True)


def test_builtin_workloads_consistent():
    for name in WORKLOADS:
        wl = get_workload(name)
        has_attention = any(l.kind == "attention" for l in wl.layers)
        assert wl.uses_dcim == has_attention
        assert wl.total_ops == sum(l.ops for l in wl.layers)


def test_workload_alias_lookup():
    assert get_workload("Swin-T").name == "swint"
    assert get_workload("ViT-B").name == "vitb"
    assert get_workload("ResNet-50").name == "resnet50"
    with pytest.raises(KeyError):
        get_workload("alexnet")


def test_config_rejects_nonpositive_coefficients():
    with pytest.raises(ModelConfigError):
        SurrogateConfig(cycle_ns=0.0)
    with pytest.raises(ModelConfigError):
        SurrogateConfig(cell_area_um2=(("SRAM", -1.0),))


def test_config_json_round_trip(sim_cfg):
    clone = SurrogateConfig.from_json(json.loads(json.dumps(sim_cfg.to_json())))
    assert clone == sim_cfg


def test_record_rejects_inconsistent_fom():
    with pytest.raises(ValueError):
        PpaRecord(area_mm2=1, power_mw=1, latency_ms=1, energy_eff=2,
                  compute_eff=3, throughput=1, fom=5)


def test_record_rejects_nonpositive():
    with pytest.raises(ValueError):
        PpaRecord(area_mm2=0, power_mw=1, latency_ms=1, energy_eff=1,
                  compute_eff=1, throughput=1, fom=1)


def test_record_metric_aliases(resnet50_space, resnet50_eval):
    rec = resnet50_eval(next(resnet50_space.iter_points()))
    assert rec.metric("area") == rec.area_mm2
    assert rec.metric("power") == rec.power_mw
    assert rec.metric("latency") == rec.latency_ms
    assert rec.metric("fom") == rec.fom


def test_record_json_round_trip(resnet50_space, resnet50_eval):
    rec = resnet50_eval(next(resnet50_space.iter_points()))
    assert PpaRecord.from_json(rec.to_json()) == rec


# ---------------------------------------------------------------------------
# simulate: determinism and identities

def _points(space, rng, n):
    return [space.random_point(rng) for _ in range(n)]


def test_simulate_referentially_transparent(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    for pt in _points(swint_space, rng, 20):
        a = simulate(pt, wl, sim_cfg)
        b = simulate(pt, wl, sim_cfg)
        assert a == b


def test_fom_identity_and_throughput_consistency(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    for pt in _points(swint_space, rng, 50):
        r = simulate(pt, wl, sim_cfg)
        assert math.isclose(r.fom, r.energy_eff * r.compute_eff, rel_tol=1e-12)
        assert math.isclose(r.throughput, wl.total_ops / (r.latency_ms * 1e9),
                            rel_tol=1e-9)
        assert math.isclose(r.power_mw * r.latency_ms,
                            wl.total_ops / (r.energy_eff * 1e6), rel_tol=1e-9)


def test_attention_requires_dcim_parameters(sim_cfg):
    wl = get_workload("swint")
    pt = DesignPoint.of({"rowACIM": 64, "colACIM": 64, "typeADC": "Flash",
                         "levelADC": 5, "muxColADC": 4, "memCellType": "SRAM"})
    with pytest.raises(ModelConfigError):
        simulate(pt, wl, sim_cfg)


# ---------------------------------------------------------------------------
# monotonicity suite (Flash ADC, other fields held fixed)

def _swint_points_with(space, rng, n, **fixed):
    pts = []
    while len(pts) < n:
        pt = space.random_point(rng)
        for k, v in fixed.items():
            pt = pt.replace(k, v)
        if is_valid(pt, space):
            pts.append(pt)
    return pts


def test_area_nondecreasing_in_adc_precision(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    for pt in _swint_points_with(swint_space, rng, 25, typeADC="Flash",
                                 rowACIM=512):
        areas = [simulate(pt.replace("levelADC", lv), wl, sim_cfg).area_mm2
                 for lv in (3, 4, 5, 6, 7)]
        assert all(b >= a for a, b in zip(areas, areas[1:]))


def test_area_nondecreasing_in_array_rows_and_cols(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    for pt in _swint_points_with(swint_space, rng, 25, typeADC="Flash",
                                 levelADC=3):
        for param in ("rowACIM", "colACIM"):
            areas = [simulate(pt.replace(param, v), wl, sim_cfg).area_mm2
                     for v in (32, 64, 128, 256, 512)]
            assert all(b >= a - 1e-12 for a, b in zip(areas, areas[1:]))


def test_latency_nonincreasing_in_parallel_read(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    for pt in _swint_points_with(swint_space, rng, 25, typeADC="Flash",
                                 rowACIM=512):
        lats = [simulate(pt.replace("levelADC", lv), wl, sim_cfg).latency_ms
                for lv in (3, 4, 5, 6, 7)]
        assert all(b <= a + 1e-12 for a, b in zip(lats, lats[1:]))


def test_weight_duplication_trades_area_for_latency(resnet50_space, sim_cfg, rng):
    wl = get_workload("resnet50")
    for pt in _points(resnet50_space, rng, 25):
        off = simulate(pt.replace("weightDup", 0), wl, sim_cfg)
        on = simulate(pt.replace("weightDup", 1), wl, sim_cfg)
        assert on.area_mm2 >= off.area_mm2
        assert on.latency_ms <= off.latency_ms + 1e-12


def test_adc_energy_scaling():
    cfg = SurrogateConfig()
    assert adc_conversion_energy_fj(cfg, "Flash", 5) == \
        pytest.approx(2.0 * 32)
    assert adc_conversion_energy_fj(cfg, "SAR", 5) == pytest.approx(56.0 * 5)


def test_tech_scale_shrinks_area_and_energy(swint_space, rng):
    wl = get_workload("swint")
    ref = SurrogateConfig()
    scaled = SurrogateConfig(tech_scale=0.5)
    for pt in _points(swint_space, rng, 10):
        a = simulate(pt, wl, ref)
        b = simulate(pt, wl, scaled)
        assert math.isclose(b.area_mm2, a.area_mm2 * 0.25, rel_tol=1e-12)
        # energy scales linearly: energy_eff is ops/energy
        assert math.isclose(b.energy_eff, a.energy_eff * 2.0, rel_tol=1e-12)


def test_noise_is_seed_deterministic(swint_space, rng):
    wl = get_workload("swint")
    noisy = SurrogateConfig(noise_sigma=0.05, seed=7)
    pt = swint_space.random_point(rng)
    assert simulate(pt, wl, noisy) == simulate(pt, wl, noisy)
    other = SurrogateConfig(noise_sigma=0.05, seed=8)
    assert simulate(pt, wl, noisy) != simulate(pt, wl, other)


# ---------------------------------------------------------------------------
# batch_simulate

def test_batch_simulate_matches_elementwise(swint_space, sim_cfg, rng):
    wl = get_workload("swint")
    pts = _points(swint_space, rng, 8)
    serial = [simulate(p, wl, sim_cfg) for p in pts]
    assert batch_simulate(pts, wl, sim_cfg) == serial
    assert batch_simulate(pts, wl, sim_cfg, parallelism=4) == serial


def test_batch_simulate_reports_failing_index(sim_cfg):
    wl = get_workload("swint")
    bad = DesignPoint.of({"rowACIM": 64})
    with pytest.raises(Exception, match="batch element 0"):
        batch_simulate([bad], wl, sim_cfg)


def test_batch_simulate_rejects_bad_parallelism(sim_cfg):
    with pytest.raises(ValueError):
        batch_simulate([], get_workload("swint"), sim_cfg, parallelism=0)
