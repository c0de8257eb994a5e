import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimdse.runtime_cost import (RunTrace, RuntimeCostModel,
                                 average_total_runtime, default_runtime_model,
                                 estimate_runtime, estimate_runtime_report,
                                 total_runtime_minutes)


MODEL = RuntimeCostModel(((16, 5.9), (32, 7.2), (48, 9.9)))


def test_model_needs_two_points():
    with pytest.raises(ValueError):
        RuntimeCostModel(((16, 5.9),))


def test_model_rejects_unsorted_batches():
    with pytest.raises(ValueError):
        RuntimeCostModel(((32, 7.2), (16, 5.9)))


def test_model_rejects_decreasing_runtimes():
    with pytest.raises(ValueError):
        RuntimeCostModel(((16, 7.2), (32, 5.9)))


def test_interpolation_exact_at_characterized_points():
    for n, t in MODEL.characterized:
        minutes, clamped = MODEL.batch_minutes(n)
        assert minutes == t and not clamped


def test_interpolation_midpoint():
    minutes, clamped = MODEL.batch_minutes(24)
    assert minutes == pytest.approx((5.9 + 7.2) / 2)
    assert not clamped


def test_clamping_below_and_above():
    lo, clamped_lo = MODEL.batch_minutes(1)
    hi, clamped_hi = MODEL.batch_minutes(96)
    assert lo == 5.9 and clamped_lo
    assert hi == 9.9 and clamped_hi


def test_estimate_single_batch():
    assert estimate_runtime(RunTrace((32,)), MODEL) == pytest.approx(7.2)


def test_estimate_skips_empty_iterations_but_charges_overhead():
    model = RuntimeCostModel(((16, 5.9), (32, 7.2)), logic_overhead=0.5)
    est = estimate_runtime(RunTrace((16, 0, 16)), model)
    assert est == pytest.approx(5.9 * 2 + 0.5 * 3)


def test_estimate_rejects_empty_trace():
    with pytest.raises(ValueError):
        estimate_runtime(RunTrace(()), MODEL)


def test_trace_rejects_negative_counts():
    with pytest.raises(ValueError):
        RunTrace((-1,))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=64), min_size=1, max_size=10),
       st.lists(st.integers(min_value=0, max_value=64), min_size=1, max_size=10))
def test_estimate_linear_in_trace_concatenation(a, b):
    whole = estimate_runtime(RunTrace(tuple(a + b)), MODEL)
    parts = estimate_runtime(RunTrace(tuple(a)), MODEL) + \
        estimate_runtime(RunTrace(tuple(b)), MODEL)
    assert whole == pytest.approx(parts)


def test_clamp_events_counted():
    report = estimate_runtime_report(RunTrace((1, 16, 96)), MODEL)
    assert report.clamp_events == 2


def test_total_runtime_formula():
    assert total_runtime_minutes(622, 32, 7.2) == pytest.approx(622 / 32 * 7.2)
    with pytest.raises(ValueError):
        total_runtime_minutes(10, 0, 1.0)


def test_average_total_runtime():
    samples = {"ga": 1048, "sa": 622, "tpe": 1660}
    avg = average_total_runtime(samples, 32, 7.2)
    expected = sum(s / 32 * 7.2 for s in samples.values()) / 3
    assert avg == pytest.approx(expected)
    with pytest.raises(ValueError):
        average_total_runtime({}, 32, 7.2)


def test_model_json_round_trip():
    clone = RuntimeCostModel.from_json(json.loads(json.dumps(MODEL.to_json())))
    assert clone == MODEL


def test_default_model_loads_and_covers_batch_sizes():
    model = default_runtime_model()
    assert len(model.characterized) >= 2
    for n in (16, 32, 48):
        minutes, clamped = model.batch_minutes(n)
        assert minutes > 0 and not clamped
