import math

import pytest

import dogs_gibbs as dg


def two_variable_bound():
    model = dg.IsingModel([(0, 1, 0.25)], [0.0, 0.0])
    return model, dg.influence_bound(model)


def test_bound_matches_closed_form():
    _, c = two_variable_bound()
    assert c.at(0, 1) == pytest.approx(math.tanh(0.25), abs=1e-12)
    assert c.provenance != ""


def test_zero_length_scan_has_unit_variation():
    _, c = two_variable_bound()
    assert dg.dobrushin_variation(dg.Scan.systematic(2, 0), c, "unit:0") == 1.0


def test_optimizer_never_worse_and_bounds_exact_tv():
    model = dg.IsingModel.lattice(2, 2, seed=3)
    c = dg.influence_bound(model)
    init = dg.Scan.uniform(4, 8)
    result = dg.optimize_scan(init, c)
    assert result["dv_after"] <= result["dv_before"]
    scan = result["scan"]
    assert scan.kind == "deterministic"
    assert len(scan) == 8
    assert dg.dobrushin_variation(scan, c) == pytest.approx(result["dv_after"], abs=1e-12)
    assert dg.exact_tv(model, scan) <= result["dv_after"] + 1e-12


def test_trace_ends_at_dv():
    model = dg.IsingModel.lattice(3, 3, seed=1)
    c = dg.influence_bound(model)
    scan = dg.Scan.systematic(9, 20)
    trace = dg.dv_trace(scan, c)
    assert len(trace) == 20
    assert trace[-1] == pytest.approx(dg.dobrushin_variation(scan, c), abs=1e-12)


def test_estimate_is_reproducible():
    model = dg.IsingModel.lattice(3, 3, seed=1)
    scan = dg.Scan.systematic(9, 30)
    a = dg.estimate_expectation(model, scan, [0], 20, seed=5)
    b = dg.estimate_expectation(model, scan, [0], 20, seed=5, threads=2)
    assert a["values"] == b["values"]
    assert a["R"] == 20


def test_model_json_round_trip():
    model = dg.IsingModel.lattice(2, 3, seed=2)
    again = dg.model_from_json(model.to_json())
    assert again.couplings == model.couplings
    assert again.unary == model.unary


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        dg.IsingModel([(0, 0, 0.1)], [0.0])


def test_small_scan_evaluation_report():
    report = dg.exp_scan_evaluation(grid=[10, 20], seeds=[1], rows=3, cols=3)
    assert report["id"] == "scan_eval"
    assert report["summary"]["per_seed"][0]["dogs_final"] <= report["summary"]["per_seed"][0]["systematic_final"]
