import math

import pytest

import ssf_lab


def test_heat_invariant_text():
    assert ssf_lab.heat_invariant(1, 1) == "(-1)*u[0]"
    assert "u[0]^2" in ssf_lab.heat_invariant(2, 1)
    assert ssf_lab.taylor_operator(1, 2).startswith("((-1)*u[0,0])")
    assert "g_2" in ssf_lab.invariant_tables(1, 2)


def test_reflectionless_well():
    pt = ssf_lab.Potential.poschl_teller(1)
    a, b = ssf_lab.jost(pt, 1.0)
    assert abs(a + 1j) < 1e-8
    assert abs(b) < 1e-8
    assert ssf_lab.bound_states(pt) == pytest.approx([-1.0], abs=1e-8)
    xi = ssf_lab.ssf(pt, [1.0, 4.0])
    assert xi[0] == pytest.approx(-0.5, abs=1e-7)
    assert xi[1] == pytest.approx(-(2 / math.pi) * math.atan(0.5), abs=1e-7)
    assert ssf_lab.heat_coefficient(pt, 1) == pytest.approx(4.0)
    assert ssf_lab.ssf_coefficient(pt, 0) == pytest.approx(-2 / math.pi)


def test_identity_reports_are_dicts():
    pt = ssf_lab.Potential.poschl_teller(1)
    rep = ssf_lab.trace_identity(pt, 1)
    assert rep["pass"] is True
    assert abs(rep["residual"]) < 1e-4
    half = ssf_lab.trace_identity(pt, 0, half=True)
    assert half["rhs"] == pytest.approx(-2.0)
    assert ssf_lab.levinson(pt)["pass"] is True


def test_heat_and_resolvent_routes():
    pt = ssf_lab.Potential.poschl_teller(1)
    h = ssf_lab.heat_trace(pt, 0.05)
    assert h["ssf"] == pytest.approx(h["series"], rel=0.02)
    r = ssf_lab.resolvent_trace(pt, complex(-100.0, 0.0))
    assert abs(r["series"] - r["ssf"]) < 1e-3 * abs(r["ssf"])


def test_three_dimensional_phase():
    g = ssf_lab.Potential.gaussian_well(1.0, 1.0, 3)
    assert g.dim == 3
    assert ssf_lab.phase_shift(g, 0, 1.0) > 0.0


def test_run_config_without_files():
    cfg = {"potential": {"dim": 1, "family": "zero"}, "tasks": [{"kind": "levinson"}]}
    out = ssf_lab.run_config(cfg)
    assert out["exit_status"] == 0
    assert out["tasks"][0]["task"] == "levinson"


def test_errors_carry_a_kind():
    with pytest.raises(ssf_lab.SsfLabError) as info:
        ssf_lab.run_config({"potential": {"dim": 1, "family": "zero"}, "tasks": [{"kind": "nope"}]})
    assert info.value.kind == "usage"
    with pytest.raises(ssf_lab.SsfLabError):
        ssf_lab.heat_invariant(-1, 1)
