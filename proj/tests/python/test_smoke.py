import math

import pytest

import msmbias


def scenario1():
    return msmbias.LatentParams(lambda_=0.5, pi0=0.9, pi1=0.45, p0=0.05, p1=0.9, gamma=2.0)


def test_bias_values():
    b = msmbias.bias_pair(scenario1())
    assert b.bias_msm == pytest.approx(-0.418, abs=1e-12)
    assert b.bias_cm == pytest.approx(-0.3395061728395062, abs=1e-12)


def test_domain_error_carries_code():
    p = scenario1()
    p.pi1 = 1.0
    with pytest.raises(msmbias.DomainError) as info:
        msmbias.bias_msm(p)
    assert info.value.code == "non_positivity"


def test_invert():
    inv = msmbias.invert_observables(msmbias.ObservedSummary(0.77, 0.42, 0.32, 0.44), 0.05, 0.95)
    assert inv.lambda_ == pytest.approx(0.8, abs=1e-12)


def test_curve_gaps():
    out = msmbias.bias_curve(scenario1(), "pi1", [0.0, 0.5])
    assert out["points"][0]["bias_msm"] is None
    assert math.isfinite(out["points"][1]["bias_msm"])


def test_sensitivity_and_simulation():
    cfg = {
        "observed": {"ell": 0.77, "omega": 0.42, "pi_star0": 0.32, "pi_star1": 0.44},
        "sensitivity_range": [0.9, 0.98],
        "specificity_range": [0.9, 0.98],
        "gamma": -8.96,
        "draws": 200,
        "seed": 2020,
    }
    rep = msmbias.sensitivity(cfg)
    assert rep["feasible"] == 200
    assert rep == msmbias.sensitivity(cfg)
    sim = msmbias.simulate("1", n=200, reps=10)
    assert [r["estimator"] for r in sim["rows"]] == ["cm", "msm"]
