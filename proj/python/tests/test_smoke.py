import json
import math

import numpy as np
import pytest

import kirchhoff_decay as kd


@pytest.fixture(scope="module")
def gamma1_trace():
    p = kd.build_problem([1, 2, 3], 1.0, 0.05, [1, 0.5, 0.25], [0, 0, 0])
    return kd.evolve(p, 1e5)


def test_problem_properties():
    p = kd.build_problem([3, 1, 2], 1.0, 0.1, [0.25, 1, 0.5], [0, 0, 0])
    assert p.eigenvalues == [1, 2, 3]
    assert p.u0 == [1, 0.5, 0.25]
    assert p.nu == 1.0
    assert p.b0 == pytest.approx(1 + 1 + 0.5625)
    assert len(p) == 3


def test_invalid_input_is_value_error():
    with pytest.raises(ValueError):
        kd.build_problem([1, 2], 1.0, 0.1, [0, 0], [0, 0])
    with pytest.raises(kd.InvalidInputError):
        kd.build_problem([1, 2], 1.0, 2.0, [1, 0], [0, 0])


def test_blowup_is_numeric_error():
    p = kd.build_problem([1], 1.0, 0.9, [0.1], [10])
    with pytest.raises(kd.NumericError):
        kd.evolve(p, 100.0)


def test_trace_arrays(gamma1_trace):
    tr = gamma1_trace
    assert tr.kind == "nonlinear"
    t, u = tr.t, tr.u
    assert t[0] == 0.0 and t[-1] == 1e5
    assert u.shape == (len(tr), 3)
    assert np.all(np.diff(t) > 0)
    np.testing.assert_allclose((1 + t[-1]) * tr.b[-1], 0.5, rtol=1e-3)
    e = np.array(tr.lyapunov_energy())
    assert np.all(e[1:] <= e[:-1] * (1 + 1e-8))


def test_theorem_2_report(gamma1_trace):
    rep = kd.verify_theorem_2(gamma1_trace)
    assert rep["pass"]
    claims = {c["id"]: c for c in rep["claims"]}
    assert claims["B2"]["measured"] == pytest.approx(0.5, rel=0.02)
    assert claims["B2"]["predicted"] == 0.5
    assert claims["B4b:du"]["measured"] == pytest.approx(0.125, rel=0.05)
    assert rep["metadata"]["gamma"] == "1"


def test_other_verifiers(gamma1_trace):
    assert kd.verify_theorem_A(gamma1_trace)["pass"]
    assert kd.verify_theorem_1(gamma1_trace, [2.0, 3.0])["pass"]
    assert kd.verify_proposition_3(gamma1_trace)["pass"]
    lin = kd.evolve_linear([1, 2], "power", 1.0, 1.0, 0.05, [1, 0.5], [0, 0], 1e4)
    assert lin.kind == "linear"
    assert kd.verify_propositions(lin, 1.0)["pass"]
    with pytest.raises(ValueError):
        kd.verify_propositions(lin, 1.5)


def test_predictions_and_limit_ode():
    p = kd.predict_limits(1.0, 1.0)
    assert p["b"] == 0.5 and p["du"] == 0.125
    assert kd.limit_ode_solution(4.0, 1.0, 1.0, 1.0) == pytest.approx(1 / 3, abs=4e-16)


def test_reference_agrees():
    p = kd.build_problem([1, 2], 1.0, 0.1, [1, 0.5], [0, 0])
    a, r = kd.evolve(p, 10.0), kd.reference_solve(p, 10.0)
    scale = np.max(np.abs(r.u))
    assert np.max(np.abs(a.u - r.u)) <= 1e-6 * scale


def test_cli_entry_point(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"eigenvalues": [1, 2], "u0": [1, 0.5], "t_end": 1e4,
                               "out": str(tmp_path / "out")}))
    assert kd.main(["verify", "--config", str(cfg), "--claims", "B2"]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["pass"] is True
    assert kd.main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    header = (tmp_path / "out" / "trace.csv").read_text().splitlines()[0]
    assert header.startswith("t,b,B,")
    assert not math.isnan(float(report["reports"][0]["claims"][0]["measured"]))
