import math

import numpy as np
import pytest

import ctrwlab


def test_step_path_roundtrip():
    p = ctrwlab.StepPath([0.0, 0.5], [1.0, 3.0], 1.0)
    assert p(0.25) == 1.0
    assert p(0.5) == 3.0
    assert p.left_limit(0.5) == 1.0
    assert len(p) == 2
    np.testing.assert_array_equal(p.times, [0.0, 0.5])
    assert ctrwlab.total_variation(p, 1.0) == 2.0


def test_bad_path_raises():
    with pytest.raises(ctrwlab.DataError):
        ctrwlab.StepPath([0.5, 0.0], [1.0, 2.0], 1.0)
    with pytest.raises(ctrwlab.Error):
        ctrwlab.StepPath([0.0, 0.5], [1.0], 1.0)


def test_simulate_is_deterministic():
    a = ctrwlab.simulate(alpha=1.5, n=200, seed=3, stream=1)
    b = ctrwlab.simulate(alpha=1.5, n=200, seed=3, stream=1)
    assert a["x"] == b["x"]
    x = a["x"]
    # zero-order moving average: X_1 = n^{-1/alpha} * sum of the innovations
    s = a["scaling"] * a["innovations"][1:].sum()
    assert math.isclose(x(1.0), s, rel_tol=1e-12, abs_tol=1e-12)


def test_ctrw_and_integral():
    b = ctrwlab.simulate(alpha=1.5, beta=0.8, n=100, seed=1)
    x = b["x"]
    i = ctrwlab.ito_integral("1", x)
    assert math.isclose(i(1.0), x(1.0), rel_tol=1e-12, abs_tol=1e-12)


def test_metrics_order():
    x = ctrwlab.StepPath([0.0, 0.5], [0.0, 1.0], 1.0)
    y = ctrwlab.StepPath([0.0, 0.52], [0.0, 1.0], 1.0)
    u, j = ctrwlab.d_uniform(x, y), ctrwlab.d_j1(x, y)
    m, mesh = ctrwlab.d_m1(x, y)
    assert u == 1.0
    assert j == pytest.approx(0.02)
    assert m <= j + mesh


def test_expression_and_stats():
    assert ctrwlab.evaluate("0.5*tanh(y)", y=1.0) == pytest.approx(0.5 * math.tanh(1.0))
    with pytest.raises(ctrwlab.ParamError):
        ctrwlab.evaluate("1 +")
    assert ctrwlab.wasserstein1([0.0, 1.0], [1.0, 2.0]) == 1.0
    stat, _ = ctrwlab.ks_two_sample([0.0, 1.0], [0.5, 1.5])
    assert stat == 0.5
    z = ctrwlab.sample_stable(1.5, count=500, seed=2)
    assert z.shape == (500,) and np.isfinite(z).all()


def test_run_scenario():
    cfg = {"kind": "simulate", "seed": 4, "reps": 10, "n_list": [100],
           "params": {"process": {"alpha": 1.5}, "paths": 0}}
    rep = ctrwlab.run_scenario(cfg)
    names = [e["name"] for e in rep["estimates"]]
    assert "x_T n=100" in names
    assert ctrwlab.canonical_report(cfg) == ctrwlab.canonical_report(cfg, threads=2)
    with pytest.raises(ctrwlab.ParamError):
        ctrwlab.run_scenario({"kind": "simulate", "bogus": 1})
    with pytest.raises(ctrwlab.ParamError):
        ctrwlab.run_scenario({"kind": "simulate", "params": {"process": {"alpha": 2.5}}})
