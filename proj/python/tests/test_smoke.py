import math

import numpy as np
import pytest

import fbreak


def test_critical_value_round_trip():
    cv = fbreak.critical_value(0.05)
    assert cv == pytest.approx(2.3978, abs=1e-4)
    assert fbreak.cdf_V(cv) == pytest.approx(0.95, abs=1e-12)
    assert fbreak.quantile_V(fbreak.cdf_V(1.3)) == pytest.approx(1.3, abs=1e-12)


def test_simulate_is_reproducible():
    y1, x1 = fbreak.simulate("S1", 200, seed=3)
    y2, x2 = fbreak.simulate("S1", 200, seed=3)
    assert len(y1) == 200 and x1.shape == (200, 1)
    assert y1 == y2 and np.array_equal(x1, x2)
    y3, _ = fbreak.simulate("P1a", 200, delta=0.0, seed=3)
    assert y3 == y1


def test_losses_and_tests():
    y, x = fbreak.simulate("S1", 300, seed=11)
    losses, surprise = fbreak.forecast_losses(y, x, in_sample=150)
    assert len(losses) == len(surprise) == 150
    assert all(v >= 0 for v in losses)
    report = fbreak.test_losses(losses, surprise, statistic="MQmax[nuL]")
    assert report["statistic"] == "MQmax"
    assert report["variance_estimator"] == "nuL"
    assert 0.0 <= report["p_value"] <= 1.0
    assert report["reject"] == (report["transformed"] > report["critical_value"])


def test_forecasts_matches_loss_route():
    y, x = fbreak.simulate("S1", 300, seed=11)
    reports = fbreak.test_forecasts(y, x, in_sample=150, statistics=["MQmax[nuL]", "GRt"])
    assert [r["statistic"] for r in reports] == ["MQmax", "GRt"]
    losses, surprise = fbreak.forecast_losses(y, x, in_sample=150)
    direct = fbreak.test_losses(losses, surprise, statistic="MQmax[nuL]")
    assert reports[0]["transformed"] == pytest.approx(direct["transformed"], rel=1e-12)
    alias = fbreak.test_forecasts(y, x, in_sample=150, statistics=["tstat"])
    assert alias[0]["statistic"] == "GRt"
    assert alias[0]["transformed"] == pytest.approx(reports[1]["transformed"], rel=1e-15)


def test_newey_west_lag_zero_is_variance():
    x = np.random.default_rng(0).normal(size=500).tolist()
    assert fbreak.newey_west(x, 0) == pytest.approx(np.var(x), rel=1e-12)


def test_run_experiment_rows():
    rows = fbreak.run_experiment("S1", 200, 100, statistics=["Qmax[q1]", "GRt"], replications=200, threads=2)
    assert len(rows) == 2
    for r in rows:
        assert 0.0 <= r["rejection_rate"] <= 1.0
        assert r["n_reps"] == 200
        assert math.isclose(r["mc_se"], math.sqrt(r["rejection_rate"] * (1 - r["rejection_rate"]) / 200))


def test_errors_are_translated():
    with pytest.raises(fbreak.FbreakError):
        fbreak.simulate("nope", 200)
    with pytest.raises(fbreak.FbreakError):
        fbreak.critical_value(1.5)
    assert "table1" in fbreak.preset_names()
