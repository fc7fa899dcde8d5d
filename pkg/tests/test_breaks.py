import json

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from tvarma import (
    Assumption1Violated,
    BreakAR,
    SegmentedAR,
    dab_variance,
    dabar_variance,
    fit_segmented_ar,
    forecast_eval,
    persistence_measures,
    predict_finite,
    simulate_many,
    unconditional_variance,
)
from tvarma.breaks import SegmentCosts, _design, ar2_stationary_variance, dp_partition, exhaustive_partition
from tvarma.errors import ConfigError, SeriesTooShort
from tvarma.verify import REFERENCE_FIT, REFERENCE_PERSISTENCE


@pytest.mark.parametrize("key", sorted(REFERENCE_PERSISTENCE))
def test_within_regime_measures(key):
    report = persistence_measures(REFERENCE_FIT, t_range=(0, 0), dab_horizon=0)
    got = [getattr(seg, key) for seg in report.segments]
    assert np.allclose(got, REFERENCE_PERSISTENCE[key], rtol=5e-3)


def test_white_noise_persistence_is_one():
    model = SegmentedAR(2, (), (0.0,), ((0.0, 0.0),), (1.3,))
    seg = persistence_measures(model, t_range=(0, 0)).segments[0]
    assert seg.P == pytest.approx(1.0)
    assert seg.lar == 0.0


@pytest.mark.parametrize("l", [0, 4, 12, 100])
def test_closed_form_matches_green_variance(l):
    dv = dabar_variance(REFERENCE_FIT, l)
    want = unconditional_variance(REFERENCE_FIT.to_path(), 88 + l)
    assert dv.var == pytest.approx(want, rel=1e-12)
    assert dv.P == pytest.approx(dv.var / 2.160**2)


def test_closed_form_against_simulation():
    n, t = 200_000, 96
    ys, _ = simulate_many(REFERENCE_FIT.to_path(), -300, t, n, seed=11, record=[t])
    var = dabar_variance(REFERENCE_FIT, 8).var
    assert abs(ys[t].var() - var) < 4 * var * np.sqrt(2.0 / n)


def test_coinciding_breaks():
    ar = ((0.5, 0.2), (0.71, 0.127), (0.3, 0.1))
    got = dab_variance(ar, (1.0, 2.3, 1.5), 20, 20, 0).var
    assert got == pytest.approx(ar2_stationary_variance(0.5, 0.2, 1.0), rel=1e-12)


def test_unstable_outer_regime():
    with pytest.raises(Assumption1Violated):
        dab_variance(((1.2, 0.1), (0.5, 0.1), (0.3, 0.1)), (1.0, 1.0, 1.0), 10, 20, 0)


def test_dp_matches_exhaustive():
    rng = np.random.default_rng(0)
    y = np.cumsum(rng.standard_normal(50)) * 0.3 + rng.standard_normal(50)
    X, z = _design(y, 2)
    costs = SegmentCosts(X, z, 5)
    for l in range(3):
        a, ends_a = dp_partition(costs, len(z), l, 5)
        b, ends_b = exhaustive_partition(costs, len(z), l, 5)
        assert a == b and ends_a == ends_b


def test_segmentation_checks():
    y = np.random.default_rng(1).standard_normal(40)
    with pytest.raises(ConfigError):
        fit_segmented_ar(y, 2, 1, min_seg=3)
    with pytest.raises(SeriesTooShort):
        fit_segmented_ar(y, 2, 3, min_seg=12)
    with pytest.raises(ConfigError):
        fit_segmented_ar(y, 2, 1, criterion="bogus")


@pytest.mark.parametrize("criterion", ["ssr", "gaussian"])
def test_no_breaks_selected_for_stationary_series(criterion):
    path = SegmentedAR(2, (), (0.5,), ((0.5, 0.2),), (1.0,)).to_path()
    ys, _ = simulate_many(path, -200, 215, 1, seed=3, record=range(0, 216))
    y = np.array([ys[t][0] for t in range(216)])
    result = fit_segmented_ar(y, 2, 2, criterion=criterion)
    assert result.selected == 0
    assert result.best.nobs == 216


def test_segmented_json_round_trip():
    again = SegmentedAR.from_json(REFERENCE_FIT.to_json())
    assert again == REFERENCE_FIT
    data = json.loads(REFERENCE_FIT.to_json())
    assert data["segments"][1]["sigma"] == 2.3


def test_estimator_api():
    ys, _ = simulate_many(REFERENCE_FIT.to_path(), -200, 215, 1, seed=4, record=range(216))
    y = np.array([ys[t][0] for t in range(216)])
    est = BreakAR(p=2, max_breaks=2, criterion="gaussian")
    with pytest.raises(NotFittedError):
        est.predict(2)
    est.fit(y)
    assert len(est.break_times_) == est.result_.selected
    fc = est.predict(3)
    path = est.model_.to_path()
    assert fc[2] == pytest.approx(predict_finite(path, 218, 215, [y[-1], y[-2]]).point)
    assert est.get_params()["p"] == 2


def test_perfect_and_zero_forecasts():
    actual = np.array([1.0, -2.0, 3.0, 0.5])
    perfect = forecast_eval(actual, actual)["metrics"][0]
    assert perfect["rmse"] == perfect["mae"] == perfect["theil_u"] == 0.0
    zero = forecast_eval(actual, np.zeros(4))["metrics"][0]
    assert zero["rmse"] == pytest.approx(np.sqrt(np.mean(actual**2)))
    assert zero["theil_u"] == pytest.approx(1.0)


def test_segmented_model_forecasts_better_than_constant():
    path = REFERENCE_FIT.to_path()
    reps, wins = 11, np.zeros(3)
    for i in range(reps):
        ys, _ = simulate_many(path, -300, 215, 1, seed=50 + i, record=range(216))
        y = np.array([ys[t][0] for t in range(216)])
        fits = fit_segmented_ar(y[:176], 2, 2)
        models = (fits.best.to_path(), fits.models[0].to_path())
        for j, h in enumerate((1, 4, 8)):
            origins = range(175, 216 - h)
            actual = np.array([y[s + h] for s in origins])
            rmse = []
            for m in models:
                pred = np.array([predict_finite(m, s + h, s, [y[s], y[s - 1]]).point for s in origins])
                rmse.append(forecast_eval(actual, pred, [h])["metrics"][0]["rmse"])
            wins[j] += rmse[0] < rmse[1]
    assert np.all(wins > reps / 2)


def test_forecast_eval_shapes():
    with pytest.raises(Exception):
        forecast_eval(np.zeros((3, 2)), np.zeros(3))
    out = forecast_eval(np.ones((5, 2)), np.zeros((5, 2)), [1, 4])
    assert [m["horizon"] for m in out["metrics"]] == [1, 4]
