import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from tvarma import (
    NonSummable,
    TvArmaForecaster,
    TvArmaModel,
    constant_path,
    forward_efficiency,
    make_periodic_path,
    mse_time_comparison,
    predict_finite,
    predict_infinite,
    simulate,
    simulate_many,
    unconditional_mean,
    unconditional_variance,
)
from tvarma.errors import ConfigError
from tvarma.verify import REFERENCE_FIT


def test_ar1_one_step(ar1):
    rep = predict_finite(ar1, 11, 10, [3.0])
    assert rep.point == pytest.approx(1.0 + 0.5 * 3.0)
    assert rep.mse == pytest.approx(1.0)
    lo, hi = rep.interval(0.95)
    assert hi - rep.point == pytest.approx(1.959964, rel=1e-5)


def test_prescribed_value_count(ar1):
    with pytest.raises(ConfigError):
        predict_finite(ar1, 11, 10, [3.0, 1.0])


def test_infinite_matches_finite_arma11(arma11):
    run = simulate(TvArmaModel(arma11, window=(0, 199)), seed=4)
    y = [run.y_at(t) for t in range(200)]
    for k in (1, 3, 7):
        inf = predict_infinite(arma11, 199 + k, 199, y, start=0)
        fin = predict_finite(arma11, 199 + k, 199, [run.y_at(199)], [run.eps_at(199)])
        assert inf.point == pytest.approx(fin.point, abs=1e-8)
        assert inf.mse == pytest.approx(fin.mse)


def test_long_horizon_tends_to_unconditional(arma11):
    rep = predict_finite(arma11, 300, 0, [10.0], [3.0])
    assert rep.point == pytest.approx(unconditional_mean(arma11, 300), abs=1e-10)
    assert rep.mse == pytest.approx(unconditional_variance(arma11, 300), rel=1e-10)


def test_mse_increases_with_horizon(arma11):
    mse = [predict_finite(arma11, 50 + k, 50, [0.0], [0.0]).mse for k in range(1, 15)]
    assert all(b >= a for a, b in zip(mse, mse[1:]))


def test_explosive_projection_raises():
    path = constant_path((1.1,))
    with pytest.raises(NonSummable):
        predict_infinite(path, 10, 9, np.ones(10))


def test_mse_time_comparison():
    a, b, equal = mse_time_comparison(constant_path((0.5,), (0.2,)), 4, 10, 90)
    assert equal and a == pytest.approx(b)
    path = REFERENCE_FIT.to_path()
    a, b, equal = mse_time_comparison(path, 4, 30, 100)
    assert not equal
    a, b, _ = mse_time_comparison(path, 1, 30, 100)
    assert a == pytest.approx(1.077**2) and b == pytest.approx(2.160**2)


def test_forward_efficiency():
    assert forward_efficiency(constant_path((0.5,)), 0).bounded
    assert not forward_efficiency(constant_path((1.1,)), 0).bounded
    periodic = forward_efficiency(make_periodic_path([0.9, 1.05]), 0)
    assert periodic.bounded and periodic.omega_estimate > 0


def test_unbiased_and_orthogonal(arma11):
    n, s, k = 100_000, 60, 3
    ys, es = simulate_many(arma11, 0, s + k, n, seed=8, record=[s, s + k], record_eps=True)
    rep = predict_finite(arma11, s + k, s, [ys[s]], [es[s]])
    err = ys[s + k] - rep.point
    se = np.sqrt(rep.mse / n)
    assert abs(err.mean()) < 4 * se
    assert abs(np.mean(err * ys[s])) < 4 * np.std(err * ys[s]) / np.sqrt(n)
    assert np.mean(err**2) == pytest.approx(rep.mse, rel=4 * np.sqrt(2 / n))


def test_forecaster_estimator(arma11):
    run = simulate(TvArmaModel(arma11, window=(0, 149)), seed=6)
    y = [run.y_at(t) for t in range(150)]
    model = TvArmaForecaster(path=arma11).fit(y)
    direct = predict_finite(arma11, 151, 149, [run.y_at(149)], [run.eps_at(149)])
    assert model.predict([2])[0] == pytest.approx(direct.point, abs=1e-8)
    assert model.predict_mse(2)[0] == pytest.approx(direct.mse)
    assert model.get_params()["start"] == 0
    with pytest.raises(NotFittedError):
        TvArmaForecaster(path=arma11).predict(1)
