import numpy as np
import pytest
from scipy.signal import lfilter

from tvarma import (
    NonSummable,
    TruncationPolicy,
    autocovariance,
    constant_path,
    make_logistic_path,
    make_periodic_path,
    simulate_many,
    stability_report,
    unconditional_mean,
    unconditional_variance,
    wold_weights,
)
from tvarma.errors import ConfigError
from tvarma.moments import yule_walker_autocov
from tvarma.verify import REFERENCE_FIT


def test_ar1_moments(ar1):
    assert unconditional_mean(ar1, 0) == pytest.approx(2.0)
    assert unconditional_variance(ar1, 0) == pytest.approx(4.0 / 3.0)


def test_first_regime_moments():
    path = REFERENCE_FIT.to_path()
    assert unconditional_mean(path, 10) == pytest.approx(3.221, abs=5e-4)
    assert unconditional_variance(path, 10) == pytest.approx(3.122, abs=5e-4)


def test_arma11_wold_weights(arma11):
    w = wold_weights(arma11, 0)
    phi, theta = 0.6, 0.4
    assert w.weights[0] == 1.0
    for j in range(1, 20):
        assert w.weights[j] == pytest.approx(phi ** (j - 1) * (phi + theta))
    assert list(w)[3][0] == -3


def test_explosive_has_no_moments():
    path = constant_path((1.1,), drift=1.0)
    with pytest.raises(NonSummable):
        unconditional_mean(path, 0)
    with pytest.raises(NonSummable):
        unconditional_variance(path, 0)


def test_lag_zero_is_variance(arma11):
    assert autocovariance(arma11, 5, 0) == unconditional_variance(arma11, 5)
    with pytest.raises(ConfigError):
        autocovariance(arma11, 5, -1)


def test_arma21_autocovariance_against_impulse_response():
    ar, ma, sigma2 = (0.5, 0.2), (0.4,), 1.5
    path = constant_path(ar, ma, sigma2=sigma2)
    impulse = np.zeros(400)
    impulse[0] = 1.0
    psi = lfilter([1.0, *ma], [1.0, *(-np.array(ar))], impulse)
    for lag in range(6):
        want = sigma2 * np.dot(psi[: 400 - lag], psi[lag:])
        assert autocovariance(path, 0, lag) == pytest.approx(want, rel=1e-9)


def test_yule_walker_helper():
    g = yule_walker_autocov((0.5,), 1.0, 3)
    assert np.allclose(g, [4 / 3, 2 / 3, 1 / 3, 1 / 6])


def test_periodic_stability():
    stable = stability_report(make_periodic_path([0.99]), 0)
    assert stable.abs_sum_converged
    assert stable.abs_sum == pytest.approx(100.0, rel=1e-6)
    assert stable.diagnostics["consistent"]
    unstable = stability_report(make_periodic_path([1.05]), 0)
    assert not unstable.abs_sum_converged
    assert not unstable.diagnostics["xi_to_zero"]


def test_logistic_stability_decays():
    report = stability_report(make_logistic_path(0.2, 0.8, gamma=0.5, tau=100), 150)
    assert report.abs_sum_converged and report.sq_sum_converged
    assert report.xi_decay < 1e-6
    assert all(np.diff(report.abs_sum_partials) >= 0)


def test_probe_validation(ar1):
    with pytest.raises(ConfigError):
        stability_report(ar1, 0, probes=[-5, -1])


def test_policy_validation():
    with pytest.raises(ConfigError):
        TruncationPolicy(tail_tol=0.0)


def test_variance_against_simulation():
    path = make_logistic_path(0.2, 0.8, gamma=0.5, tau=100, drift=1.0)
    n = 200_000
    ys, _ = simulate_many(path, -100, 110, n, seed=5, record=[110])
    y = ys[110]
    mean, var = unconditional_mean(path, 110), unconditional_variance(path, 110)
    assert abs(y.mean() - mean) < 4 * np.sqrt(var / n)
    assert abs(y.var() - var) < 4 * var * np.sqrt(2.0 / n)
