import numpy as np
import pytest

from tvarma import (
    InsufficientHistory,
    NotInvertible,
    TruncationPolicy,
    TvArmaModel,
    constant_path,
    invertibility_report,
    recover_errors,
    simulate,
    stability_report,
)


def test_invertible_ma1():
    rep = invertibility_report(constant_path((), (0.5,)), 0)
    assert rep.converged
    assert rep.abs_sum == pytest.approx(2.0, rel=1e-8)


def test_unit_root_ma_not_invertible():
    rep = invertibility_report(constant_path((), (1.0,)), 0)
    assert not rep.converged
    with pytest.raises(NotInvertible):
        recover_errors(constant_path((), (1.0,)), np.zeros(50))


def test_mirror_matches_ar_side():
    path = constant_path((0.7,), (0.6, -0.2))
    inv = invertibility_report(path, 0)
    mirror = stability_report(path.mirrored(), 0)
    assert inv.abs_sum == mirror.abs_sum
    assert inv.theta_at_probes == mirror.xi_at_probes


def _run(path, n, seed):
    run = simulate(TvArmaModel(path, window=(0, n - 1)), seed=seed)
    return run, np.array([run.y_at(t) for t in range(n)])


def test_pure_ar_recovery_exact():
    path = constant_path((0.5, 0.2), drift=1.0)
    run, y = _run(path, 30, 1)
    rec = recover_errors(path, y)
    assert rec.times[0] == 2
    for t, e in rec.as_dict().items():
        assert e == pytest.approx(run.eps_at(t), abs=1e-12)


def test_ma_recovery_with_short_window():
    path = constant_path((0.3,), (0.4,), drift=0.5)
    run, y = _run(path, 60, 2)
    policy = TruncationPolicy(window=20)
    rec = recover_errors(path, y, policy=policy)
    assert len(rec.times) > 0
    for t, e in rec.as_dict().items():
        assert e == pytest.approx(run.eps_at(t), abs=1e-6)


def test_near_unit_ma_needs_long_history():
    path = constant_path((), (0.95,))
    _, y = _run(path, 80, 3)
    with pytest.raises(InsufficientHistory) as info:
        recover_errors(path, y)
    assert info.value.required > 80
    run, y = _run(path, info.value.required + 5, 3)
    rec = recover_errors(path, y)
    t = int(rec.times[-1])
    assert rec.as_dict()[t] == pytest.approx(run.eps_at(t), abs=1e-6)


def test_requested_times_without_history():
    path = constant_path((), (0.4,))
    _, y = _run(path, 80, 4)
    with pytest.raises(InsufficientHistory):
        recover_errors(path, y, times=[5])
