import numpy as np
import pytest

from tvarma import TvArmaModel, companion_product, constant_path, represent, simulate, simulate_many, xi_m
from tvarma.errors import ConfigError, DataError
from tvarma.process import decompose_innovations, forecast_weights
from tvarma.verify import random_path


def test_zero_coefficients_give_noise():
    path = constant_path((0.0, 0.0), (0.0,))
    run = simulate(TvArmaModel(path, window=(1, 50)), seed=1)
    assert np.allclose(run.y, run.eps)


def test_seeded_runs_are_identical():
    model = TvArmaModel(constant_path((0.5,), (0.3,)), window=(0, 40))
    a, b = simulate(model, seed=9), simulate(model, seed=9)
    assert np.array_equal(a.y, b.y)
    assert a.to_csv() == b.to_csv()


def test_initial_values_used():
    path = constant_path((0.5,), drift=0.0)
    run = simulate(TvArmaModel(path, window=(1, 3)), seed=0, initial_values={"y": [4.0]}, burn_in=0)
    assert run.y_at(1) == pytest.approx(2.0 + run.eps_at(1))
    with pytest.raises(ConfigError):
        simulate(TvArmaModel(path), initial_values={"z": [1.0]})


def test_student_t_needs_df():
    with pytest.raises(ConfigError):
        TvArmaModel(constant_path((0.5,)), noise="student_t", df=3)


@pytest.mark.parametrize("seed", range(5))
def test_explicit_solution_matches_recursion(seed):
    rng = np.random.default_rng(seed)
    path = random_path(rng, 2, 2, window=(-50, 150))
    run = simulate(TvArmaModel(path, window=(1, 100)), seed=rng, burn_in=10)
    for s, t in ((20, 21), (30, 45), (60, 60 + 1), (70, 90)):
        got = represent(path, t, s, [run.y_at(s), run.y_at(s - 1)], [run.eps_at(s), run.eps_at(s - 1)],
                        [run.eps_at(r) for r in range(s + 1, t + 1)])
        assert got == pytest.approx(run.y_at(t), rel=1e-9, abs=1e-9)


def test_one_step_representation(arma11):
    y = represent(arma11, 6, 5, [2.0], [0.5], [0.1])
    assert y == pytest.approx(0.5 + 0.6 * 2.0 + 0.4 * 0.5 + 0.1)


def test_innovation_decomposition(arma11):
    run = simulate(TvArmaModel(arma11, window=(0, 40)), seed=3)
    hidden, seen = decompose_innovations(arma11, 30, 25, run)
    w = forecast_weights(arma11, 30, 25)
    assert seen == pytest.approx(w.xsq[0] * run.eps_at(25))
    assert hidden == pytest.approx(sum(w.xq[i] * run.eps_at(26 + i) for i in range(5)))


def test_companion_product(rng):
    path = random_path(rng, 3)
    assert np.array_equal(companion_product(path, 40, 40).entries, np.eye(3))
    prod = companion_product(path, 50, 40).entries
    for m in (1, 2, 3):
        assert prod[0, m - 1] == pytest.approx(xi_m(path, m, 50, 40), abs=1e-12)
    with pytest.raises(ConfigError):
        companion_product(path, 39, 40)


def test_simulate_many_shapes_and_white_noise():
    ys, es = simulate_many(constant_path((), (0.0,)), 0, 200, 4000, seed=2, record=[199, 200], record_eps=True)
    assert set(ys) == {199, 200}
    e1, e2 = es[199], es[200]
    assert abs(np.corrcoef(e1, e2)[0, 1]) < 4 / np.sqrt(4000)
    assert np.var(e2) == pytest.approx(1.0, abs=0.1)


def test_run_out_of_range():
    run = simulate(TvArmaModel(constant_path((0.5,)), window=(1, 5)), seed=0, burn_in=0)
    with pytest.raises(DataError):
        run.y_at(100)
