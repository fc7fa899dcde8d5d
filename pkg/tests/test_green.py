import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvarma import (
    GreenTable,
    constant_path,
    green_column,
    green_row,
    make_gegenbauer_path,
    make_periodic_path,
    theta_green,
    widom_xi,
    xi,
    xi_m,
    xi_q,
    xi_sq,
)
from tvarma.green import exact_det, theta_det_oracle, theta_p, xi_det_oracle
from tvarma.verify import random_path


def test_ar1_values(ar1):
    assert xi(ar1, 10, 7) == pytest.approx(0.125)
    assert xi(ar1, 10, 10) == 1.0
    assert xi(ar1, 10, 12) == 0.0


def test_two_step_equals_determinant_formula(rng):
    path = random_path(rng, 4)
    s = 17
    want = path.phi(1, s + 2) * path.phi(1, s + 1) + path.phi(2, s + 2)
    assert xi(path, s + 2, s) == pytest.approx(want, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 4), k=st.integers(0, 9))
def test_recursion_matches_exact_determinant(seed, p, k):
    path = random_path(np.random.default_rng(seed), p, scale=1.5)
    s = 50
    got = xi(path, s + k, s)
    assert got == pytest.approx(xi_det_oracle(path, s + k, s), rel=1e-9, abs=1e-12)


def test_row_and_column_agree(rng):
    path = random_path(rng, 3)
    col = green_column(path, 40, 15)
    row = green_row(path, 55, 15)
    assert col[15] == pytest.approx(row[15], abs=1e-13)
    for k in range(16):
        assert col[k] == pytest.approx(xi(path, 40 + k, 40), abs=1e-13)


@pytest.mark.parametrize("ar", [(0.5, 0.2), (1.1, -0.3), (0.6, 0.11, -0.06)])
def test_constant_coefficients_follow_root_formula(ar):
    col = green_column(constant_path(ar), 0, 30)
    for k in range(31):
        assert col[k] == pytest.approx(widom_xi(ar, k), abs=1e-10)


def test_exact_det_small():
    assert exact_det([[2.0, 1.0], [1.0, 3.0]]) == 5.0
    assert exact_det([]) == 1.0


def test_fundamental_solutions(rng):
    path = random_path(rng, 3)
    t = 60
    for m in (1, 2, 3):
        assert xi_m(path, m, t, t - 1) == pytest.approx(path.phi(m, t))
    for k in range(1, 8):
        assert xi_m(path, 1, t + k, t) == pytest.approx(xi(path, t + k, t), abs=1e-13)


def test_fundamental_solution_initial_values(rng):
    path = random_path(rng, 3)
    s = 30
    for m in (1, 2, 3):
        for j in range(3):
            t = s - j
            assert xi_m(path, m, t, s) == (1.0 if t == s + 1 - m else 0.0)


def test_gegenbauer_second_solution():
    d, phi = 0.3, 0.8
    path = make_gegenbauer_path(d, phi)
    for j in range(2, 12):
        assert xi_m(path, 2, j, 1) == pytest.approx(-d * xi(path, j, 2), abs=1e-12)


def test_arma11_augmented(arma11):
    phi, theta = 0.6, 0.4
    for k in range(1, 10):
        want = phi**k + phi ** (k - 1) * theta
        assert xi_q(arma11, 20, 20 - k) == pytest.approx(want)
    assert xi_q(arma11, 20, 20) == 1.0


def test_pure_ar_augmented_is_green(ar1):
    for k in range(6):
        assert xi_q(ar1, 9, 9 - k) == xi(ar1, 9, 9 - k)


def test_truncated_augmented(arma11, ar1):
    s, t = 10, 14
    assert xi_sq(ar1, s, t, s) == 0.0
    assert xi_sq(arma11, s, t, s - 1) == 0.0
    assert xi_sq(arma11, s, t, s) == pytest.approx(xi(arma11, t, s + 1) * 0.4)


def test_ma_green(rng):
    theta = 0.7
    path = constant_path((), (theta,))
    for k in range(8):
        assert theta_green(path, 5 + k, 5) == pytest.approx((-theta) ** k)
    path = random_path(rng, 1, 2, scale=1.2)
    for k in range(8):
        assert theta_green(path, 60 + k, 60) == pytest.approx(
            theta_det_oracle(path, 60 + k, 60), rel=1e-9, abs=1e-12)


def test_ma_green_is_green_of_mirror(rng):
    path = random_path(rng, 2, 2)
    mirror = path.mirrored()
    for k in range(10):
        assert theta_green(path, 70 + k, 70) == pytest.approx(xi(mirror, 70 + k, 70), abs=1e-13)


def test_inverse_weight_first_lag(arma11):
    assert theta_p(arma11, 8, 7) == pytest.approx(-0.4 - 0.6)


def test_periodic_product():
    path = make_periodic_path([(0.9,), (1.2,), (0.5,), (0.8,)])
    assert xi(path, 4, 0) == pytest.approx(0.9 * 1.2 * 0.5 * 0.8)
    assert xi(path, 8, 4) == pytest.approx(0.432)


def test_green_table(rng):
    path = random_path(rng, 2, 1)
    table = GreenTable(path, 10, 40)
    assert table.xi(30, 12) == pytest.approx(xi(path, 30, 12))
    assert table.theta(25, 20) == pytest.approx(theta_green(path, 25, 20))
    assert table.xi(45, 30) == pytest.approx(xi(path, 45, 30))
    assert table.xi_m(2, 30, 12) == pytest.approx(xi_m(path, 2, 30, 12))
    assert table.xi(5, 6) == 0.0
    with pytest.raises(ValueError):
        table.values[0, 0] = 1.0


def test_explosive_growth():
    col = green_column(constant_path((1.1,)), 0, 20)
    assert col[20] == pytest.approx(1.1**20)
    assert math.isfinite(col[-1])
