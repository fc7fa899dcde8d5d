"""End-to-end acceptance checks, one PASS/FAIL line per criterion.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from tvarma import fit_segmented_ar, predict_finite, simulate_many
from tvarma.breaks import dabar_variance
from tvarma.moments import yule_walker_autocov
from tvarma.rng import replication_rng
from tvarma.stochastic import GrcMomentInputs, grc2_closed_form, grc_autocov, simulate_grc
from tvarma.verify import (
    REFERENCE_FIT,
    check_dab_limit,
    check_determinant_oracle,
    check_dp_exhaustive,
    check_gegenbauer,
    check_inversion,
    check_left_inverse,
    check_operator_identity,
    check_representation,
    check_persistence,
    check_widom,
)

GRC2 = GrcMomentInputs(
    means=(1.0, 0.4, 0.2),
    cov=((0.1, 0.0, 0.0), (0.0, 0.04, 0.01), (0.0, 0.01, 0.02)),
    cross=(0.03, 0.05, 0.02),
    sigma_eps2=1.0,
)
TRUE_BREAKS = (49, 88)


def report(log, number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
    print(line)
    log.append(line)
    return passed


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_c01_determinant_oracle(acceptance_log):
    check, seconds = timed(check_determinant_oracle)
    ok = check.passed and check.cases >= 500 and seconds < 10.0
    detail = f"recursion vs exact determinants, {check.cases} cases, max error {check.error:.2e}, {seconds:.1f} s"
    assert report(acceptance_log, 1, ok, detail)


def test_c02_widom(acceptance_log):
    check = check_widom()
    assert report(acceptance_log, 2, check.passed, f"root formula, max error {check.error:.2e}")


def test_c03_gegenbauer(acceptance_log):
    check = check_gegenbauer()
    detail = f"Gegenbauer coefficients, max error {check.error:.2e}"
    assert report(acceptance_log, 3, check.passed, detail)


def test_c04_persistence_table(acceptance_log):
    check, seconds = timed(check_persistence)
    ok = check.passed and check.cases == 18 and seconds < 1.0
    detail = f"18 persistence entries, max relative error {check.error:.2e}, {seconds:.3f} s"
    assert report(acceptance_log, 4, ok, detail)


def test_c05_representation(acceptance_log):
    check = check_representation()
    ok = check.passed and check.cases == 1000
    detail = f"explicit solution on {check.cases} (t, s) pairs, max error {check.error:.2e}"
    assert report(acceptance_log, 5, ok, detail)


def test_c06_predictor_monte_carlo(acceptance_log):
    n, t = 100_000, 92
    path = REFERENCE_FIT.to_path()
    lines, ok = [], True
    for k in (1, 4, 8):
        s = t - k
        ys, _ = simulate_many(path, -300, t, n, seed=600 + k, record=[s - 1, s, t])
        rep = predict_finite(path, t, s, [ys[s], ys[s - 1]])
        err = ys[t] - rep.point
        sq = err**2
        z_mse = (sq.mean() - rep.mse) / (sq.std() / math.sqrt(n))
        z_bias = err.mean() / (err.std() / math.sqrt(n))
        ok &= abs(z_mse) <= 3 and abs(z_bias) <= 4
        lines.append(f"k={k} z_mse={z_mse:+.2f} z_bias={z_bias:+.2f}")
    assert report(acceptance_log, 6, ok, "; ".join(lines))


def test_c07_inversion_round_trip(acceptance_log):
    check = check_inversion()
    detail = f"{check.cases} innovations recovered, max error {check.error:.2e}"
    assert report(acceptance_log, 7, check.passed, detail)


def test_c08_operator_identities(acceptance_log):
    ident, inverse = check_operator_identity(), check_left_inverse()
    ok = ident.passed and inverse.passed and ident.cases == 100
    detail = f"identity residual {ident.error:.2e}, left-inverse residual {inverse.error:.2e}"
    assert report(acceptance_log, 8, ok, detail)


def test_c09_random_coefficient_autocovariance(acceptance_log):
    gamma = grc_autocov(GRC2, 6)
    assert grc2_closed_form(GRC2)["condition"]
    y = simulate_grc(GRC2, 500_000, 6, seed=7, burn_in=100)
    n, mean = len(y), 2.5
    z = []
    for lag in range(7):
        prod = (y[:, 0] - mean) * (y[:, lag] - mean)
        z.append((prod.mean() - gamma[lag]) / (prod.std() / math.sqrt(n)))
    ar = (0.5, 0.2, -0.1)
    degenerate = grc_autocov(GrcMomentInputs.degenerate(1.0, ar, 1.3), 8)
    yw_err = float(np.max(np.abs(degenerate - yule_walker_autocov(ar, 1.3, 8))))
    worst = max(abs(v) for v in z)
    ok = worst <= 3 and yw_err <= 1e-10
    detail = f"max |z| over lags 0..6 = {worst:.2f}, degenerate error {yw_err:.1e}"
    assert report(acceptance_log, 9, ok, detail)


def test_c10_break_variance(acceptance_log):
    n = 200_000
    path = REFERENCE_FIT.to_path()
    z = []
    for l in (0, 4, 12):
        t = TRUE_BREAKS[1] + l
        ys, _ = simulate_many(path, -300, t, n, seed=1000 + l, record=[t])
        dev = (ys[t] - ys[t].mean()) ** 2
        z.append((dev.mean() - dabar_variance(REFERENCE_FIT, l).var) / (dev.std() / math.sqrt(n)))
    limit = check_dab_limit()
    ok = max(abs(v) for v in z) <= 3 and limit.passed
    detail = "z at l=0,4,12: " + ", ".join(f"{v:+.2f}" for v in z)
    detail += f"; coinciding-break error {limit.error:.1e}"
    assert report(acceptance_log, 10, ok, detail)


def _recovery(criterion, reps=200, T=216, p=2):
    path = REFERENCE_FIT.to_path()
    hits, covered, total = 0, 0, 0
    truth = [(d, *a) for d, a in zip(REFERENCE_FIT.drift, REFERENCE_FIT.ar)]
    for i in range(reps):
        seed = int(replication_rng(1100, i).integers(2**31))
        ys, _ = simulate_many(path, -300, T - 1, 1, seed=seed, record=range(T))
        y = np.array([ys[t][0] for t in range(T)])
        fit = fit_segmented_ar(y, p, 2, criterion=criterion).models[2]
        hits += all(abs(a - b) <= 4 for a, b in zip(fit.break_times, TRUE_BREAKS))
        estimates = [(d, *a) for d, a in zip(fit.drift, fit.ar)]
        for est, se, want in zip(estimates, fit.se, truth):
            for e, s, w in zip(est, se, want):
                covered += abs(e - w) <= 2 * s
                total += 1
    return hits / reps, covered / total


@pytest.fixture(scope="module")
def dp_check():
    return check_dp_exhaustive()


def test_c11_segmentation_least_squares(dp_check, acceptance_log):
    breaks, coef = _recovery("ssr")
    ok = dp_check.passed and breaks >= 0.9 and coef >= 0.9
    detail = (f"[least squares] DP exact={dp_check.passed}, breaks within 4 in {breaks:.1%}, "
              f"coefficients within 2 SE {coef:.1%}")
    assert report(acceptance_log, 11, ok, detail)


def test_c11_segmentation_gaussian(dp_check, acceptance_log):
    breaks, coef = _recovery("gaussian")
    ok = dp_check.passed and breaks >= 0.9 and coef >= 0.9
    detail = (f"[per-segment variance] DP exact={dp_check.passed}, breaks within 4 in {breaks:.1%}, "
              f"coefficients within 2 SE {coef:.1%}")
    assert report(acceptance_log, 11, ok, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
