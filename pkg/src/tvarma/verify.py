"""Self-checks against independent oracles.

Each check returns a :class:`Check` with the worst error observed and its
tolerance. :func:`run_checks` runs them on a thread pool; results come
back in a fixed order so reports are reproducible.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .breaks import (
    SegmentCosts,
    SegmentedAR,
    _design,
    ar2_stationary_variance,
    dab_variance,
    dp_partition,
    exhaustive_partition,
    persistence_measures,
)
from .coefficients import (
    constant_path,
    gegenbauer_coefficients,
    table_path,
)
from .green import green_column, widom_xi, xi_det_oracle
from .inversion import recover_errors
from .moments import DEFAULT_POLICY, _jsonable
from .polyops import ar_operator, truncated_inverse, verify_representation_identity
from .process import TvArmaModel, represent, simulate
from .rng import replication_rng

REFERENCE_FIT = SegmentedAR(
    p=2,
    break_times=(49, 88),
    drift=(0.496, 3.637, 2.859),
    ar=((0.470, 0.376), (0.710, 0.127), (0.247, -0.314)),
    sigma=(1.077, 2.300, 2.160),
)

REFERENCE_PERSISTENCE = {
    "lar": (0.892, 0.858, 0.560),
    "inv_one_minus_sum": (6.493, 6.135, 0.937),
    "mean": (3.221, 22.313, 2.679),
    "s0": (7.784, 31.688, 0.652),
    "P": (2.692, 3.002, 1.150),
    "var": (3.122, 15.881, 5.365),
}


@dataclass
class Check:
    name: str
    passed: bool
    error: float
    tol: float
    cases: int
    seconds: float = 0.0

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.error = float(self.error)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def random_path(rng: np.random.Generator, p: int, q: int = 0, window=(-100, 400), scale: float = 1.0):
    """Table-backed path with i.i.d. uniform coefficients."""
    times = np.arange(window[0], window[1] + 1)
    n = len(times)
    return table_path(
        times,
        ar=rng.uniform(-scale, scale, (n, p)) / max(p, 1),
        ma=rng.uniform(-scale, scale, (n, q)) / max(q, 1) if q else None,
        drift=rng.uniform(-1.0, 1.0, n),
        sigma2=rng.uniform(0.5, 2.0, n),
    )


def check_determinant_oracle(n_paths: int = 500, max_p: int = 4, max_k: int = 12, seed: int = 0,
                             tol: float = 1e-9) -> Check:
    """Recursion against exact banded-Hessenbergian determinants."""
    worst, cases = 0.0, 0
    for i in range(n_paths):
        rng = replication_rng(seed, i)
        p = int(rng.integers(1, max_p + 1))
        path = random_path(rng, p, scale=1.5)
        s = int(rng.integers(0, 200))
        col = green_column(path, s, max_k)
        for k in range(max_k + 1):
            exact = xi_det_oracle(path, s + k, s)
            worst = max(worst, abs(col[k] - exact) / max(1.0, abs(exact)))
            cases += 1
    return Check("determinant_oracle", bool(worst <= tol), worst, tol, cases)


def check_widom(max_k: int = 40, tol: float = 1e-10) -> Check:
    specs = [(0.5, 0.2), (1.1, -0.3), (-0.4, 0.45), (0.6, 0.11, -0.06), (0.2, 0.3, 0.1)]
    worst, cases = 0.0, 0
    for ar in specs:
        col = green_column(constant_path(ar), 0, max_k)
        for k in range(max_k + 1):
            worst = max(worst, abs(col[k] - widom_xi(ar, k)))
            cases += 1
    return Check("widom", bool(worst <= tol), worst, tol, cases)


def gegenbauer_recursion(d: float, phi: float, n: int) -> np.ndarray:
    """``c_j = 2 phi ((d-1)/j + 1) c_{j-1} - (2 (d-1)/j + 1) c_{j-2}``."""
    c = np.zeros(n + 1)
    c[0] = 1.0
    if n >= 1:
        c[1] = 2.0 * phi * d
    for j in range(2, n + 1):
        c[j] = 2.0 * phi * ((d - 1.0) / j + 1.0) * c[j - 1] - (2.0 * (d - 1.0) / j + 1.0) * c[j - 2]
    return c


def check_gegenbauer(n: int = 50, tol: float = 1e-9) -> Check:
    worst, cases = 0.0, 0
    for d in (0.05, 0.2, 0.35, 0.49):
        for phi in (-1.0, -0.6, 0.0, 0.3, 0.8, 1.0):
            diff = np.abs(gegenbauer_coefficients(d, phi, n) - gegenbauer_recursion(d, phi, n))
            worst = max(worst, float(diff.max()))
            cases += n + 1
    return Check("gegenbauer", worst <= tol, worst, tol, cases)


def check_persistence(rel_tol: float = 0.005) -> Check:
    report = persistence_measures(REFERENCE_FIT, t_range=(0, 0), dab_horizon=0)
    worst, cases = 0.0, 0
    for key, targets in REFERENCE_PERSISTENCE.items():
        for seg, target in zip(report.segments, targets):
            worst = max(worst, abs(getattr(seg, key) - target) / abs(target))
            cases += 1
    return Check("persistence", worst <= rel_tol, worst, rel_tol, cases)


def check_representation(n_runs: int = 100, pairs: int = 10, seed: int = 1, tol: float = 1e-9) -> Check:
    """Explicit solution of ARMA(2,2) against forward simulation."""
    worst, cases = 0.0, 0
    for i in range(n_runs):
        rng = replication_rng(seed, i)
        path = random_path(rng, 2, 2, window=(-50, 150))
        run = simulate(TvArmaModel(path, window=(1, 120)), seed=rng, burn_in=20)
        for _ in range(pairs):
            s = int(rng.integers(5, 100))
            t = s + int(rng.integers(1, 20))
            y_init = [run.y_at(s - j) for j in range(2)]
            e_init = [run.eps_at(s - j) for j in range(2)]
            e_future = [run.eps_at(r) for r in range(s + 1, t + 1)]
            got = represent(path, t, s, y_init, e_init, e_future)
            worst = max(worst, abs(got - run.y_at(t)) / max(1.0, abs(run.y_at(t))))
            cases += 1
    return Check("representation", worst <= tol, worst, tol, cases)


def check_operator_identity(n_cases: int = 100, seed: int = 2, tol: float = 1e-9) -> Check:
    worst = 0.0
    for i in range(n_cases):
        rng = replication_rng(seed, i)
        p, q = int(rng.integers(1, 4)), int(rng.integers(0, 3))
        path = random_path(rng, p, q, window=(-50, 120))
        run = simulate(TvArmaModel(path, window=(1, 100)), seed=rng, burn_in=20)
        s = int(rng.integers(10, 80))
        t = s + int(rng.integers(1, 15))
        residual = verify_representation_identity(path, run, t, s)
        worst = max(worst, residual / max(1.0, abs(run.y_at(t))))
    return Check("operator_identity", worst <= tol, worst, tol, n_cases)


def check_left_inverse(tol: float = 1e-8) -> Check:
    """``truncated_inverse o Phi_t(B) = 1`` outside the guard band."""
    from .coefficients import make_logistic_path, make_periodic_path
    from .polyops import TvPoly

    paths = [
        constant_path((0.5, 0.2)),
        make_periodic_path([(0.6,), (-0.3,), (0.4,)]),
        make_logistic_path(0.2, 0.8, gamma=0.5, tau=100),
    ]
    worst, cases = 0.0, 0
    for path in paths:
        inv = truncated_inverse(path, 100, DEFAULT_POLICY)
        prod = inv @ ar_operator(path)
        worst = max(worst, prod.max_abs_diff(TvPoly.one(), [100]))
        cases += 1
    return Check("left_inverse", worst <= tol, worst, tol, cases)


def check_dab_limit(tol: float = 1e-12) -> Check:
    """Coinciding breaks at ``l = 0`` reduce to the stationary AR(2) variance."""
    worst, cases = 0.0, 0
    for phi1, phi2, sigma in ((0.5, 0.2, 1.0), (0.247, -0.314, 2.16), (1.2, -0.5, 0.7)):
        ar = ((phi1, phi2), (0.71, 0.127), (0.3, 0.1))
        got = dab_variance(ar, (sigma, 2.3, 1.5), 20, 20, 0).var
        want = ar2_stationary_variance(phi1, phi2, sigma * sigma)
        worst = max(worst, abs(got - want) / want)
        cases += 1
    return Check("dab_limit", worst <= tol, worst, tol, cases)


def check_dp_exhaustive(n_series: int = 10, T: int = 60, seed: int = 3) -> Check:
    """Dynamic-programming segmentation against brute force (exact equality)."""
    worst, cases = 0.0, 0
    for i in range(n_series):
        rng = replication_rng(seed, i)
        y = np.cumsum(rng.standard_normal(T)) * 0.3 + rng.standard_normal(T)
        X, z = _design(y, 1)
        costs = SegmentCosts(X, z, 5)
        for l in range(3):
            a, _ = dp_partition(costs, len(z), l, 5)
            b, _ = exhaustive_partition(costs, len(z), l, 5)
            worst = max(worst, abs(a - b))
            cases += 1
    return Check("dp_exhaustive", worst == 0.0, worst, 0.0, cases)


def check_inversion(tol: float = 1e-6, seed: int = 4) -> Check:
    path = constant_path((), (0.4,))
    run = simulate(TvArmaModel(path, window=(0, 79)), seed=seed, burn_in=0)
    y = [run.y_at(t) for t in range(80)]
    rec = recover_errors(path, y, 0)
    err = max(abs(e - run.eps_at(t)) for t, e in rec.as_dict().items())
    return Check("inversion", err <= tol, err, tol, len(rec.times))


CHECKS: dict[str, Callable[[], Check]] = {
    "determinant_oracle": check_determinant_oracle,
    "widom": check_widom,
    "gegenbauer": check_gegenbauer,
    "persistence": check_persistence,
    "representation": check_representation,
    "operator_identity": check_operator_identity,
    "left_inverse": check_left_inverse,
    "dab_limit": check_dab_limit,
    "dp_exhaustive": check_dp_exhaustive,
    "inversion": check_inversion,
}


def _timed(fn: Callable[[], Check]) -> Check:
    t0 = time.perf_counter()
    out = fn()
    out.seconds = time.perf_counter() - t0
    return out


def run_checks(names=None, threads: int = 1) -> list[Check]:
    names = list(CHECKS) if names is None else list(names)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda n: _timed(CHECKS[n]), names))
