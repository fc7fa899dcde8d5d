"""Green functions of time-varying linear difference equations.

``xi(t, s)`` is the principal determinant: the determinant of the banded
lower Hessenberg matrix built from the AR coefficients between ``s`` and
``t``. It solves the homogeneous equation in ``t`` with ``xi(s, s) = 1``
and ``xi(t, s) = 0`` for ``t < s``. The MA side has the same structure
with ``-theta`` in place of ``phi``, giving ``theta_green``.

Values are computed by recursion. Two recursions are available and
agree exactly in exact arithmetic:

* forward in ``t`` for fixed ``s`` (a *column*),
  ``xi(t, s) = sum_m phi_m(t) xi(t-m, s)``;
* backward in ``s`` for fixed ``t`` (a *row*),
  ``xi(t, s) = sum_m phi_m(s+m) xi(t, s+m)``.

The determinant itself is kept only as a test oracle.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import LagOutOfRange, OracleCapExceeded
from .path import CoefficientPath, as_path

CoefFn = Callable[[int], Sequence[float]]

ORACLE_CAP = 14
_LAPLACE_MAX = 10


def _column(coef: CoefFn, order: int, s: int, horizon: int) -> np.ndarray:
    out = np.zeros(horizon + 1)
    out[0] = 1.0
    for k in range(1, horizon + 1):
        if not order:
            break
        a = coef(s + k)
        acc = 0.0
        for m in range(1, min(order, k) + 1):
            acc += a[m - 1] * out[k - m]
        out[k] = acc
    return out


def _row(coef: CoefFn, order: int, t: int, depth: int) -> np.ndarray:
    out = np.zeros(depth + 1)
    out[0] = 1.0
    if not order:
        return out
    # window[i] holds coef(t - j + 1 + i) while computing lag j
    window: list[Sequence[float]] = []
    for j in range(1, depth + 1):
        window.insert(0, coef(t - j + 1))
        if len(window) > order:
            window.pop()
        acc = 0.0
        for m in range(1, min(order, j) + 1):
            acc += window[m - 1][m - 1] * out[j - m]
        out[j] = acc
    return out


def _neg_ma(path: CoefficientPath) -> CoefFn:
    return lambda t: tuple(-c for c in path.ma_at(t))


def green_column(path, s: int, horizon: int) -> np.ndarray:
    """``out[k] = xi(s + k, s)`` for ``k = 0..horizon`` (forward recursion)."""
    path = as_path(path)
    return _column(path.ar_at, path.p, s, horizon)


def green_row(path, t: int, depth: int) -> np.ndarray:
    """``out[j] = xi(t, t - j)`` for ``j = 0..depth`` (backward recursion)."""
    path = as_path(path)
    return _row(path.ar_at, path.p, t, depth)


def theta_column(path, s: int, horizon: int) -> np.ndarray:
    """``out[k] = theta_green(s + k, s)``."""
    path = as_path(path)
    return _column(_neg_ma(path), path.q, s, horizon)


def theta_row(path, t: int, depth: int) -> np.ndarray:
    """``out[j] = theta_green(t, t - j)``."""
    path = as_path(path)
    return _row(_neg_ma(path), path.q, t, depth)


def augment_row(path, t: int, row: np.ndarray) -> np.ndarray:
    """Turn a row of ``xi(t, t-j)`` into ``xi_q(t, t-j)`` for the same lags.

    ``xi_q(t, r) = xi(t, r) + sum_l xi(t, r+l) theta_l(r+l)``; the terms
    with ``r + l > t`` vanish, so the row itself carries everything needed.
    """
    path = as_path(path)
    out = np.array(row, dtype=float)
    if not path.q:
        return out
    depth = len(row) - 1
    ma = {tau: path.ma_at(tau) for tau in range(t - depth + 1, t + 1)}
    for j in range(1, depth + 1):
        for l in range(1, min(path.q, j) + 1):
            out[j] += row[j - l] * ma[t - j + l][l - 1]
    return out


def xi(path, t: int, s: int) -> float:
    """Principal determinant ``xi(t, s)``."""
    if t < s:
        return 0.0
    if t == s:
        return 1.0
    return float(green_column(path, s, t - s)[-1])


def xi_m(path, m: int, t: int, s: int) -> float:
    """Fundamental solution ``xi^(m)(t, s)``.

    For ``t > s`` this is ``sum_{r=1}^{p+1-m} phi_{m-1+r}(s+r) xi(t, s+r)``.
    For ``s + 1 - p <= t <= s`` it returns the unit initial value at
    position ``m`` (1 when ``t = s + 1 - m``), and 0 further back.
    """
    path = as_path(path)
    if not 1 <= m <= path.p:
        raise LagOutOfRange(f"fundamental solution index {m} outside 1..{path.p}")
    if t <= s:
        return 1.0 if t == s + 1 - m else 0.0
    row = green_row(path, t, t - s - 1)
    total = 0.0
    for r in range(1, path.p + 2 - m):
        if s + r > t:
            break
        total += path.phi(m - 1 + r, s + r) * row[t - s - r]
    return float(total)


def xi_q(path, t: int, r: int) -> float:
    """MA-augmented kernel ``xi(t, r) + sum_l xi(t, r+l) theta_l(r+l)``."""
    path = as_path(path)
    if r > t:
        return 0.0
    row = green_row(path, t, t - r)
    total = row[t - r]
    for l in range(1, path.q + 1):
        if r + l > t:
            break
        total += row[t - r - l] * path.theta(l, r + l)
    return float(total)


def xi_sq(path, s: int, t: int, r: int) -> float:
    """Observable-innovation kernel ``sum_{l=s+1-r}^{q} xi(t, r+l) theta_l(r+l)``."""
    path = as_path(path)
    lo = max(s + 1 - r, 1)
    if lo > path.q or r > t:
        return 0.0
    row = green_row(path, t, max(t - r, 0))
    total = 0.0
    for l in range(lo, path.q + 1):
        if r + l > t:
            break
        total += row[t - r - l] * path.theta(l, r + l)
    return float(total)


def theta_green(path, t: int, s: int) -> float:
    """MA-side Green function, ``theta_green(t, s) = sum_l -theta_l(t) theta_green(t-l, s)``."""
    if t < s:
        return 0.0
    if t == s:
        return 1.0
    return float(theta_column(path, s, t - s)[-1])


def theta_p(path, t: int, r: int) -> float:
    """``theta_green(t, r) - sum_m theta_green(t, r+m) phi_m(r+m)``."""
    path = as_path(path)
    if r > t:
        return 0.0
    row = theta_row(path, t, t - r)
    total = row[t - r]
    for m in range(1, path.p + 1):
        if r + m > t:
            break
        total -= row[t - r - m] * path.phi(m, r + m)
    return float(total)


# -- determinant oracle ------------------------------------------------------

def hessenberg_matrix(coef: CoefFn, order: int, t: int, s: int) -> list[list[float]]:
    """The ``k x k`` banded lower Hessenberg matrix with ``k = t - s``.

    Row ``i`` (time ``s + 1 + i``) has ``coef_1`` on the diagonal, ``-1`` on
    the superdiagonal and ``coef_{1+r}`` on the ``r``-th subdiagonal.
    """
    k = t - s
    mat = [[0.0] * k for _ in range(k)]
    for i in range(k):
        a = coef(s + 1 + i)
        if i + 1 < k:
            mat[i][i + 1] = -1.0
        for r in range(0, min(order, i + 1)):
            mat[i][i - r] = float(a[r])
    return mat


def _det_laplace(mat: list[list[Fraction]]) -> Fraction:
    k = len(mat)

    @lru_cache(maxsize=None)
    def minor(mask: int) -> Fraction:
        # expand the row whose index equals the number of columns already used
        row = k - bin(mask).count("1")
        if row == k:
            return Fraction(1)
        total = Fraction(0)
        sign = 1
        for col in range(k):
            if not mask >> col & 1:
                continue
            entry = mat[row][col]
            if entry:
                total += sign * entry * minor(mask & ~(1 << col))
            sign = -sign
        return total

    return minor((1 << k) - 1)


def _det_bareiss(mat: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for i in range(n - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, n) if a[r][i] != 0), None)
            if swap is None:
                return Fraction(0)
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def exact_det(mat: Sequence[Sequence[float]], cap: int = ORACLE_CAP) -> float:
    """Determinant in exact rational arithmetic.

    Cofactor expansion up to size 10, fraction-free elimination above.
    """
    k = len(mat)
    if k > cap:
        raise OracleCapExceeded(f"matrix size {k} exceeds oracle cap {cap}")
    if k == 0:
        return 1.0
    exact = [[Fraction(float(x)) for x in row] for row in mat]
    det = _det_laplace(exact) if k <= _LAPLACE_MAX else _det_bareiss(exact)
    return float(det)


def xi_det_oracle(path, t: int, s: int, cap: int = ORACLE_CAP) -> float:
    """``xi(t, s)`` as the determinant of the printed Hessenberg matrix."""
    path = as_path(path)
    if t - s > cap:
        raise OracleCapExceeded(f"k = {t - s} exceeds oracle cap {cap}")
    if t < s:
        return 0.0
    return exact_det(hessenberg_matrix(path.ar_at, path.p, t, s), cap)


def theta_det_oracle(path, t: int, s: int, cap: int = ORACLE_CAP) -> float:
    """MA-side Green function as a determinant with ``-theta`` entries."""
    path = as_path(path)
    if t - s > cap:
        raise OracleCapExceeded(f"k = {t - s} exceeds oracle cap {cap}")
    if t < s:
        return 0.0
    return exact_det(hessenberg_matrix(_neg_ma(path), path.q, t, s), cap)


def widom_xi(ar: Sequence[float], k: int) -> float:
    """Closed form for constant coefficients with distinct characteristic roots.

    ``xi_k = sum_m lambda_m^(k+p-1) / prod_{n != m} (lambda_m - lambda_n)``
    where ``lambda`` are the roots of ``z^p - phi_1 z^(p-1) - ... - phi_p``.
    """
    p = len(ar)
    roots = np.roots(np.r_[1.0, -np.asarray(ar, dtype=float)])
    total = 0j
    for m in range(p):
        denom = np.prod([roots[m] - roots[n] for n in range(p) if n != m])
        total += roots[m] ** (k + p - 1) / denom
    return float(total.real)


class GreenTable:
    """Triangular table of ``xi(t, s)`` and ``theta_green(t, s)``.

    Built eagerly for ``base <= s <= t <= horizon``; immutable afterwards.
    Lookups outside the window fall back to direct recursion.
    """

    def __init__(self, path, base: int, horizon: int):
        path = as_path(path)
        if horizon < base:
            raise ValueError("horizon must not precede base")
        self.path = path
        self.base = int(base)
        self.horizon = int(horizon)
        n = self.horizon - self.base + 1
        values = np.zeros((n, n))
        theta = np.zeros((n, n))
        for j in range(n):
            s = self.base + j
            values[j:, j] = green_column(path, s, n - 1 - j)
            theta[j:, j] = theta_column(path, s, n - 1 - j)
        values.setflags(write=False)
        theta.setflags(write=False)
        self.values = values
        self.theta_values = theta

    def _inside(self, t: int, s: int) -> bool:
        return self.base <= s and t <= self.horizon

    def xi(self, t: int, s: int) -> float:
        if t < s:
            return 0.0
        if self._inside(t, s):
            return float(self.values[t - self.base, s - self.base])
        return xi(self.path, t, s)

    def theta(self, t: int, s: int) -> float:
        if t < s:
            return 0.0
        if self._inside(t, s):
            return float(self.theta_values[t - self.base, s - self.base])
        return theta_green(self.path, t, s)

    def xi_m(self, m: int, t: int, s: int) -> float:
        p = self.path.p
        if not 1 <= m <= p:
            raise LagOutOfRange(f"fundamental solution index {m} outside 1..{p}")
        if t <= s:
            return 1.0 if t == s + 1 - m else 0.0
        return sum(
            self.path.phi(m - 1 + r, s + r) * self.xi(t, s + r)
            for r in range(1, p + 2 - m)
        )

    def xi_q(self, t: int, r: int) -> float:
        if r > t:
            return 0.0
        return self.xi(t, r) + sum(
            self.xi(t, r + l) * self.path.theta(l, r + l) for l in range(1, self.path.q + 1)
            if r + l <= t
        )

    def xi_sq(self, s: int, t: int, r: int) -> float:
        return sum(
            self.xi(t, r + l) * self.path.theta(l, r + l)
            for l in range(max(s + 1 - r, 1), self.path.q + 1)
            if r + l <= t
        )

    def theta_p(self, t: int, r: int) -> float:
        if r > t:
            return 0.0
        return self.theta(t, r) - sum(
            self.theta(t, r + m) * self.path.phi(m, r + m) for m in range(1, self.path.p + 1)
            if r + m <= t
        )
