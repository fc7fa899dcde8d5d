"""Time-varying lag polynomials under skew multiplication.

A polynomial ``sum_j c_j(t) B^j`` acts on a series by
``(sum_j c_j(t) B^j) y_t = sum_j c_j(t) y_{t-j}``. Composition follows
``B^i o f(t) = f(t-i) B^i``, which makes the product associative but not
commutative.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DataError
from .green import green_column, xi, xi_m, xi_q, xi_sq
from .moments import DEFAULT_POLICY, TruncationPolicy, ar_walk
from .errors import NonSummable
from .path import as_path

Coef = Callable[[int], float]

GUARD_BAND = 20


def _memo(fn: Coef) -> Coef:
    return lru_cache(maxsize=4096)(fn)


def _const(value: float) -> Coef:
    value = float(value)
    return lambda t: value


class TvPoly:
    """Lag polynomial with time-varying coefficients.

    Parameters
    ----------
    terms : mapping
        Lag power ``j >= 0`` to coefficient, either a callable of ``t`` or
        a number for a constant coefficient.
    guard : int
        Number of trailing coefficients polluted by truncation; identity
        checks should ignore them.
    """

    def __init__(self, terms: Mapping[int, Coef | float] | None = None, guard: int = 0):
        self.terms: dict[int, Coef] = {}
        for j, c in (terms or {}).items():
            if j < 0:
                raise ValueError("lag powers must be non-negative")
            self.terms[int(j)] = c if callable(c) else _const(c)
        self.guard = guard

    @classmethod
    def one(cls) -> "TvPoly":
        return cls({0: 1.0})

    @classmethod
    def function(cls, f: Coef) -> "TvPoly":
        """Degree-zero polynomial, i.e. multiplication by ``f(t)``."""
        return cls({0: f})

    @property
    def degree(self) -> int:
        return max(self.terms, default=0)

    def coef(self, j: int, t: int) -> float:
        c = self.terms.get(j)
        return 0.0 if c is None else float(c(t))

    def at(self, t: int) -> np.ndarray:
        """Coefficients ``c_0(t)..c_deg(t)``."""
        out = np.zeros(self.degree + 1)
        for j, c in self.terms.items():
            out[j] = c(t)
        return out

    def apply(self, series: Callable[[int], float], t: int) -> float:
        """``sum_j c_j(t) series(t - j)``."""
        return float(sum(c(t) * series(t - j) for j, c in self.terms.items()))

    def __matmul__(self, other: "TvPoly") -> "TvPoly":
        return skew_mul(self, other)

    def __add__(self, other: "TvPoly") -> "TvPoly":
        keys = set(self.terms) | set(other.terms)
        return TvPoly(
            {j: (lambda t, j=j: self.coef(j, t) + other.coef(j, t)) for j in keys},
            guard=max(self.guard, other.guard),
        )

    def __neg__(self) -> "TvPoly":
        return TvPoly({j: (lambda t, c=c: -c(t)) for j, c in self.terms.items()}, guard=self.guard)

    def __sub__(self, other: "TvPoly") -> "TvPoly":
        return self + (-other)

    def max_abs_diff(self, other: "TvPoly", grid: Iterable[int], skip_guard: bool = True) -> float:
        """Largest coefficient difference over a grid of times."""
        deg = max(self.degree, other.degree)
        cut = deg - max(self.guard, other.guard) if skip_guard else deg
        worst = 0.0
        for t in grid:
            for j in range(cut + 1):
                worst = max(worst, abs(self.coef(j, t) - other.coef(j, t)))
        return worst

    def __repr__(self) -> str:
        return f"<TvPoly degree={self.degree} terms={sorted(self.terms)} guard={self.guard}>"


def skew_mul(a: TvPoly, b: TvPoly) -> TvPoly:
    """Skew product: ``c_k(t) = sum_{i+j=k} a_i(t) b_j(t - i)``."""
    pairs: dict[int, list[tuple[int, Coef, Coef]]] = {}
    for i, ai in a.terms.items():
        for j, bj in b.terms.items():
            pairs.setdefault(i + j, []).append((i, ai, bj))

    def make(plist):
        return _memo(lambda t: sum(ai(t) * bj(t - i) for i, ai, bj in plist))

    guard = max(a.guard + b.degree, b.guard + a.degree) if (a.guard or b.guard) else 0
    return TvPoly({k: make(plist) for k, plist in pairs.items()}, guard=guard)


def ar_operator(path) -> TvPoly:
    """``Phi_t(B) = 1 - sum_m phi_m(t) B^m``."""
    path = as_path(path)
    terms: dict[int, Coef] = {0: _const(1.0)}
    for m in range(1, path.p + 1):
        terms[m] = lambda t, m=m: -path.phi(m, t)
    return TvPoly(terms)


def ma_operator(path) -> TvPoly:
    """``Theta_t(B) = 1 + sum_l theta_l(t) B^l``."""
    path = as_path(path)
    terms: dict[int, Coef] = {0: _const(1.0)}
    for l in range(1, path.q + 1):
        terms[l] = lambda t, l=l: path.theta(l, t)
    return TvPoly(terms)


def build_xi_operators(path, t: int, s: int):
    """Homogeneous, particular and innovation operators for horizon ``k = t - s``.

    The coefficients are functions of the current time ``tau`` with the
    horizon held fixed, so each polynomial can be evaluated at any date;
    at ``tau = t`` the conditioning date is ``s``.

    Returns
    -------
    hom : TvPoly
        ``1 - sum_m xi^(m)(tau, tau-k) B^(k-1+m)``.
    part : TvPoly
        ``sum_{r<k} xi(tau, tau-r) B^r``.
    innov : TvPoly
        ``sum_{r<k} xi_q(tau, tau-r) B^r + sum_{r=k}^{k-1+q} xi_{s,q}(tau, tau-r) B^r``.
    """
    path = as_path(path)
    k = t - s
    if k < 1:
        raise ValueError(f"need s < t, got s={s}, t={t}")
    hom: dict[int, Coef] = {0: _const(1.0)}
    for m in range(1, path.p + 1):
        hom[k - 1 + m] = _memo(lambda tau, m=m: -xi_m(path, m, tau, tau - k))
    part = {r: _memo(lambda tau, r=r: xi(path, tau, tau - r)) for r in range(k)}
    innov: dict[int, Coef] = {r: _memo(lambda tau, r=r: xi_q(path, tau, tau - r)) for r in range(k)}
    for r in range(k, k + path.q):
        innov[r] = _memo(lambda tau, r=r: xi_sq(path, tau - k, tau, tau - r))
    return TvPoly(hom), TvPoly(part), TvPoly(innov)


def verify_representation_identity(model, run, t: int, s: int) -> float:
    """``|hom y_t - part o drift(t) - innov eps_t|`` evaluated on a simulated run."""
    path = as_path(model)
    lo = s + 1 - path.p - path.q
    if lo < run.offset or t > run.offset + len(run.y) - 1:
        raise DataError(f"run does not cover [{lo}, {t}]")
    hom, part, innov = build_xi_operators(path, t, s)
    lhs = hom.apply(run.y_at, t)
    rhs = part.apply(path.drift, t) + innov.apply(run.eps_at, t)
    return abs(lhs - rhs)


def truncated_inverse(path, t: int, policy: TruncationPolicy = DEFAULT_POLICY,
                      terms: int | None = None, guard: int = GUARD_BAND) -> TvPoly:
    """``Xi_t(B) = sum_r xi(t, t-r) B^r`` truncated, with a guard band.

    The truncation lag comes from the tail rule at ``t`` unless ``terms``
    is given. Coefficients are computed by the forward recursion, one
    column per lag.
    """
    path = as_path(path)
    w = ar_walk(path, t, policy, track="xi")
    if not w.converged:
        raise NonSummable(f"Green weights at t={t} are not summable ({w.reason})")
    R = w.depth if terms is None else int(terms)

    @lru_cache(maxsize=64)
    def coefficients(tau: int) -> np.ndarray:
        return np.array([green_column(path, tau - r, r)[-1] for r in range(R + 1)])

    return TvPoly({r: (lambda tau, r=r: coefficients(tau)[r]) for r in range(R + 1)}, guard=guard)
