"""Wold weights, unconditional moments and stability diagnostics.

Infinite sums over the remote past are truncated by a tail rule: the sum
stops once ``window`` consecutive weights all stay below
``tail_tol * (1 - rho)``, with ``rho`` a geometric decay rate estimated
from those same weights.
Failure to stop raises :class:`NonSummable` rather than truncating.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NonSummable
from .path import as_path


@dataclass(frozen=True)
class TruncationPolicy:
    tail_tol: float = 1e-10
    max_terms: int = 100_000
    window: int = 50
    blowup: float = 1e100

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise ConfigError("tail_tol must be positive")
        if self.max_terms < 1:
            raise ConfigError("max_terms must be at least 1")
        if self.window < 1:
            raise ConfigError("window must be at least 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass
class RowWalk:
    """Backward walk of a Green-function row from ``t``.

    ``xi[j] = G(t, t-j)`` and ``xq[j]`` the MA-augmented value at the same
    lag. ``converged`` tells whether the tail rule fired; ``rho`` is the
    last decay estimate.
    """

    t: int
    xi: np.ndarray
    xq: np.ndarray
    converged: bool
    rho: float
    reason: str = ""

    @property
    def depth(self) -> int:
        return len(self.xi) - 1


def walk(
    ar: Callable[[int], Sequence[float]],
    p: int,
    ma: Callable[[int], Sequence[float]],
    q: int,
    t: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    min_depth: int = 0,
    max_depth: int | None = None,
    track: str = "both",
) -> RowWalk:
    """Extend a row backwards until the tail rule fires or limits are hit.

    The rule fires at lag ``j`` once the last ``window`` weights all lie
    below ``tail_tol * (1 - rho)``, where ``rho`` compares the largest
    weight in the later half of that window with the earlier half.
    ``track`` selects the watched weights: ``"xi"``, ``"xq"`` or ``"both"``.
    Never raises; callers decide what a non-converged walk means.
    """
    W = policy.window
    tol = policy.tail_tol
    limit = policy.max_terms if max_depth is None else max_depth
    xi_vals = [1.0]
    xq_vals = [1.0]
    watched = [1.0]
    ar_win: list[Sequence[float]] = []  # ar_win[i] = ar(t - j + 1 + i)
    ma_win: list[Sequence[float]] = []
    rho = 0.0
    quiet = 0  # consecutive watched weights below tail_tol
    j = 0
    while j < limit:
        j += 1
        tau = t - j + 1
        if p:
            ar_win.insert(0, ar(tau))
            if len(ar_win) > p:
                ar_win.pop()
        if q:
            ma_win.insert(0, ma(tau))
            if len(ma_win) > q:
                ma_win.pop()
        g = 0.0
        for m in range(1, min(p, j) + 1):
            g += ar_win[m - 1][m - 1] * xi_vals[j - m]
        gq = g
        for l in range(1, min(q, j) + 1):
            gq += xi_vals[j - l] * ma_win[l - 1][l - 1]
        xi_vals.append(g)
        xq_vals.append(gq)
        if not (math.isfinite(gq) and math.isfinite(g)) or max(abs(g), abs(gq)) > policy.blowup:
            return RowWalk(t, np.array(xi_vals), np.array(xq_vals), False, math.inf, "blowup")
        w = abs(g) if track == "xi" else abs(gq) if track == "xq" else max(abs(g), abs(gq))
        watched.append(w)
        quiet = quiet + 1 if w < tol else 0
        if quiet >= W and j >= min_depth:
            block = watched[j - W + 1 :]
            h = max(W // 2, 1)
            m0, m1 = max(block[:h]), max(block[h:] or block)
            rho = 0.0 if m0 == 0 else (m1 / m0) ** (1.0 / h)
            if rho < 1.0 and max(block) < tol * (1.0 - rho):
                return RowWalk(t, np.array(xi_vals), np.array(xq_vals), True, float(rho))
    reason = "max_terms" if max_depth is None else "max_depth"
    return RowWalk(t, np.array(xi_vals), np.array(xq_vals), False, float(rho), reason)


def ar_walk(path, t: int, policy: TruncationPolicy = DEFAULT_POLICY, **kwargs) -> RowWalk:
    path = as_path(path)
    return walk(path.ar_at, path.p, path.ma_at, path.q, t, policy, **kwargs)


def _require(w: RowWalk, what: str) -> RowWalk:
    if not w.converged:
        raise NonSummable(
            f"{what} at t={w.t} did not converge after {w.depth} terms ({w.reason}, rho~{w.rho:.6g})"
        )
    return w


@dataclass(frozen=True)
class WoldWeights:
    """Weights ``xi_q(t, r)`` for ``r = t, t-1, ...`` down to the truncation point."""

    t: int
    times: np.ndarray
    weights: np.ndarray
    rho: float

    def __iter__(self):
        return iter(zip(self.times.tolist(), self.weights.tolist()))

    def __len__(self) -> int:
        return len(self.weights)


def wold_weights(path, t: int, policy: TruncationPolicy = DEFAULT_POLICY) -> WoldWeights:
    w = _require(ar_walk(path, t, policy), "Wold weights")
    return WoldWeights(t=t, times=t - np.arange(len(w.xq)), weights=w.xq, rho=w.rho)


def unconditional_mean(path, t: int, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``sum_{r <= t} xi(t, r) drift(r)``."""
    path = as_path(path)
    w = _require(ar_walk(path, t, policy, track="xi"), "mean weights")
    drifts = path.drift_block(t - w.depth, t)[::-1]
    return float(np.dot(w.xi, drifts))


def unconditional_variance(path, t: int, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``sum_{r <= t} xi_q(t, r)^2 sigma2(r)``."""
    return autocovariance(path, t, 0, policy)


def autocovariance(path, t: int, lag: int, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``gamma_t(lag) = sum_{r <= t-lag} xi_q(t, r) xi_q(t-lag, r) sigma2(r)``."""
    path = as_path(path)
    if lag < 0:
        raise ConfigError("lag must be non-negative")
    later = _require(ar_walk(path, t - lag, policy, track="xq"), "variance weights")
    n = len(later.xq)
    if lag:
        full = _require(ar_walk(path, t, policy, track="xq", min_depth=lag + n - 1), "variance weights")
        lead = full.xq[lag:]
        m = min(len(lead), n)
        a, b = lead[:m], later.xq[:m]
    else:
        a = b = later.xq
        m = n
    sig = path.sigma2_block(t - lag - m + 1, t - lag)[::-1]
    return float(np.dot(a * b, sig))


def yule_walker_autocov(ar: Sequence[float], sigma2: float, nlags: int) -> np.ndarray:
    """Autocovariances ``gamma(0..nlags)`` of a stationary constant AR(p).

    Solves the linear Yule-Walker system for ``gamma(0..p)`` and extends
    by the AR recursion.
    """
    ar = np.asarray(ar, dtype=float)
    p = len(ar)
    if p == 0:
        out = np.zeros(nlags + 1)
        out[0] = sigma2
        return out
    # unknowns gamma(0..p); equation k: gamma(k) - sum_m phi_m gamma(|k-m|) = sigma2 [k=0]
    A = np.eye(p + 1)
    for k in range(p + 1):
        for m in range(1, p + 1):
            A[k, abs(k - m)] -= ar[m - 1]
    rhs = np.zeros(p + 1)
    rhs[0] = sigma2
    gam = np.linalg.solve(A, rhs)
    out = np.zeros(max(nlags, p) + 1)
    out[: p + 1] = gam
    for k in range(p + 1, nlags + 1):
        out[k] = sum(ar[m - 1] * out[k - m] for m in range(1, p + 1))
    return out[: nlags + 1]


def default_probes(t: int, deepest: int = 4096) -> list[int]:
    probes, j = [], 1
    while j <= deepest:
        probes.append(t - j)
        j *= 2
    return probes


@dataclass
class StabilityReport:
    """Numerical evidence on the summability conditions at time ``t``.

    ``xi_decay`` is the largest ``|xi(t, s)|`` over the last ``window``
    lags ending at the deepest evaluated ``s``. Nothing here proves a
    limit; all values are partial sums against tolerances.
    """

    t: int
    probes: list[int]
    xi_at_probes: list[float]
    abs_sum_partials: list[float]
    xi_decay: float
    abs_sum: float
    abs_sum_converged: bool
    sq_sum: float
    sq_sum_converged: bool
    decay_tol: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def stability_report(
    path,
    t: int,
    probes: Sequence[int] | None = None,
    policy: TruncationPolicy = DEFAULT_POLICY,
    decay_tol: float = 1e-6,
) -> StabilityReport:
    """Probe the decay of ``xi(t, s)`` and the partial sums as ``s`` recedes."""
    path = as_path(path)
    probes = default_probes(t) if probes is None else [int(s) for s in probes]
    if not probes or any(b >= a for a, b in zip(probes, probes[1:])) or probes[0] > t:
        raise ConfigError("probes must be a non-empty decreasing list of times not after t")
    deepest = t - probes[-1]
    abs_walk = ar_walk(path, t, policy, track="xi", max_depth=max(deepest, policy.max_terms))
    sq_walk = ar_walk(path, t, policy, track="xq", max_depth=max(deepest, policy.max_terms))
    with np.errstate(over="ignore", invalid="ignore"):
        depth = max(deepest, abs_walk.depth if abs_walk.converged else 0)
        row = ar_walk(path, t, policy, max_depth=depth, min_depth=depth + 1)
        xi_row = row.xi
        xq_row = row.xq
        n = len(xi_row)
        abs_cum = np.cumsum(np.abs(xi_row))
        sig = path.sigma2_block(t - n + 1, t)[::-1]
        drift = path.drift_block(t - n + 1, t)[::-1]
        sq_terms = xq_row**2 * sig
        sq_cum = np.cumsum(sq_terms)
        W = policy.window
        tail = slice(max(n - W, 0), n)
        xi_decay = float(np.max(np.abs(xi_row[tail])))
        drift_tail = float(np.max(np.abs(xi_row[tail] * drift[tail])))
        var_tail = float(np.max(sq_terms[tail]))
    at = [float(xi_row[t - s]) if t - s < n else math.nan for s in probes]
    partial = [float(abs_cum[min(t - s, n - 1)]) for s in probes]
    abs_sum = float(np.abs(abs_walk.xi).sum()) if abs_walk.converged else float(abs_cum[-1])
    sq_sum = float(sq_cum[-1]) if not sq_walk.converged else float(
        np.dot(sq_walk.xq**2, path.sigma2_block(t - sq_walk.depth, t)[::-1])
    )
    decays = bool(xi_decay <= decay_tol)
    diagnostics = {
        "abs_summable": abs_walk.converged,
        "xi_to_zero": decays,
        "drift_term_to_zero": bool(drift_tail <= decay_tol),
        "var_term_to_zero": bool(var_tail <= decay_tol),
        "mean_exists": abs_walk.converged,
        "variance_exists": sq_walk.converged,
    }
    implied = ("xi_to_zero", "drift_term_to_zero", "var_term_to_zero", "variance_exists")
    diagnostics["consistent"] = (not abs_walk.converged) or all(diagnostics[k] for k in implied)
    return StabilityReport(
        t=t,
        probes=list(probes),
        xi_at_probes=at,
        abs_sum_partials=partial,
        xi_decay=xi_decay,
        abs_sum=abs_sum,
        abs_sum_converged=abs_walk.converged,
        sq_sum=sq_sum,
        sq_sum_converged=sq_walk.converged,
        decay_tol=decay_tol,
        diagnostics=diagnostics,
    )
