"""Invertibility diagnostics and recovery of innovations from observations."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientHistory, NotInvertible
from .moments import DEFAULT_POLICY, TruncationPolicy, _jsonable, stability_report, walk
from .path import as_path
from .validation import check_series


@dataclass
class InvertibilityReport:
    """Evidence on ``sum_r |theta_green(t, r)| < inf``, mirroring :class:`StabilityReport`."""

    t: int
    probes: list[int]
    theta_at_probes: list[float]
    abs_sum_partials: list[float]
    theta_decay: float
    abs_sum: float
    converged: bool
    max_abs_phi: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def invertibility_report(
    path, t: int, probes: Sequence[int] | None = None, policy: TruncationPolicy = DEFAULT_POLICY
) -> InvertibilityReport:
    path = as_path(path)
    mirror = stability_report(path.mirrored(), t, probes, policy)
    deepest = mirror.probes[-1]
    if path.p:
        max_phi = float(np.max(np.abs(path.ar_block(max(deepest, t - 1000), t))))
    else:
        max_phi = 0.0
    return InvertibilityReport(
        t=t,
        probes=mirror.probes,
        theta_at_probes=mirror.xi_at_probes,
        abs_sum_partials=mirror.abs_sum_partials,
        theta_decay=mirror.xi_decay,
        abs_sum=mirror.abs_sum,
        converged=mirror.abs_sum_converged,
        max_abs_phi=max_phi,
    )


def _neg_ma(path):
    return lambda t: tuple(-c for c in path.ma_at(t))


def _theta_walk(path, t: int, policy: TruncationPolicy):
    if path.q == 0:
        return np.ones(1)
    w = walk(_neg_ma(path), path.q, lambda t: (), 0, t, policy, track="xi")
    if not w.converged:
        raise NotInvertible(
            f"MA Green weights at t={t} are not summable after {w.depth} terms ({w.reason})"
        )
    return w.xi


@dataclass(frozen=True)
class RecoveredErrors:
    """Recovered innovations ``eps_hat[i]`` at ``times[i]``.

    Only dates with enough history for the truncation are included.
    ``depth[i]`` is the number of past observations each value used.
    """

    times: np.ndarray
    eps: np.ndarray
    depth: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.times.tolist(), self.eps.tolist()))


def recover_errors(
    path,
    y,
    start: int = 0,
    policy: TruncationPolicy = DEFAULT_POLICY,
    times: Sequence[int] | None = None,
) -> RecoveredErrors:
    """``eps_hat_t = sum_r theta_p(t, r) y_r - sum_r theta_green(t, r) drift(r)``.

    ``y[i]`` is the observation at time ``start + i``. Each requested time
    (default: every time with enough history) uses the MA-side Green
    weights down to their truncation point.
    """
    path = as_path(path)
    y = check_series(y)
    end = start + len(y) - 1
    p = path.p
    if times is None:
        candidates = list(range(start, end + 1))
    else:
        candidates = [int(t) for t in times]
    out_t, out_e, out_d = [], [], []
    required = None
    # test the latest date first so non-invertible paths fail fast
    for t in sorted(candidates, reverse=True):
        theta = _theta_walk(path, t, policy)
        J = len(theta) - 1
        need = J + p
        if t - need < start:
            required = need + 1 if required is None else max(required, need + 1)
            if times is not None:
                raise InsufficientHistory(
                    f"recovering eps at t={t} needs {need + 1} observations back to {t - need}",
                    required=need + 1,
                )
            continue
        # theta_p(t, t-j) for j = 0..J+p
        tp = np.zeros(J + p + 1)
        tp[: J + 1] = theta
        for m in range(1, p + 1):
            for j in range(m, J + m + 1):
                tp[j] -= theta[j - m] * path.phi(m, t - j + m)
        window = y[t - need - start : t - start + 1][::-1]
        drift = path.drift_block(t - J, t)[::-1]
        out_t.append(t)
        out_e.append(float(np.dot(tp, window) - np.dot(theta, drift)))
        out_d.append(need + 1)
    if not out_t:
        raise InsufficientHistory(
            f"history of {len(y)} observations is too short; about {required} are needed",
            required=required,
        )
    order = np.argsort(out_t)
    return RecoveredErrors(
        times=np.asarray(out_t)[order], eps=np.asarray(out_e)[order], depth=np.asarray(out_d)[order]
    )
