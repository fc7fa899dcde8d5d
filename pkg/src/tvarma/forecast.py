"""Optimal linear predictors, forecast errors and forward efficiency."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import norm
from sklearn.base import BaseEstimator

from .errors import ConfigError, InsufficientHistory, NonSummable
from .green import green_row
from .inversion import recover_errors
from .moments import DEFAULT_POLICY, TruncationPolicy, _jsonable, ar_walk
from .path import CoefficientPath, as_path
from .process import forecast_weights
from .validation import check_is_fitted, check_series


@dataclass
class ForecastReport:
    """Point forecast of ``y_t`` from information at ``s`` and its error variance.

    ``fe_weights[i]`` is ``xi_q(t, s+1+i)``: the forecast error is
    ``sum_i fe_weights[i] eps_{s+1+i}`` and ``mse`` its variance.
    """

    t: int
    s: int
    point: float | np.ndarray
    mse: float
    fe_weights: np.ndarray
    sigma2: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def interval(self, level: float = 0.95):
        """Gaussian interval ``point -/+ z sqrt(mse)``."""
        z = norm.ppf(0.5 + level / 2.0)
        half = z * math.sqrt(self.mse)
        return self.point - half, self.point + half

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("fe_weights", "sigma2"):
            out[key] = np.asarray(out[key]).tolist()
        out["point"] = np.asarray(self.point).tolist()
        lo, hi = self.interval()
        out["interval95"] = [np.asarray(lo).tolist(), np.asarray(hi).tolist()]
        return _jsonable(out)


def predict_finite(model, t: int, s: int, y_init, eps_init=()) -> ForecastReport:
    """``E(y_t | y_s, ..., y_{s+1-p}, eps_s, ..., eps_{s+1-q})``.

    ``y_init`` and ``eps_init`` are ordered most recent first; trailing
    dimensions broadcast over replications.
    """
    w = forecast_weights(model, t, s)
    y_init = np.asarray(y_init, dtype=float)
    eps_init = np.asarray(eps_init, dtype=float)
    if len(y_init) != len(w.hom):
        raise ConfigError(f"need {len(w.hom)} prescribed y values, got {len(y_init)}")
    if len(eps_init) != len(w.xsq):
        raise ConfigError(f"need {len(w.xsq)} prescribed eps values, got {len(eps_init)}")
    point = w.particular + np.tensordot(w.hom, y_init, axes=(0, 0))
    if len(w.xsq):
        point = point + np.tensordot(w.xsq, eps_init, axes=(0, 0))
    point = point if np.ndim(point) else float(point)
    return ForecastReport(t=t, s=s, point=point, mse=w.mse, fe_weights=w.xq, sigma2=w.sigma2)


def predict_infinite(
    model, t: int, s: int, y, start: int = 0, policy: TruncationPolicy = DEFAULT_POLICY
) -> ForecastReport:
    """Projection on the whole observed past up to ``s``.

    ``point = sum_{r <= t} xi(t, r) drift(r) + sum_{r <= s} xi_q(t, r) eps_hat_r``
    with ``eps_hat`` recovered from ``y`` (``y[i]`` observed at ``start + i``).
    """
    path = as_path(model)
    if s >= t:
        raise ConfigError(f"need s < t, got s={s}, t={t}")
    y = check_series(y)
    if start + len(y) - 1 < s:
        raise InsufficientHistory(f"history ends at {start + len(y) - 1}, before s={s}")
    w = ar_walk(path, t, policy)
    if not w.converged:
        raise NonSummable(f"Green weights at t={t} are not summable ({w.reason}); no stable solution")
    J = w.depth
    drift = path.drift_block(t - J, t)[::-1]
    mean_part = float(np.dot(w.xi, drift))
    fw = forecast_weights(path, t, s)
    diagnostics = {"green_depth": J, "rho": w.rho}
    if path.q == 0:
        # eps_hat_r = y_r - drift(r) - sum_m phi_m(r) y_{r-m}; summing against
        # xi(t, r) telescopes to the finite predictor
        n_needed = path.p
        if s - n_needed + 1 < start:
            raise InsufficientHistory(f"need {n_needed} observations up to s={s}", required=n_needed)
        y_init = [y[s - m + 1 - start] for m in range(1, path.p + 1)]
        point = fw.particular + float(np.dot(fw.hom, y_init))
        diagnostics["eps_terms"] = 0
    else:
        lags = np.arange(t - s, J + 1)  # r = t - lag from s down to t - J
        times = (t - lags).tolist()
        if times[-1] < start:
            raise InsufficientHistory(
                f"the projection needs innovations back to {times[-1]}, history starts at {start}",
                required=None,
            )
        rec = recover_errors(path, y[: s - start + 1], start, policy, times=times)
        eps_hat = rec.eps[::-1]  # aligned with lags ascending
        point = mean_part + float(np.dot(w.xq[t - s :], eps_hat))
        diagnostics["eps_terms"] = len(eps_hat)
        diagnostics["history_used"] = int(s - times[-1] + rec.depth.max())
    diagnostics["mean_part"] = mean_part
    return ForecastReport(t=t, s=s, point=point, mse=fw.mse, fe_weights=fw.xq, sigma2=fw.sigma2,
                          diagnostics=diagnostics)


def mse_time_comparison(path, k: int, t1: int, t2: int, tol: float = 1e-9):
    """MSE of ``k``-step forecasts targeting ``t1`` and ``t2``; flag equality."""
    if k < 1:
        raise ConfigError("horizon k must be at least 1")
    mse1 = forecast_weights(path, t1, t1 - k).mse
    mse2 = forecast_weights(path, t2, t2 - k).mse
    return mse1, mse2, bool(abs(mse1 - mse2) <= tol * max(1.0, abs(mse1), abs(mse2)))


@dataclass
class EfficiencyReport:
    """Forward efficiency of forecasts from a fixed origin ``s``.

    ``F[i] = sum_{r=s+1}^{t_i} |xi(t_i, r)|`` and ``mse[i]`` its companion
    error variance. ``omega_estimate`` is the sup minus inf of the MSE over
    the later half of the probes, an estimate of the oscillation.
    """

    s: int
    probes: list[int]
    F: list[float]
    mse: list[float]
    F_sup: float
    bounded: bool
    omega_estimate: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def forward_efficiency(path, s: int, horizon_probes: Sequence[int] | None = None,
                       growth_tol: float = 0.05) -> EfficiencyReport:
    """``bounded`` asks whether ``F`` stopped growing between the last two probes."""
    path = as_path(path)
    if horizon_probes is None:
        horizon_probes = [s + 2**i for i in range(11)]
    probes = sorted(int(t) for t in horizon_probes)
    if not probes or probes[0] <= s:
        raise ConfigError("horizon probes must lie after s")
    F, mse = [], []
    with np.errstate(over="ignore", invalid="ignore"):
        for t in probes:
            fw = forecast_weights(path, t, s)
            F.append(float(np.sum(np.abs(fw.drift_weights))))
            mse.append(fw.mse)
    half = max(len(probes) // 2, 1)
    prev, last = (F[-2], F[-1]) if len(F) > 1 else (F[0], F[0])
    bounded = bool(np.isfinite(last) and last <= (1.0 + growth_tol) * prev)
    tail = mse[half:] or mse
    return EfficiencyReport(
        s=s,
        probes=probes,
        F=F,
        mse=mse,
        F_sup=float(max(F)),
        bounded=bounded,
        omega_estimate=float(max(tail) - min(tail)),
    )


class TvArmaForecaster(BaseEstimator):
    """Forecaster for a series driven by a known coefficient path.

    Parameters
    ----------
    path : CoefficientPath
        Coefficients indexed on the same integer clock as the data.
    start : int
        Time index of the first observation passed to :meth:`fit`.
    tail_tol, max_terms : float, int
        Truncation policy for innovation recovery.

    Attributes
    ----------
    y_ : ndarray
        Observed series.
    end_ : int
        Time index of the last observation.
    eps_ : dict
        Recovered innovations for the last ``q`` dates (empty if ``q = 0``).
    """

    def __init__(self, path: CoefficientPath | None = None, start: int = 0,
                 tail_tol: float = 1e-10, max_terms: int = 100_000):
        self.path = path
        self.start = start
        self.tail_tol = tail_tol
        self.max_terms = max_terms

    def fit(self, y, X=None):
        if not isinstance(self.path, CoefficientPath):
            raise ConfigError("path must be a CoefficientPath")
        self.y_ = check_series(y, min_length=max(self.path.p, 1))
        self.end_ = self.start + len(self.y_) - 1
        policy = TruncationPolicy(self.tail_tol, self.max_terms)
        self.eps_ = {}
        if self.path.q:
            last = list(range(self.end_ - self.path.q + 1, self.end_ + 1))
            self.eps_ = recover_errors(self.path, self.y_, self.start, policy, times=last).as_dict()
        return self

    def _report(self, h: int) -> ForecastReport:
        check_is_fitted(self, "y_")
        s = self.end_
        y_init = [self.y_[s - m + 1 - self.start] for m in range(1, self.path.p + 1)]
        eps_init = [self.eps_[s - l + 1] for l in range(1, self.path.q + 1)]
        return predict_finite(self.path, s + h, s, y_init, eps_init)

    def predict(self, horizons: Sequence[int] | int = 1) -> np.ndarray:
        """Point forecasts ``h`` steps after the last observation."""
        hs = [horizons] if np.isscalar(horizons) else list(horizons)
        return np.array([self._report(int(h)).point for h in hs])

    def predict_mse(self, horizons: Sequence[int] | int = 1) -> np.ndarray:
        hs = [horizons] if np.isscalar(horizons) else list(horizons)
        return np.array([self._report(int(h)).mse for h in hs])
