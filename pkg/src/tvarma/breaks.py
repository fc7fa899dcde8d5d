"""Autoregressions with deterministic abrupt breaks.

Least-squares segmentation by dynamic programming, the closed-form
variance of a three-regime AR(2) after its last break, persistence
measures per regime and over time, and forecast-evaluation metrics.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .coefficients import Segment, make_break_path
from .errors import Assumption1Violated, ConfigError, DataError, SeriesTooShort
from .green import green_row
from .moments import _jsonable, unconditional_mean, unconditional_variance, yule_walker_autocov
from .validation import check_is_fitted, check_positive_int, check_series


@dataclass
class SegmentedAR:
    """Piecewise-constant AR(p) fit.

    ``break_times[i]`` is the time index of the last observation of
    segment ``i``. Per-segment lists are in chronological order; ``se``
    holds standard errors for ``(drift, phi_1, ..., phi_p)``.
    """

    p: int
    break_times: tuple
    drift: tuple
    ar: tuple
    sigma: tuple
    se: tuple | None = None
    ssr: float | None = None
    nobs: int | None = None
    start: int = 0

    def __post_init__(self):
        n = len(self.drift)
        self.break_times = tuple(int(b) for b in self.break_times)
        self.drift = tuple(float(x) for x in self.drift)
        self.ar = tuple(tuple(float(x) for x in row) for row in self.ar)
        self.sigma = tuple(float(x) for x in self.sigma)
        if n < 1 or len(self.break_times) != n - 1 or len(self.ar) != n or len(self.sigma) != n:
            raise ConfigError("segment lists must agree with the number of breaks")
        if any(len(row) != self.p for row in self.ar):
            raise ConfigError(f"each segment needs {self.p} AR coefficients")
        if any(b2 <= b1 for b1, b2 in zip(self.break_times, self.break_times[1:])):
            raise ConfigError("break times must be strictly increasing")
        if min(self.sigma) <= 0:
            raise ConfigError("noise scales must be positive")
        if self.se is not None:
            self.se = tuple(tuple(float(x) for x in row) for row in self.se)

    @property
    def n_segments(self) -> int:
        return len(self.drift)

    def segments(self) -> list[Segment]:
        return [Segment(ar=a, drift=d, sigma2=s * s) for a, d, s in zip(self.ar, self.drift, self.sigma)]

    def to_path(self):
        return make_break_path(self.segments(), self.break_times)

    def to_dict(self) -> dict:
        segs = []
        for i in range(self.n_segments):
            seg = {"drift": self.drift[i], "ar": list(self.ar[i]), "sigma": self.sigma[i]}
            if self.se is not None:
                seg["se"] = list(self.se[i])
            segs.append(seg)
        out = {"p": self.p, "break_times": list(self.break_times), "segments": segs, "start": self.start}
        if self.ssr is not None:
            out["ssr"] = self.ssr
        if self.nobs is not None:
            out["nobs"] = self.nobs
        return _jsonable(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "SegmentedAR":
        try:
            segs = data["segments"]
            has_se = all("se" in s for s in segs)
            return cls(
                p=int(data["p"]),
                break_times=data.get("break_times", ()),
                drift=[s.get("drift", 0.0) for s in segs],
                ar=[s["ar"] for s in segs],
                sigma=[s["sigma"] for s in segs],
                se=[s["se"] for s in segs] if has_se else None,
                ssr=data.get("ssr"),
                nobs=data.get("nobs"),
                start=int(data.get("start", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad segmented model: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SegmentedAR":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(data)


# -- segmentation ---------------------------------------------------------------

def _design(y: np.ndarray, p: int):
    T = len(y)
    X = np.ones((T - p, p + 1))
    for m in range(1, p + 1):
        X[:, m] = y[p - m : T - m]
    return X, y[p:]


class SegmentCosts:
    """SSR of every admissible segment of the lagged regression.

    Rows are regression observations ``0..n-1``; ``cost[i, j]`` is the SSR
    of rows ``i..j-1`` (``inf`` when shorter than ``min_seg`` or
    rank-deficient). Built from cumulative cross-products.
    """

    def __init__(self, X: np.ndarray, z: np.ndarray, min_seg: int, cond_max: float = 1e12):
        n, k = X.shape
        self.n, self.k, self.min_seg = n, k, min_seg
        cxx = np.zeros((n + 1, k, k))
        cxx[1:] = np.cumsum(X[:, :, None] * X[:, None, :], axis=0)
        cxz = np.zeros((n + 1, k))
        cxz[1:] = np.cumsum(X * z[:, None], axis=0)
        czz = np.zeros(n + 1)
        czz[1:] = np.cumsum(z * z)
        cost = np.full((n + 1, n + 1), np.inf)
        for i in range(n - min_seg + 1):
            js = np.arange(i + min_seg, n + 1)
            A = cxx[js] - cxx[i]
            b = cxz[js] - cxz[i]
            ok = np.linalg.cond(A) < cond_max
            ssr = np.full(len(js), np.inf)
            if ok.any():
                beta = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
                ssr[ok] = (czz[js][ok] - czz[i]) - np.einsum("ij,ij->i", b[ok], beta)
            cost[i, js] = np.maximum(ssr, 0.0)
        self.cost = cost

    def __call__(self, i: int, j: int) -> float:
        return float(self.cost[i, j])

    def gaussian(self) -> "SegmentCosts":
        """Costs ``n_i log(SSR_i / n_i)``: Gaussian likelihood with a variance per segment."""
        out = object.__new__(SegmentCosts)
        out.n, out.k, out.min_seg = self.n, self.k, self.min_seg
        length = np.arange(self.n + 1)[None, :] - np.arange(self.n + 1)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            out.cost = np.where(
                np.isfinite(self.cost) & (length > 0),
                length * np.log(np.maximum(self.cost, 1e-300) / np.maximum(length, 1)),
                np.inf,
            )
        return out


def dp_partition(costs: Callable[[int, int], float] | SegmentCosts, n: int, n_breaks: int,
                 min_seg: int) -> tuple[float, tuple[int, ...]]:
    """Globally SSR-minimal split of rows ``0..n-1`` into ``n_breaks + 1`` segments.

    Returns the total SSR and the segment end rows (exclusive) of all but
    the last segment. Ties go to the smallest split index at each step.
    """
    cost = costs.cost if isinstance(costs, SegmentCosts) else None
    seg = (lambda i, j: cost[i, j]) if cost is not None else costs
    best = np.full(n + 1, np.inf)
    for j in range(min_seg, n + 1):
        best[j] = seg(0, j)
    back = []
    for _ in range(n_breaks):
        nxt = np.full(n + 1, np.inf)
        arg = np.zeros(n + 1, dtype=int)
        for j in range(2 * min_seg, n + 1):
            lo, hi = min_seg, j - min_seg + 1
            if cost is not None:
                vals = best[lo:hi] + cost[lo:hi, j]
            else:
                vals = np.array([best[i] + seg(i, j) for i in range(lo, hi)])
            i = int(np.argmin(vals))  # first minimum: earliest split on ties
            nxt[j], arg[j] = vals[i], lo + i
        back.append(arg)
        best = nxt
    if not np.isfinite(best[n]):
        raise SeriesTooShort(f"cannot place {n_breaks} breaks with min_seg={min_seg} in {n} rows")
    ends, j = [], n
    for arg in reversed(back):
        j = int(arg[j])
        ends.append(j)
    return float(best[n]), tuple(reversed(ends))


def exhaustive_partition(costs: Callable[[int, int], float] | SegmentCosts, n: int, n_breaks: int,
                         min_seg: int) -> tuple[float, tuple[int, ...]]:
    """Brute-force counterpart of :func:`dp_partition` for small problems."""
    seg = costs if callable(costs) else costs.__call__
    best, best_ends = math.inf, ()
    for ends in itertools.combinations(range(min_seg, n - min_seg + 1), n_breaks):
        bounds = (0, *ends, n)
        if any(b - a < min_seg for a, b in zip(bounds, bounds[1:])):
            continue
        total = 0.0
        for a, b in zip(bounds, bounds[1:]):
            total = total + seg(a, b)
        if total < best:
            best, best_ends = total, ends
    if not math.isfinite(best):
        raise SeriesTooShort(f"cannot place {n_breaks} breaks with min_seg={min_seg} in {n} rows")
    return float(best), tuple(best_ends)


@dataclass
class SegmentationResult:
    """Fits for each break count and the BIC-selected one."""

    models: list
    ssr: list
    bic: list
    selected: int
    min_seg: int
    criterion: str = "ssr"

    @property
    def best(self) -> SegmentedAR:
        return self.models[self.selected]

    def to_dict(self) -> dict:
        return _jsonable({
            "selected_breaks": self.selected,
            "min_seg": self.min_seg,
            "criterion": self.criterion,
            "ssr_by_breaks": self.ssr,
            "bic_by_breaks": self.bic,
            "models": [m.to_dict() for m in self.models],
        })


def default_min_seg(p: int, T: int) -> int:
    return max(p + 2, int(math.ceil(0.1 * T)))


def _segment_fit(X, z, p, start, ends, ssr_total):
    bounds = (0, *ends, len(z))
    drift, ar, sigma, se = [], [], [], []
    for a, b in zip(bounds, bounds[1:]):
        Xs, zs = X[a:b], z[a:b]
        beta, res, rank, _ = np.linalg.lstsq(Xs, zs, rcond=None)
        if rank < X.shape[1]:
            raise DataError(f"rank-deficient regression in segment rows {a}..{b - 1}")
        resid = zs - Xs @ beta
        dof = max(len(zs) - X.shape[1], 1)
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(Xs.T @ Xs)
        drift.append(beta[0])
        ar.append(beta[1:])
        sigma.append(math.sqrt(s2))
        se.append(np.sqrt(np.diag(cov)))
    # row r is observation start + p + r; a break is the last row of a segment
    breaks = [start + p + e - 1 for e in ends]
    return SegmentedAR(p, breaks, drift, ar, sigma, se=se, ssr=ssr_total, nobs=len(z) + p, start=start)


CRITERIA = ("ssr", "gaussian")


def fit_segmented_ar(y, p: int, max_breaks: int, min_seg: int | None = None,
                     start: int = 0, criterion: str = "ssr") -> SegmentationResult:
    """Break dates for ``l = 0..max_breaks``, selected by BIC.

    ``y[i]`` is observed at time ``start + i``. ``min_seg`` counts
    regression observations per segment and defaults to
    ``max(p + 2, ceil(0.1 T))``.

    ``criterion="ssr"`` minimises the total sum of squared residuals
    (one noise variance). ``"gaussian"`` minimises ``sum_i n_i log(SSR_i /
    n_i)``, the Gaussian likelihood with a noise variance per segment,
    which dates breaks better when the variance also shifts.
    """
    if criterion not in CRITERIA:
        raise ConfigError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    p = check_positive_int(p, "p")
    max_breaks = check_positive_int(max_breaks, "max_breaks", minimum=0)
    y = check_series(y)
    T = len(y)
    if min_seg is None:
        min_seg = default_min_seg(p, T)
    min_seg = check_positive_int(min_seg, "min_seg")
    if min_seg < p + 2:
        raise ConfigError(f"min_seg must be at least p + 2 = {p + 2}")
    n = T - p
    if n < (max_breaks + 1) * min_seg:
        raise SeriesTooShort(
            f"{n} regression rows cannot hold {max_breaks + 1} segments of {min_seg}"
        )
    X, z = _design(y, p)
    costs = SegmentCosts(X, z, min_seg)
    objective = costs if criterion == "ssr" else costs.gaussian()
    models, ssrs, bics = [], [], []
    for l in range(max_breaks + 1):
        value, ends = dp_partition(objective, n, l, min_seg)
        bounds = (0, *ends, n)
        ssr = float(sum(costs.cost[a, b] for a, b in zip(bounds, bounds[1:])))
        models.append(_segment_fit(X, z, p, start, ends, ssr))
        ssrs.append(ssr)
        if criterion == "ssr":
            n_params = (l + 1) * (p + 1) + l
            bics.append(n * math.log(max(ssr, 1e-300) / n) + n_params * math.log(n))
        else:
            n_params = (l + 1) * (p + 2) + l
            bics.append(value + n_params * math.log(n))
    selected = int(np.argmin(bics))
    return SegmentationResult(models, ssrs, bics, selected, min_seg, criterion)


class BreakAR(BaseEstimator):
    """AR(p) with abrupt breaks estimated by least-squares segmentation.

    Parameters
    ----------
    p : int
        Autoregressive order.
    max_breaks : int
        Largest number of breaks considered.
    min_seg : int or None
        Minimum regression observations per segment.
    start : int
        Time index of the first observation.
    criterion : {"ssr", "gaussian"}
        Segmentation objective, see :func:`fit_segmented_ar`.

    Attributes
    ----------
    result_ : SegmentationResult
    model_ : SegmentedAR
        BIC-selected fit.
    break_times_ : tuple of int
    """

    def __init__(self, p: int = 2, max_breaks: int = 2, min_seg: int | None = None, start: int = 0,
                 criterion: str = "ssr"):
        self.p = p
        self.max_breaks = max_breaks
        self.min_seg = min_seg
        self.start = start
        self.criterion = criterion

    def fit(self, y, X=None):
        self.y_ = check_series(y)
        self.result_ = fit_segmented_ar(self.y_, self.p, self.max_breaks, self.min_seg, self.start, self.criterion)
        self.model_ = self.result_.best
        self.break_times_ = self.model_.break_times
        return self

    def predict(self, n: int = 1) -> np.ndarray:
        """Forecasts 1..n steps past the sample, using the last regime."""
        from .forecast import predict_finite

        check_is_fitted(self, "model_")
        path = self.model_.to_path()
        s = self.start + len(self.y_) - 1
        y_init = self.y_[::-1][: self.p]
        return np.array([predict_finite(path, s + h, s, y_init).point for h in range(1, n + 1)])


# -- variance and persistence ------------------------------------------------------

@dataclass
class DabVariance:
    """``Var(y_{t1+l}) = A sigma_1^2 + B sigma_2^2 + C sigma_3^2`` and ``P = Var / sigma_1^2``.

    Regimes are labelled backwards from the last: 1 after ``t1``, 2
    between the breaks, 3 up to ``t2``.
    """

    l: int
    var: float
    A: float
    B: float
    C: float
    P: float


def _ar2_roots_ok(phi1: float, phi2: float) -> bool:
    return bool(np.all(np.abs(np.roots([1.0, -phi1, -phi2])) < 1))


def dab_variance(ar: Sequence[Sequence[float]], sigma: Sequence[float], t2: int, t1: int,
                 l: int) -> DabVariance:
    """Closed-form ``Var(y_{t1+l})`` for a three-regime AR(2) with breaks ``t2 <= t1``.

    ``ar`` and ``sigma`` list the regimes chronologically. The weight on
    ``y_{t2-1}`` is ``phi_2(t2 + 1)``: the middle regime's coefficient
    when ``t2 < t1`` and the last regime's when the breaks coincide.
    """
    if l < 0:
        raise ConfigError("l must be non-negative")
    if t1 < t2:
        raise ConfigError("need t2 <= t1")
    ar = [tuple(float(x) for x in a) for a in ar]
    if len(ar) != 3 or any(len(a) != 2 for a in ar) or len(sigma) != 3:
        raise ConfigError("the closed form needs three AR(2) regimes")
    (phi13, phi23), _, (phi11, phi21) = ar
    if not (_ar2_roots_ok(phi11, phi21) and _ar2_roots_ok(phi13, phi23)):
        raise Assumption1Violated("first or last regime has a root on or outside the unit circle")
    s3, s2, s1 = (float(s) ** 2 for s in sigma)
    segs = [Segment(ar=a, sigma2=v) for a, v in zip(ar, (s3, s2, s1))]
    path = make_break_path(segs, (t2, t1)) if t1 > t2 else make_break_path([segs[0], segs[2]], (t2,))
    t = t1 + l
    row = green_row(path, t, t - t2)  # row[j] = xi(t, t - j)
    xi_ = lambda r: row[t - r]
    A = float(sum(xi_(t1 + r) ** 2 for r in range(1, l + 1)))
    B = float(sum(xi_(t1 - r) ** 2 for r in range(0, t1 - t2)))
    a = xi_(t2)
    b = path.phi(2, t2 + 1) * xi_(t2 + 1) if t2 + 1 <= t else 0.0
    num = (1.0 - phi23) * (a * a + b * b) + 2.0 * phi13 * a * b
    den = (1.0 + phi23) * ((1.0 - phi23) ** 2 - phi13**2)
    C = float(num / den)
    var = A * s1 + B * s2 + C * s3
    return DabVariance(l=l, var=var, A=A, B=B, C=C, P=A + B * s2 / s1 + C * s3 / s1)


def dabar_variance(model: SegmentedAR, l: int) -> DabVariance:
    """:func:`dab_variance` for a fitted three-segment AR(2)."""
    if model.p != 2 or model.n_segments != 3:
        raise ConfigError("the closed form needs a three-segment AR(2)")
    t2, t1 = model.break_times
    return dab_variance(model.ar, model.sigma, t2, t1, l)


def ar2_stationary_variance(phi1: float, phi2: float, sigma2: float) -> float:
    return (1.0 - phi2) * sigma2 / ((1.0 + phi2) * ((1.0 - phi2) ** 2 - phi1**2))


@dataclass
class SegmentPersistence:
    stationary: bool
    lar: float
    sum: float
    inv_one_minus_sum: float | None
    mean: float | None
    s0: float | None
    var: float | None
    P: float | None


@dataclass
class PersistenceReport:
    """Per-segment persistence measures and their paths over time.

    ``trajectory`` rows are ``(t, var, P, mean)`` with ``P = Var(y_t) /
    sigma^2(t)``; ``dab`` rows (three-segment AR(2) only) are
    ``(t1 + l, var, P)`` from the closed form.
    """

    segments: list
    trajectory: list = field(default_factory=list)
    dab: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable({
            "segments": [asdict(s) for s in self.segments],
            "trajectory": [dict(zip(("t", "var", "P", "mean"), r)) for r in self.trajectory],
            "dab": [dict(zip(("t", "var", "P"), r)) for r in self.dab],
        })


def _segment_measures(drift: float, ar: Sequence[float], sigma: float) -> SegmentPersistence:
    ar = np.asarray(ar, dtype=float)
    roots = np.roots(np.r_[1.0, -ar]) if len(ar) else np.array([])
    lar = float(np.max(np.abs(roots))) if len(roots) else 0.0
    total = float(ar.sum())
    if not lar < 1:
        return SegmentPersistence(False, lar, total, None, None, None, None, None)
    s2 = sigma * sigma
    var = float(yule_walker_autocov(ar, s2, 0)[0]) if len(ar) else s2
    inv = 1.0 / (1.0 - total)
    return SegmentPersistence(
        stationary=True,
        lar=lar,
        sum=total,
        inv_one_minus_sum=inv,
        mean=drift * inv,
        s0=s2 * inv * inv / (2.0 * math.pi),
        var=var,
        P=var / s2,
    )


def persistence_measures(seg: SegmentedAR, t_range: tuple[int, int] | None = None,
                         dab_horizon: int = 40) -> PersistenceReport:
    """Within-regime measures plus time-varying variance, persistence and mean.

    The trajectory covers ``t_range`` (default: the sample, or ten periods
    before the first break to ``dab_horizon`` after the last). Dates where
    the moments do not exist are skipped.
    """
    segments = [_segment_measures(d, a, s) for d, a, s in zip(seg.drift, seg.ar, seg.sigma)]
    if t_range is None:
        if seg.nobs is not None:
            t_range = (seg.start, seg.start + seg.nobs - 1)
        elif seg.break_times:
            t_range = (seg.break_times[0] - 10, seg.break_times[-1] + dab_horizon)
        else:
            t_range = (seg.start, seg.start + dab_horizon)
    path = seg.to_path()
    trajectory = []
    if segments[0].stationary:
        from .errors import NumericalError

        for t in range(t_range[0], t_range[1] + 1):
            try:
                var = unconditional_variance(path, t)
                mean = unconditional_mean(path, t)
            except NumericalError:
                continue
            trajectory.append((t, var, var / path.sigma2(t), mean))
    dab = []
    if seg.p == 2 and seg.n_segments == 3:
        try:
            for l in range(dab_horizon + 1):
                dv = dabar_variance(seg, l)
                dab.append((seg.break_times[1] + l, dv.var, dv.P))
        except Assumption1Violated:
            dab = []
    return PersistenceReport(segments=segments, trajectory=trajectory, dab=dab)


# -- forecast evaluation -------------------------------------------------------------

THEIL_U_CONVENTION = "RMSE(actual - predicted) / (sqrt(mean(actual^2)) + sqrt(mean(predicted^2)))"


def forecast_eval(actual, predicted, horizons: Sequence[int] | None = None) -> dict:
    """RMSE, MAE and Theil U per horizon.

    ``actual`` and ``predicted`` are arrays of shape ``(n,)`` or
    ``(n, len(horizons))``, one column per horizon.
    """
    a = np.asarray(actual, dtype=float)
    f = np.asarray(predicted, dtype=float)
    if a.shape != f.shape:
        raise DataError(f"actual {a.shape} and predicted {f.shape} differ in shape")
    if a.ndim == 1:
        a, f = a[:, None], f[:, None]
    if horizons is None:
        horizons = list(range(1, a.shape[1] + 1))
    if len(horizons) != a.shape[1]:
        raise DataError("one column per horizon is required")
    rows = []
    for j, h in enumerate(horizons):
        err = a[:, j] - f[:, j]
        rmse = float(np.sqrt(np.mean(err**2)))
        denom = float(np.sqrt(np.mean(a[:, j] ** 2)) + np.sqrt(np.mean(f[:, j] ** 2)))
        rows.append({
            "horizon": int(h),
            "rmse": rmse,
            "mae": float(np.mean(np.abs(err))),
            "theil_u": rmse / denom if denom > 0 else 0.0,
            "n": int(len(err)),
        })
    return {"metrics": rows, "theil_u_convention": THEIL_U_CONVENTION}
