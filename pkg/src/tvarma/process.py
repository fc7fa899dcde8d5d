"""TV-ARMA model object, simulation and the explicit solution representation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .green import augment_row, green_row
from .path import CoefficientPath, as_path
from .rng import make_rng

BURN_IN = 500
NOISE_FAMILIES = ("gaussian", "student_t")


@dataclass(frozen=True)
class TvArmaModel:
    """A coefficient path plus an innovation distribution.

    Parameters
    ----------
    path : CoefficientPath
    noise : {"gaussian", "student_t"}
        Student-t draws are rescaled to unit variance before multiplying
        by ``sqrt(sigma2(t))``; ``df`` must exceed 4.
    df : float, optional
        Degrees of freedom for ``student_t``.
    window : (int, int)
        Inclusive simulation window ``[t_min, t_max]``.
    """

    path: CoefficientPath
    noise: str = "gaussian"
    df: float | None = None
    window: tuple[int, int] = (1, 200)

    def __post_init__(self):
        if self.noise not in NOISE_FAMILIES:
            raise ConfigError(f"noise must be one of {NOISE_FAMILIES}, got {self.noise!r}")
        if self.noise == "student_t" and (self.df is None or self.df <= 4):
            raise ConfigError("student_t noise needs df > 4")
        lo, hi = self.window
        if hi < lo:
            raise ConfigError(f"empty window {self.window}")

    @property
    def p(self) -> int:
        return self.path.p

    @property
    def q(self) -> int:
        return self.path.q

    def standard_draws(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.noise == "gaussian":
            return rng.standard_normal(size)
        return rng.standard_t(self.df, size) * np.sqrt((self.df - 2.0) / self.df)


@dataclass(frozen=True)
class SimulationRun:
    """Simulated series with the innovations that produced it.

    ``y[i]`` and ``eps[i]`` belong to time ``offset + i``. The stored range
    starts with the prescribed pre-sample values, then the burn-in, then
    the model window.
    """

    y: np.ndarray
    eps: np.ndarray
    offset: int
    window: tuple[int, int]
    seed: object
    burn_in: int

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.y))

    def _index(self, t: int) -> int:
        i = t - self.offset
        if not 0 <= i < len(self.y):
            raise DataError(f"time {t} not covered by the run ({self.offset}..{self.offset + len(self.y) - 1})")
        return i

    def y_at(self, t: int) -> float:
        return float(self.y[self._index(t)])

    def eps_at(self, t: int) -> float:
        return float(self.eps[self._index(t)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "y", "eps"])
        lo, hi = self.window
        for t in range(lo, hi + 1):
            i = t - self.offset
            writer.writerow([t, repr(float(self.y[i])), repr(float(self.eps[i]))])
        return buf.getvalue()


def _prescribed(values, n: int, name: str) -> np.ndarray:
    if values is None:
        return np.zeros(n)
    arr = np.asarray(values, dtype=float)
    if arr.shape[0] != n:
        raise ConfigError(f"{name} needs {n} values, got {arr.shape[0]}")
    return arr


def _path_innovations(path: CoefficientPath, t0: int, t1: int):
    if path.innovations is None:
        return None
    start, values = path.innovations
    if t0 < start or t1 > start + len(values) - 1:
        raise DataError("simulation range exceeds the innovations attached to the path")
    return np.asarray(values[t0 - start : t1 - start + 1], dtype=float)


def simulate(
    model: TvArmaModel,
    seed=None,
    initial_values: Mapping[str, Sequence[float]] | None = None,
    burn_in: int | None = None,
) -> SimulationRun:
    """Iterate the model equation forward over the window.

    ``initial_values`` may hold ``"y"`` (``p`` values, most recent first)
    and ``"eps"`` (``q`` values, most recent first) for the dates just
    before the first simulated date. Missing values default to zero.
    Innovations attached to the path (stochastic generators) are used
    instead of fresh draws.
    """
    path = model.path
    p, q = path.p, path.q
    if burn_in is None:
        burn_in = 0 if path.innovations is not None else BURN_IN
    if burn_in < 0:
        raise ConfigError("burn_in must be non-negative")
    t_min, t_max = model.window
    start = t_min - burn_in
    lead = max(p, q)
    init = initial_values or {}
    unknown = set(init) - {"y", "eps"}
    if unknown:
        raise ConfigError(f"unknown initial value keys: {sorted(unknown)}")
    y0 = _prescribed(init.get("y"), p, "initial y")
    e0 = _prescribed(init.get("eps"), q, "initial eps")

    n = t_max - start + 1
    y = np.zeros(lead + n)
    eps = np.zeros(lead + n)
    offset = start - lead
    # most recent first: value for time start-1-i goes to index lead-1-i
    y[lead - p : lead] = y0[::-1]
    eps[lead - q : lead] = e0[::-1]

    attached = _path_innovations(path, start, t_max)
    if attached is not None:
        eps[lead:] = attached
    else:
        rng = make_rng(seed)
        z = model.standard_draws(rng, n)
        eps[lead:] = z * np.sqrt(path.sigma2_block(start, t_max))

    for i in range(lead, lead + n):
        t = offset + i
        value = path.drift(t) + eps[i]
        for m, c in enumerate(path.ar_at(t), start=1):
            value += c * y[i - m]
        for l, c in enumerate(path.ma_at(t), start=1):
            value += c * eps[i - l]
        y[i] = value
    return SimulationRun(y=y, eps=eps, offset=offset, window=(t_min, t_max), seed=seed, burn_in=burn_in)


def simulate_many(
    path,
    t_start: int,
    t_end: int,
    n: int,
    seed=None,
    record: Iterable[int] | None = None,
    noise: str = "gaussian",
    df: float | None = None,
    record_eps: bool = False,
):
    """Simulate ``n`` independent replications at once, zero pre-sample values.

    Returns ``(y, eps)`` dictionaries mapping each recorded time to an array
    of length ``n``; ``eps`` is empty unless ``record_eps``.
    """
    path = as_path(path)
    model = TvArmaModel(path, noise=noise, df=df, window=(t_start, t_end))
    rng = make_rng(seed)
    wanted = set(range(t_start, t_end + 1) if record is None else record)
    p, q = path.p, path.q
    y_hist = [np.zeros(n) for _ in range(p)]
    e_hist = [np.zeros(n) for _ in range(q)]
    ys: dict[int, np.ndarray] = {}
    es: dict[int, np.ndarray] = {}
    for t in range(t_start, t_end + 1):
        e = model.standard_draws(rng, n) * np.sqrt(path.sigma2(t))
        value = path.drift(t) + e
        for m, c in enumerate(path.ar_at(t), start=1):
            value = value + c * y_hist[-m]
        for l, c in enumerate(path.ma_at(t), start=1):
            value = value + c * e_hist[-l]
        if p:
            y_hist = y_hist[1:] + [value]
        if q:
            e_hist = e_hist[1:] + [e]
        if t in wanted:
            ys[t] = value
            if record_eps:
                es[t] = e
    return ys, es


@dataclass(frozen=True)
class ForecastWeights:
    """Green-function weights connecting ``y_t`` to information at ``s``.

    ``hom[m-1]`` multiplies ``y_{s+1-m}``; ``drift[i]`` and ``xq[i]``
    belong to ``r = s+1+i``; ``xsq[i]`` multiplies ``eps_{s-i}``.
    """

    t: int
    s: int
    hom: np.ndarray
    drift_weights: np.ndarray
    drift_values: np.ndarray
    xq: np.ndarray
    xsq: np.ndarray
    sigma2: np.ndarray

    @property
    def particular(self) -> float:
        return float(np.dot(self.drift_weights, self.drift_values))

    @property
    def mse(self) -> float:
        return float(np.dot(self.xq**2, self.sigma2))


def forecast_weights(path, t: int, s: int) -> ForecastWeights:
    """All weights of the four-part explicit representation for ``s < t``."""
    path = as_path(path)
    if s >= t:
        raise ConfigError(f"need s < t, got s={s}, t={t}")
    p, q = path.p, path.q
    k = t - s
    row = green_row(path, t, k - 1)  # xi(t, t-j) for j = 0..k-1, i.e. r = t..s+1

    def xi_t(r: int) -> float:
        return float(row[t - r]) if s + 1 <= r <= t else 0.0

    hom = np.zeros(p)
    for m in range(1, p + 1):
        hom[m - 1] = sum(path.phi(m - 1 + r, s + r) * xi_t(s + r) for r in range(1, p + 2 - m))
    xq_row = augment_row(path, t, row)
    xq = xq_row[::-1].copy()  # r = s+1..t
    drift_weights = row[::-1].copy()
    drift_values = path.drift_block(s + 1, t)
    xsq = np.zeros(q)
    for i in range(q):
        r = s - i
        xsq[i] = sum(xi_t(r + l) * path.theta(l, r + l) for l in range(s + 1 - r, q + 1))
    return ForecastWeights(
        t=t,
        s=s,
        hom=hom,
        drift_weights=drift_weights,
        drift_values=drift_values,
        xq=xq,
        xsq=xsq,
        sigma2=path.sigma2_block(s + 1, t),
    )


def represent(model, t: int, s: int, y_init, eps_init=(), eps_future=()):
    """``y_t`` from prescribed values at ``s`` and the innovations after ``s``.

    ``y_init`` holds ``y_s, ..., y_{s+1-p}``; ``eps_init`` holds
    ``eps_s, ..., eps_{s+1-q}``; ``eps_future`` holds ``eps_{s+1}..eps_t``.
    Extra trailing dimensions are broadcast, so many replications can be
    evaluated at once.
    """
    w = forecast_weights(model, t, s)
    y_init = np.asarray(y_init, dtype=float)
    eps_init = np.asarray(eps_init, dtype=float)
    eps_future = np.asarray(eps_future, dtype=float)
    if len(y_init) != len(w.hom) or len(eps_init) != len(w.xsq) or len(eps_future) != t - s:
        raise ConfigError("prescribed values do not match the model orders and horizon")
    total = w.particular + np.tensordot(w.hom, y_init, axes=(0, 0))
    if len(w.xsq):
        total = total + np.tensordot(w.xsq, eps_init, axes=(0, 0))
    total = total + np.tensordot(w.xq, eps_future, axes=(0, 0))
    return total if np.ndim(total) else float(total)


def _getter(eps, start: int | None) -> Callable[[int], float]:
    if isinstance(eps, SimulationRun):
        return eps.eps_at
    if callable(eps):
        return eps
    if isinstance(eps, Mapping):
        return lambda r: float(eps[r])
    if start is None:
        raise ConfigError("array innovations need a start time")
    arr = np.asarray(eps, dtype=float)

    def get(r: int) -> float:
        i = r - start
        if not 0 <= i < len(arr):
            raise DataError(f"innovation at time {r} not supplied")
        return float(arr[i])

    return get


def decompose_innovations(model, t: int, s: int, eps, start: int | None = None):
    """Split ``sum_{r=s+1}^t xi(t, r) u_r`` into unobservable and observable parts.

    ``eps`` is a :class:`SimulationRun`, a mapping or callable from time to
    value, or an array whose first element is at time ``start``.
    """
    w = forecast_weights(model, t, s)
    get = _getter(eps, start)
    hidden = sum(w.xq[i] * get(s + 1 + i) for i in range(t - s))
    seen = sum(w.xsq[i] * get(s - i) for i in range(len(w.xsq)))
    return float(hidden), float(seen)


@dataclass(frozen=True)
class CompanionProduct:
    """``C_{t,s} = Phi_t Phi_{t-1} ... Phi_{s+1}`` of companion matrices."""

    t: int
    s: int
    entries: np.ndarray


def companion_matrix(path, t: int) -> np.ndarray:
    path = as_path(path)
    p = path.p
    mat = np.zeros((p, p))
    if p:
        mat[0] = path.ar_at(t)
        mat[1:, :-1] = np.eye(p - 1)
    return mat


def companion_product(path, t: int, s: int) -> CompanionProduct:
    path = as_path(path)
    if t < s:
        raise ConfigError(f"need t >= s, got t={t}, s={s}")
    prod = np.eye(path.p)
    for r in range(s + 1, t + 1):
        prod = companion_matrix(path, r) @ prod
    return CompanionProduct(t=t, s=s, entries=prod)
