"""Concrete coefficient paths and stochastic coefficient generators."""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigError, OutOfWindow
from .green import green_column
from .path import CoefficientPath
from .rng import make_rng

PATH_KINDS = (
    "constant",
    "abrupt_breaks",
    "periodic",
    "logistic_transition",
    "exponential_transition",
    "gegenbauer",
    "custom_table",
)


def _as_tuple(values, name: str) -> tuple[float, ...]:
    if values is None:
        return ()
    if np.isscalar(values):
        return (float(values),)
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number or a list of numbers") from exc


def constant_path(ar=(), ma=(), drift: float = 0.0, sigma2: float = 1.0, name: str = "constant"):
    ar = _as_tuple(ar, "ar")
    ma = _as_tuple(ma, "ma")
    return CoefficientPath(len(ar), len(ma), ar=ar, ma=ma, drift=drift, sigma2=sigma2, name=name)


# -- smooth transitions --------------------------------------------------------

def logistic_weight(t: int, gamma: float, tau: float, eps_f: float = 1e-12) -> float:
    """``F(t) = 1 / (1 + exp(gamma (t - tau)))`` snapped to 0 or 1 within ``eps_f``."""
    f = float(expit(-gamma * (t - tau)))
    if f < eps_f:
        return 0.0
    if f > 1.0 - eps_f:
        return 1.0
    return f


def logistic_plateaus(gamma: float, tau: float, eps_f: float = 1e-12) -> tuple[int, int] | None:
    """Times ``(t1, t2)``: ``F = 1`` for ``t <= t1`` and ``F = 0`` for ``t >= t2``.

    ``None`` when ``gamma = 0`` (no plateaus).
    """
    if gamma <= 0:
        return None
    half = math.log((1.0 - eps_f) / eps_f) / gamma
    t1 = math.floor(tau - half)
    t2 = math.ceil(tau + half)
    while logistic_weight(t1 + 1, gamma, tau, eps_f) == 1.0:
        t1 += 1
    while logistic_weight(t1, gamma, tau, eps_f) != 1.0:
        t1 -= 1
    while logistic_weight(t2 - 1, gamma, tau, eps_f) == 0.0:
        t2 -= 1
    while logistic_weight(t2, gamma, tau, eps_f) != 0.0:
        t2 += 1
    return t1, t2


def make_logistic_path(
    phi1: float,
    phi2: float,
    gamma: float,
    tau: int,
    drift: float = 0.0,
    sigma2: float = 1.0,
    eps_f: float = 1e-12,
) -> CoefficientPath:
    """AR(1) path moving from ``phi1`` to ``phi2`` along a logistic curve."""
    if gamma < 0:
        raise ConfigError(f"gamma must be non-negative, got {gamma}")

    def ar(t: int) -> tuple[float]:
        f = logistic_weight(t, gamma, tau, eps_f)
        return (phi1 * f + (1.0 - f) * phi2,)

    return CoefficientPath(1, 0, ar=ar, drift=drift, sigma2=sigma2, name="logistic_transition")


def make_exponential_path(
    phi: float, lam: float, T: int, drift: float = 0.0, sigma2: float = 1.0
) -> CoefficientPath:
    """AR(1) path ``phi`` for ``t <= 0``, ``phi lam^(t/T)`` on ``1..T-1``, ``phi lam`` after."""
    if T < 1:
        raise ConfigError("T must be at least 1")
    if lam <= 0:
        raise ConfigError("lam must be positive")

    def ar(t: int) -> tuple[float]:
        if t <= 0:
            return (phi,)
        if t >= T:
            return (phi * lam,)
        return (phi * lam ** (t / T),)

    return CoefficientPath(1, 0, ar=ar, drift=drift, sigma2=sigma2, name="exponential_transition")


# -- seasonal and piecewise paths ----------------------------------------------

def _season_values(values, ell: int, name: str) -> list:
    if np.isscalar(values):
        return [float(values)] * ell
    values = list(values)
    if len(values) != ell:
        raise ConfigError(f"{name} needs one value per season ({ell}), got {len(values)}")
    return [float(v) for v in values]


def make_periodic_path(coeffs: Sequence, ell: int | None = None, ma=(), ma_seasons=None,
                       drift=0.0, sigma2=1.0):
    """Periodic AR path: the coefficients at time ``t`` are ``coeffs[t mod ell]``.

    Each season entry is a scalar (AR(1)) or a sequence of AR coefficients.
    ``ma`` gives constant MA coefficients; ``ma_seasons`` one MA tuple per
    season instead. ``drift`` and ``sigma2`` are scalars or per-season lists.
    """
    coeffs = list(coeffs)
    if not coeffs:
        raise ConfigError("periodic path needs at least one season")
    if ell is None:
        ell = len(coeffs)
    if ell != len(coeffs):
        raise ConfigError(f"season count {ell} does not match {len(coeffs)} coefficient sets")
    ar_seasons = [_as_tuple(c, "season coefficients") for c in coeffs]
    p = len(ar_seasons[0])
    if any(len(a) != p for a in ar_seasons):
        raise ConfigError("all seasons must share the AR order")
    if ma_seasons is None:
        mas = [_as_tuple(ma, "ma")] * ell
    else:
        mas = [_as_tuple(m, "ma_seasons") for m in ma_seasons]
        if len(mas) != ell or len({len(m) for m in mas}) != 1:
            raise ConfigError("ma_seasons needs one equal-length tuple per season")
    drifts = _season_values(drift, ell, "drift")
    variances = _season_values(sigma2, ell, "sigma2")
    if min(variances) <= 0:
        raise ConfigError("sigma2 must be positive")
    return CoefficientPath(
        p,
        len(mas[0]),
        ar=lambda t: ar_seasons[t % ell],
        ma=lambda t: mas[t % ell],
        drift=lambda t: drifts[t % ell],
        sigma2=lambda t: variances[t % ell],
        name="periodic",
    )


@dataclass(frozen=True)
class Segment:
    """Parameters of one regime of a piecewise-constant path."""

    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    drift: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", _as_tuple(self.ar, "ar"))
        object.__setattr__(self, "ma", _as_tuple(self.ma, "ma"))
        if not self.sigma2 > 0:
            raise ConfigError("segment sigma2 must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Segment":
        data = dict(data)
        if "sigma" in data:
            if "sigma2" in data:
                raise ConfigError("give either sigma or sigma2, not both")
            data["sigma2"] = float(data.pop("sigma")) ** 2
        unknown = set(data) - {"ar", "ma", "drift", "sigma2"}
        if unknown:
            raise ConfigError(f"unknown segment fields: {sorted(unknown)}")
        return cls(**data)


def _pad(values: tuple[float, ...], n: int) -> tuple[float, ...]:
    return values + (0.0,) * (n - len(values))


def make_break_path(segments: Sequence[Segment | Mapping], break_times: Sequence[int]):
    """Piecewise-constant path with abrupt breaks.

    Segment ``i`` is active for ``break_times[i-1] < t <= break_times[i]``,
    so each break time is the last period of the earlier regime. Segments
    are listed in chronological order. Lower-order segments are padded
    with zero coefficients.
    """
    segments = [s if isinstance(s, Segment) else Segment.from_dict(s) for s in segments]
    breaks = [int(b) for b in break_times]
    if len(segments) != len(breaks) + 1:
        raise ConfigError(f"{len(breaks)} breaks need {len(breaks) + 1} segments, got {len(segments)}")
    if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
        raise ConfigError(f"break times must be strictly increasing, got {breaks}")
    p = max(len(s.ar) for s in segments)
    q = max(len(s.ma) for s in segments)
    ars = [_pad(s.ar, p) for s in segments]
    mas = [_pad(s.ma, q) for s in segments]
    drifts = [float(s.drift) for s in segments]
    variances = [float(s.sigma2) for s in segments]

    def regime(t: int) -> int:
        return bisect.bisect_left(breaks, t)

    return CoefficientPath(
        p,
        q,
        ar=lambda t: ars[regime(t)],
        ma=lambda t: mas[regime(t)],
        drift=lambda t: drifts[regime(t)],
        sigma2=lambda t: variances[regime(t)],
        name="abrupt_breaks",
    )


# -- Gegenbauer ----------------------------------------------------------------

def make_gegenbauer_path(d: float, phi: float) -> CoefficientPath:
    """Order-2 path whose Green function generates Gegenbauer coefficients.

    ``phi_1(j) = 2 phi ((d - 1)/j + 1)`` and ``phi_2(j) = -(2 (d - 1)/j + 1)``,
    defined for ``j >= 1``.
    """
    if not 0 < d < 0.5:
        raise ConfigError(f"d must lie in (0, 1/2), got {d}")
    if abs(phi) > 1:
        raise ConfigError(f"|phi| must not exceed 1, got {phi}")

    def ar(j: int) -> tuple[float, float]:
        if j < 1:
            raise OutOfWindow(f"Gegenbauer coefficients are defined for j >= 1, got {j}")
        return (2.0 * phi * ((d - 1.0) / j + 1.0), -(2.0 * (d - 1.0) / j + 1.0))

    path = CoefficientPath(2, 0, ar=ar, name="gegenbauer")
    path.gegenbauer = (d, phi)
    return path


def gegenbauer_coefficients(d: float, phi: float, n: int) -> np.ndarray:
    """Coefficients ``c_0..c_n`` of ``(1 - 2 phi z + z^2)^(-d)``.

    ``c_j = xi(j, 1) 2 phi d + xi^(2)(j, 1)`` with ``xi^(2)(j, 1) = -d xi(j, 2)``.
    """
    path = make_gegenbauer_path(d, phi)
    out = np.empty(n + 1)
    out[0] = 1.0
    if n == 0:
        return out
    col1 = green_column(path, 1, n - 1)  # xi(1 + k, 1)
    col2 = green_column(path, 2, max(n - 2, 0))  # xi(2 + k, 2)
    for j in range(1, n + 1):
        second = -d * col2[j - 2] if j >= 2 else 0.0
        out[j] = col1[j - 1] * 2.0 * phi * d + second
    return out


# -- table-backed paths --------------------------------------------------------

def table_path(times, ar=None, ma=None, drift=None, sigma2=None, name="custom_table"):
    """Path backed by finite arrays; queries outside ``times`` raise."""
    times = np.asarray(times, dtype=int)
    if times.ndim != 1 or len(times) == 0:
        raise ConfigError("custom table needs at least one row")
    if np.any(np.diff(times) != 1):
        raise ConfigError("custom table times must be consecutive integers")
    n = len(times)
    t0 = int(times[0])
    ar = np.zeros((n, 0)) if ar is None else np.asarray(ar, dtype=float).reshape(n, -1)
    ma = np.zeros((n, 0)) if ma is None else np.asarray(ma, dtype=float).reshape(n, -1)
    drift = np.zeros(n) if drift is None else np.asarray(drift, dtype=float).reshape(n)
    sigma2 = np.ones(n) if sigma2 is None else np.asarray(sigma2, dtype=float).reshape(n)
    if np.any(sigma2 <= 0):
        raise ConfigError("sigma2 must be positive in every row")
    ar_rows = [tuple(r) for r in ar.tolist()]
    ma_rows = [tuple(r) for r in ma.tolist()]
    return CoefficientPath(
        ar.shape[1],
        ma.shape[1],
        ar=lambda t: ar_rows[t - t0],
        ma=lambda t: ma_rows[t - t0],
        drift=lambda t: drift[t - t0],
        sigma2=lambda t: sigma2[t - t0],
        window=(t0, int(times[-1])),
        name=name,
    )


# -- JSON specification ----------------------------------------------------------

@dataclass
class PathSpec:
    """JSON-serialisable description of a deterministic coefficient path.

    ``kind`` selects the constructor; ``params`` holds its named arguments.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PATH_KINDS:
            raise ConfigError(f"unknown path kind {self.kind!r}; expected one of {PATH_KINDS}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PathSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ConfigError("path specification must be an object with a 'kind' field")
        params = {k: v for k, v in data.items() if k != "kind"}
        return cls(str(data["kind"]), params)

    @classmethod
    def from_json(cls, text: str) -> "PathSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def build(self, base_dir: str | None = None) -> CoefficientPath:
        p = dict(self.params)
        try:
            if self.kind == "constant":
                return constant_path(**p)
            if self.kind == "abrupt_breaks":
                return make_break_path(p.pop("segments"), p.pop("break_times"), **p)
            if self.kind == "periodic":
                return make_periodic_path(p.pop("coeffs"), **p)
            if self.kind == "logistic_transition":
                return make_logistic_path(**p)
            if self.kind == "exponential_transition":
                return make_exponential_path(**p)
            if self.kind == "gegenbauer":
                return make_gegenbauer_path(**p)
            from .io import read_custom_table  # custom_table

            csv_path = p.pop("csv")
            if base_dir is not None:
                import os

                csv_path = os.path.join(base_dir, csv_path)
            return read_custom_table(csv_path, **p)
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"bad parameters for {self.kind} path: {exc}") from exc


# -- stochastic generators --------------------------------------------------------

STOCHASTIC_KINDS = ("rc", "markov_bilinear", "gen_markov_bilinear", "rc_exponential", "dsar")


@dataclass(frozen=True)
class StochasticCoeffSpec:
    """Generator for random AR coefficients.

    ``rc``
        ``phi_mt = phi_m + eta_mt`` with ``eta`` of standard deviation
        ``eta_scale[m]`` drawn from ``eta_dist`` (normal, uniform or
        two_point).
    ``markov_bilinear``
        ``phi_mt = phi_m + vartheta_m eps_t``.
    ``gen_markov_bilinear``
        ``phi_mt = c_m + vartheta_m eps_t^r_m``.
    ``rc_exponential``
        ``phi_mt = c_m + (vartheta_m1 + vartheta_m2 exp(-vartheta_m3 eps_t^2)) eps_t``;
        ``vartheta`` holds one triple per lag.
    ``dsar``
        ``phi_mt = beta0_m + sum_l beta_ml phi_m,t-l + e_mt`` with
        ``e_mt ~ N(0, e_scale_m^2)`` independent of ``eps``.

    The drift is constant and ``eps_t ~ N(0, sigma_eps^2)``.
    """

    kind: str
    p: int
    phi: tuple = ()
    drift: float = 0.0
    sigma_eps: float = 1.0
    eta_scale: tuple = ()
    eta_dist: str = "normal"
    vartheta: tuple = ()
    c: tuple = ()
    r: tuple = ()
    beta0: tuple = ()
    beta: tuple = ()
    e_scale: tuple = ()
    burn_in: int = 500

    def __post_init__(self):
        if self.kind not in STOCHASTIC_KINDS:
            raise ConfigError(f"unknown stochastic kind {self.kind!r}")
        if self.p < 1:
            raise ConfigError("stochastic coefficient models need p >= 1")
        if not self.sigma_eps > 0:
            raise ConfigError("sigma_eps must be positive")

        def need(name, length, nested=False):
            value = getattr(self, name)
            if len(value) != length:
                raise ConfigError(f"{self.kind} needs {length} values in {name!r}")
            if nested:
                object.__setattr__(self, name, tuple(tuple(float(x) for x in v) for v in value))
            else:
                object.__setattr__(self, name, tuple(float(x) for x in value))

        if self.kind == "rc":
            need("phi", self.p)
            need("eta_scale", self.p)
            if self.eta_dist not in ("normal", "uniform", "two_point"):
                raise ConfigError(f"unknown eta_dist {self.eta_dist!r}")
            if min(self.eta_scale) < 0:
                raise ConfigError("eta_scale must be non-negative")
        elif self.kind == "markov_bilinear":
            need("phi", self.p)
            need("vartheta", self.p)
        elif self.kind == "gen_markov_bilinear":
            need("c", self.p)
            need("vartheta", self.p)
            if len(self.r) != self.p or any(int(x) != x or x < 1 for x in self.r):
                raise ConfigError("gen_markov_bilinear needs positive integer powers r")
            object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        elif self.kind == "rc_exponential":
            need("c", self.p)
            need("vartheta", self.p, nested=True)
            if any(len(v) != 3 for v in self.vartheta):
                raise ConfigError("rc_exponential needs a (v1, v2, v3) triple per lag")
        else:
            need("beta0", self.p)
            need("beta", self.p, nested=True)
            need("e_scale", self.p)
            if any(len(b) < 1 for b in self.beta):
                raise ConfigError("each coefficient law needs order >= 1")
            if min(self.e_scale) <= 0:
                raise ConfigError("e_scale must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StochasticCoeffSpec":
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"bad stochastic specification: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def coefficient_means(self) -> np.ndarray:
        """Stationary means ``E(phi_mt)`` where they exist in closed form."""
        if self.kind in ("rc", "markov_bilinear"):
            return np.array(self.phi)
        if self.kind == "rc_exponential":
            # eps is symmetric, so the odd-function part has mean zero
            return np.array(self.c)
        if self.kind == "gen_markov_bilinear":
            moments = [_normal_moment(r, self.sigma_eps) for r in self.r]
            return np.array(self.c) + np.array(self.vartheta) * np.array(moments)
        sums = np.array([sum(b) for b in self.beta])
        return np.array(self.beta0) / (1.0 - sums)


def _normal_moment(r: int, sigma: float) -> float:
    if r % 2:
        return 0.0
    return sigma**r * math.prod(range(r - 1, 0, -2))


def draw_eta(spec: StochasticCoeffSpec, rng: np.random.Generator, shape) -> np.ndarray:
    """Coefficient noise for the ``rc`` kind, shape ``shape + (p,)``."""
    scale = np.asarray(spec.eta_scale)
    size = tuple(np.atleast_1d(shape)) + (spec.p,)
    if spec.eta_dist == "normal":
        z = rng.standard_normal(size)
    elif spec.eta_dist == "uniform":
        z = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size)
    else:
        z = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return z * scale


def coefficients_from_eps(spec: StochasticCoeffSpec, eps: np.ndarray, eta=None) -> np.ndarray:
    """Memoryless generators: coefficients at one date from that date's draws."""
    eps = np.asarray(eps, dtype=float)[..., None]
    if spec.kind == "rc":
        return np.asarray(spec.phi) + eta
    if spec.kind == "markov_bilinear":
        return np.asarray(spec.phi) + np.asarray(spec.vartheta) * eps
    if spec.kind == "gen_markov_bilinear":
        return np.asarray(spec.c) + np.asarray(spec.vartheta) * eps ** np.asarray(spec.r)
    if spec.kind == "rc_exponential":
        v = np.asarray(spec.vartheta)
        return np.asarray(spec.c) + (v[:, 0] + v[:, 1] * np.exp(-v[:, 2] * eps**2)) * eps
    raise ConfigError("dsar coefficients depend on their own past; use dsar_step")


def dsar_step(spec: StochasticCoeffSpec, history: list[np.ndarray], e: np.ndarray) -> np.ndarray:
    """Next DS-AR coefficient vector(s) given ``history[-l]`` = value at lag ``l``."""
    out = np.array(spec.beta0, dtype=float) + e
    for m, law in enumerate(spec.beta):
        for l, b in enumerate(law, start=1):
            out[..., m] = out[..., m] + b * history[-l][..., m]
    return out


def dsar_order(spec: StochasticCoeffSpec) -> int:
    return max(len(b) for b in spec.beta)


def sample_stochastic_path(spec: StochasticCoeffSpec, seed, window: tuple[int, int]) -> CoefficientPath:
    """One realised coefficient path on ``window``, reproducible from ``seed``.

    The innovations that drove the coefficients are attached as
    ``path.innovations`` so that :func:`tvarma.process.simulate` reuses them.
    """
    t0, t1 = int(window[0]), int(window[1])
    if t1 < t0:
        raise ConfigError(f"empty window {window}")
    n = t1 - t0 + 1
    rng = make_rng(seed)
    eps = spec.sigma_eps * rng.standard_normal(n)
    if spec.kind == "dsar":
        order = dsar_order(spec)
        state = [spec.coefficient_means() for _ in range(order)]
        scales = np.asarray(spec.e_scale)
        for _ in range(spec.burn_in):
            state.append(dsar_step(spec, state, scales * rng.standard_normal(spec.p)))
            state = state[-order:]
        rows = []
        for _ in range(n):
            state.append(dsar_step(spec, state, scales * rng.standard_normal(spec.p)))
            state = state[-order:]
            rows.append(state[-1])
        ar = np.array(rows)
    else:
        eta = draw_eta(spec, rng, n) if spec.kind == "rc" else None
        ar = coefficients_from_eps(spec, eps, eta)
    times = np.arange(t0, t1 + 1)
    path = table_path(
        times,
        ar=ar,
        drift=np.full(n, spec.drift),
        sigma2=np.full(n, spec.sigma_eps**2),
        name=f"stochastic:{spec.kind}",
    )
    path.innovations = (t0, eps)
    return path
