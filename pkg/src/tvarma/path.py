"""Coefficient paths: the time-indexed parameters of a TV-ARMA model."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, LagOutOfRange, OutOfWindow

VectorFn = Callable[[int], Sequence[float]]
ScalarFn = Callable[[int], float]


def _const_vector(values: Sequence[float]) -> VectorFn:
    frozen = tuple(float(v) for v in values)
    return lambda t: frozen


def _const_scalar(value: float) -> ScalarFn:
    value = float(value)
    return lambda t: value


class CoefficientPath:
    """Drift, AR, MA and innovation-variance coefficients over integer time.

    The model is ``y_t = drift(t) + sum_m phi(m, t) y_{t-m} + u_t`` with
    ``u_t = eps_t + sum_l theta(l, t) eps_{t-l}`` and ``Var(eps_t) = sigma2(t)``.

    Parameters
    ----------
    p, q : int
        AR and MA orders.
    ar : callable or sequence, optional
        ``ar(t)`` returns the ``p`` AR coefficients at time ``t``. A plain
        sequence means constant coefficients.
    ma : callable or sequence, optional
        Same for the ``q`` MA coefficients.
    drift, sigma2 : callable or float
        Drift and innovation variance at time ``t``.
    window : (int, int), optional
        Inclusive range of times the path is defined on. Queries outside
        raise :class:`OutOfWindow`. ``None`` means all integers.
    name : str
        Free-form label used in reports.
    """

    def __init__(
        self,
        p: int,
        q: int = 0,
        ar: VectorFn | Sequence[float] | None = None,
        ma: VectorFn | Sequence[float] | None = None,
        drift: ScalarFn | float = 0.0,
        sigma2: ScalarFn | float = 1.0,
        window: tuple[int, int] | None = None,
        name: str = "",
    ):
        if int(p) != p or p < 0 or int(q) != q or q < 0:
            raise ConfigError(f"orders must be non-negative integers, got p={p}, q={q}")
        self.p = int(p)
        self.q = int(q)
        if ar is None:
            if self.p:
                raise ConfigError("AR coefficients required when p > 0")
            ar = ()
        if ma is None:
            if self.q:
                raise ConfigError("MA coefficients required when q > 0")
            ma = ()
        if not callable(ar):
            if len(ar) != self.p:
                raise ConfigError(f"expected {self.p} AR coefficients, got {len(ar)}")
            ar = _const_vector(ar)
        if not callable(ma):
            if len(ma) != self.q:
                raise ConfigError(f"expected {self.q} MA coefficients, got {len(ma)}")
            ma = _const_vector(ma)
        if not callable(drift):
            drift = _const_scalar(drift)
        if not callable(sigma2):
            if not sigma2 > 0:
                raise ConfigError("sigma2 must be positive")
            sigma2 = _const_scalar(sigma2)
        self._ar = ar
        self._ma = ma
        self._drift = drift
        self._sigma2 = sigma2
        if window is not None:
            lo, hi = int(window[0]), int(window[1])
            if hi < lo:
                raise ConfigError(f"empty window {window}")
            window = (lo, hi)
        self.window = window
        self.name = name
        # Optional innovations tied to the path (stochastic generators whose
        # coefficients depend on eps_t). Stored as (start_time, array).
        self.innovations: tuple[int, np.ndarray] | None = None

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<CoefficientPath{label} p={self.p} q={self.q} window={self.window}>"

    def _check(self, t: int) -> None:
        if self.window is not None and not self.window[0] <= t <= self.window[1]:
            raise OutOfWindow(f"time {t} outside path window {self.window}")

    def ar_at(self, t: int) -> tuple[float, ...]:
        """All AR coefficients at time ``t`` as a tuple of length ``p``."""
        self._check(t)
        return tuple(self._ar(t)) if self.p else ()

    def ma_at(self, t: int) -> tuple[float, ...]:
        self._check(t)
        return tuple(self._ma(t)) if self.q else ()

    def phi(self, m: int, t: int) -> float:
        if not 1 <= m <= self.p:
            raise LagOutOfRange(f"AR lag {m} outside 1..{self.p}")
        return float(self.ar_at(t)[m - 1])

    def theta(self, l: int, t: int) -> float:
        if not 1 <= l <= self.q:
            raise LagOutOfRange(f"MA lag {l} outside 1..{self.q}")
        return float(self.ma_at(t)[l - 1])

    def drift(self, t: int) -> float:
        self._check(t)
        return float(self._drift(t))

    def sigma2(self, t: int) -> float:
        self._check(t)
        value = float(self._sigma2(t))
        if not value > 0:
            raise ConfigError(f"sigma2({t}) = {value} is not positive")
        return value

    def mirrored(self) -> "CoefficientPath":
        """AR-only path whose coefficients are the negated MA coefficients.

        Its Green function is the MA-side Green function of ``self``.
        """
        ma = self._ma
        q = self.q
        check = self._check

        def ar(t: int) -> tuple[float, ...]:
            check(t)
            return tuple(-float(c) for c in ma(t)) if q else ()

        return CoefficientPath(q, 0, ar=ar, window=self.window, name=f"mirror({self.name})")

    def ar_block(self, t0: int, t1: int) -> np.ndarray:
        """AR coefficients for times ``t0..t1`` as an array of shape ``(n, p)``."""
        return np.array([self.ar_at(t) for t in range(t0, t1 + 1)], dtype=float).reshape(-1, self.p)

    def ma_block(self, t0: int, t1: int) -> np.ndarray:
        return np.array([self.ma_at(t) for t in range(t0, t1 + 1)], dtype=float).reshape(-1, self.q)

    def drift_block(self, t0: int, t1: int) -> np.ndarray:
        return np.array([self.drift(t) for t in range(t0, t1 + 1)], dtype=float)

    def sigma2_block(self, t0: int, t1: int) -> np.ndarray:
        return np.array([self.sigma2(t) for t in range(t0, t1 + 1)], dtype=float)


def as_path(obj) -> CoefficientPath:
    """Accept a path or anything carrying one in a ``path`` attribute."""
    if isinstance(obj, CoefficientPath):
        return obj
    path = getattr(obj, "path", None)
    if isinstance(path, CoefficientPath):
        return path
    raise TypeError(f"expected a CoefficientPath or model, got {type(obj).__name__}")
