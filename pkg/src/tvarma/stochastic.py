"""Moments of random-coefficient autoregressions.

Closed forms for the generalised random-coefficient AR (GRC-AR) model, in
which ``(phi_0t, ..., phi_pt, eps_t)`` are i.i.d. over time with given
means and covariances; Monte Carlo moments and predictors for the
double-stochastic AR (DS-AR) model, in which each coefficient follows its
own AR law; and empirical stability diagnostics for random-coefficient AR.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .coefficients import (
    StochasticCoeffSpec,
    coefficients_from_eps,
    draw_eta,
    dsar_order,
    dsar_step,
)
from .errors import ConditionViolated, ConfigError, DataError
from .forecast import ForecastReport
from .green import green_column
from .moments import _jsonable
from .rng import make_rng


# -- GRC-AR closed forms ---------------------------------------------------------

@dataclass(frozen=True)
class GrcMomentInputs:
    """First and second moments of the random coefficients.

    Parameters
    ----------
    means : sequence of float
        ``E(phi_mt)`` for ``m = 0..p`` (index 0 is the drift).
    cov : (p+1, p+1) array
        ``sigma_mn = Cov(phi_mt, phi_nt)``.
    cross : sequence of float
        ``sigma_m,eps = E(phi_mt eps_t)`` for ``m = 0..p``.
    sigma_eps2 : float
        ``Var(eps_t)``.
    """

    means: tuple
    cov: tuple
    cross: tuple
    sigma_eps2: float

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        n = len(means)
        if n < 2:
            raise ConfigError("need a drift and at least one AR coefficient")
        cov = np.asarray(self.cov, dtype=float)
        cross = np.asarray(self.cross, dtype=float)
        if cov.shape != (n, n) or not np.allclose(cov, cov.T):
            raise ConfigError("cov must be a symmetric (p+1, p+1) matrix")
        if np.linalg.eigvalsh(cov).min() < -1e-12:
            raise ConfigError("coefficient covariance is not positive semidefinite")
        if cross.shape != (n,):
            raise ConfigError("cross must have p+1 entries")
        if not self.sigma_eps2 > 0:
            raise ConfigError("sigma_eps2 must be positive")
        object.__setattr__(self, "means", tuple(means))
        object.__setattr__(self, "cov", tuple(map(tuple, cov)))
        object.__setattr__(self, "cross", tuple(cross))

    @property
    def p(self) -> int:
        return len(self.means) - 1

    @property
    def ar_means(self) -> np.ndarray:
        return np.asarray(self.means[1:])

    @property
    def cov_matrix(self) -> np.ndarray:
        return np.asarray(self.cov)

    def joint_covariance(self) -> np.ndarray:
        """Covariance of ``(phi_0t, ..., phi_pt, eps_t)``."""
        n = self.p + 1
        out = np.zeros((n + 1, n + 1))
        out[:n, :n] = self.cov_matrix
        out[:n, n] = out[n, :n] = self.cross
        out[n, n] = self.sigma_eps2
        return out

    @classmethod
    def degenerate(cls, drift: float, ar: Sequence[float], sigma_eps2: float) -> "GrcMomentInputs":
        n = len(ar) + 1
        return cls((drift, *ar), np.zeros((n, n)), np.zeros(n), sigma_eps2)

    @classmethod
    def from_spec(cls, spec: StochasticCoeffSpec) -> "GrcMomentInputs":
        """Moments implied by an ``rc`` or ``markov_bilinear`` generator."""
        n = spec.p + 1
        s2 = spec.sigma_eps**2
        cov = np.zeros((n, n))
        cross = np.zeros(n)
        if spec.kind == "rc":
            cov[1:, 1:] = np.diag(np.square(spec.eta_scale))
        elif spec.kind == "markov_bilinear":
            v = np.asarray(spec.vartheta)
            cov[1:, 1:] = np.outer(v, v) * s2
            cross[1:] = v * s2
        else:
            raise ConfigError(f"no closed-form moments for kind {spec.kind!r}")
        return cls((spec.drift, *spec.phi), cov, cross, s2)


def grc_mean(inputs: GrcMomentInputs) -> float:
    """``E(y) = phi_0 / (1 - sum_m phi_m)``, requiring ``|sum_m phi_m| < 1``."""
    total = float(np.sum(inputs.ar_means))
    if not abs(total) < 1:
        raise ConditionViolated(f"|sum of mean AR coefficients| = {abs(total):.6g} is not below 1")
    return inputs.means[0] / (1.0 - total)


def grc_sigma2(inputs: GrcMomentInputs, y: float | None = None) -> float:
    """Variance of the composite innovation ``v_t`` around the mean ``y``.

    ``(s_ee + s_00 + 2 s_0e) + 2 y sum_m (s_me + s_m0) + y^2 sum_mn s_mn``
    with sums over ``m, n = 1..p``.
    """
    if y is None:
        y = grc_mean(inputs)
    cov = inputs.cov_matrix
    cross = np.asarray(inputs.cross)
    const = inputs.sigma_eps2 + cov[0, 0] + 2.0 * cross[0]
    linear = 2.0 * y * float(np.sum(cross[1:] + cov[1:, 0]))
    quad = y * y * float(np.sum(cov[1:, 1:]))
    return float(const + linear + quad)


def expected_kron(inputs: GrcMomentInputs) -> np.ndarray:
    """``E(Phi_t kron Phi_t)`` for the random companion matrix ``Phi_t``.

    Only the first row of ``Phi_t`` is random, so the expectation equals
    ``E(Phi) kron E(Phi)`` except in the block pairing the first row with
    itself, where ``E(phi_i phi_k) = sigma_ik + phi_i phi_k``.
    """
    p = inputs.p
    mean = np.zeros((p, p))
    mean[0] = inputs.ar_means
    if p > 1:
        mean[1:, :-1] = np.eye(p - 1)
    out = np.kron(mean, mean)
    out[0, :] += inputs.cov_matrix[1:, 1:].reshape(-1)
    return out


def spectral_radius(mat: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


def grc_autocov(inputs: GrcMomentInputs, lag_max: int) -> np.ndarray:
    """Autocovariances ``gamma(0..lag_max)`` of a GRC-AR(p) process.

    For ``lag < p``: ``gamma(lag) = M[lag, 0] sigma2`` with
    ``M = (I - E(Phi kron Phi))^(-1)``; beyond, the recursion in the mean
    coefficients ``gamma(lag) = sum_m xi^(m)_lag gamma(m - 1)``.
    """
    p = inputs.p
    ybar = grc_mean(inputs)
    kron = expected_kron(inputs)
    radius = spectral_radius(kron)
    if not radius < 1:
        raise ConditionViolated(f"spectral radius of E(Phi kron Phi) is {radius:.6g}, not below 1")
    M = np.linalg.inv(np.eye(p * p) - kron)
    s2 = grc_sigma2(inputs, ybar)
    gamma = np.zeros(lag_max + 1)
    head = M[:p, 0] * s2
    gamma[: min(p, lag_max + 1)] = head[: lag_max + 1]
    ar = inputs.ar_means
    for lag in range(p, lag_max + 1):
        gamma[lag] = sum(_const_xi_m(ar, m, lag) * head[m - 1] for m in range(1, p + 1))
    return gamma


def _const_xi_m(ar: np.ndarray, m: int, k: int) -> float:
    """``xi^(m)`` at horizon ``k`` for constant coefficients ``ar``."""
    p = len(ar)
    col = _const_column(tuple(ar), k)
    return float(sum(ar[m - 2 + r] * col[k - r] for r in range(1, p + 2 - m) if r <= k))


def _const_column(ar: tuple, k: int) -> np.ndarray:
    from .path import CoefficientPath

    return green_column(CoefficientPath(len(ar), ar=ar), 0, k)


def grc2_condition(inputs: GrcMomentInputs) -> bool:
    """``1 - 2 b12 phi1 / (1 - phi2) > b11 + b22 > 0`` with ``b`` second moments."""
    if inputs.p != 2:
        raise ConfigError("the condition is stated for p = 2")
    b = _second_moments(inputs)
    phi1, phi2 = inputs.ar_means
    lhs = 1.0 - 2.0 * b[0, 1] * phi1 / (1.0 - phi2)
    mid = b[0, 0] + b[1, 1]
    return bool(lhs > mid > 0)


def _second_moments(inputs: GrcMomentInputs) -> np.ndarray:
    ar = inputs.ar_means
    return inputs.cov_matrix[1:, 1:] + np.outer(ar, ar)


def grc2_closed_form(inputs: GrcMomentInputs) -> dict:
    """Closed-form ``M[0, 0]`` and ``M[1, 0]`` for p = 2 and the implied moments."""
    if inputs.p != 2:
        raise ConfigError("the closed form is stated for p = 2")
    b = _second_moments(inputs)
    phi1, phi2 = inputs.ar_means
    denom = (1.0 - phi2**2) * (1.0 - b[0, 0] - b[1, 1]) - 2.0 * b[0, 1] * phi1 * (1.0 + phi2)
    phi11 = (1.0 - phi2**2) / denom
    phi21 = phi1 * (1.0 + phi2) / denom
    s2 = grc_sigma2(inputs)
    return {
        "phi11": phi11,
        "phi21": phi21,
        "gamma0": phi11 * s2,
        "gamma1": phi21 * s2,
        "condition": grc2_condition(inputs),
    }


def simulate_grc(inputs: GrcMomentInputs, n: int, lags: int, seed=None, burn_in: int = 200):
    """Draw ``n`` independent chains; return ``y`` at the last ``lags + 1`` dates.

    Coefficients and innovations are jointly Gaussian with the given
    moments. Column ``j`` of the result holds ``y_{T-j}``.
    """
    rng = make_rng(seed)
    p = inputs.p
    cov = inputs.joint_covariance()
    vals, vecs = np.linalg.eigh(cov)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    mean = np.r_[inputs.means, 0.0]
    hist = [np.zeros(n) for _ in range(p)]
    keep = []
    total = burn_in + lags + 1
    for step in range(total):
        draw = mean + rng.standard_normal((n, p + 2)) @ root.T
        y = draw[:, 0] + draw[:, -1]
        for m in range(1, p + 1):
            y = y + draw[:, m] * hist[-m]
        hist = hist[1:] + [y]
        if step >= burn_in:
            keep.append(y)
    return np.column_stack(keep[::-1])


# -- DS-AR Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class DsarSpec:
    """Double-stochastic AR(p): ``y_t = drift + sum_m phi_mt y_{t-m} + eps_t``.

    ``phi_mt = beta0[m] + sum_l beta[m][l-1] phi_m,t-l + e_mt`` with
    ``e_mt ~ N(0, e_scale[m]^2)`` independent of ``eps_t ~ N(0, sigma_eps^2)``.
    """

    drift: float
    beta0: tuple
    beta: tuple
    e_scale: tuple
    sigma_eps: float = 1.0
    burn_in: int = 500

    def generator(self) -> StochasticCoeffSpec:
        return StochasticCoeffSpec(
            kind="dsar",
            p=len(self.beta0),
            drift=self.drift,
            sigma_eps=self.sigma_eps,
            beta0=tuple(self.beta0),
            beta=tuple(tuple(b) for b in self.beta),
            e_scale=tuple(self.e_scale),
            burn_in=self.burn_in,
        )

    @property
    def p(self) -> int:
        return len(self.beta0)


def _dsar_paths(gen: StochasticCoeffSpec, rng, n: int, steps: int, state=None, antithetic=True):
    """Coefficient paths of shape ``(steps, n, p)`` continuing from ``state``.

    ``state`` lists arrays of shape ``(n, p)``, oldest first. Without it the
    chains start at the stationary means and run the burn-in first.
    Antithetic pairs halve the variance of linear functionals and make the
    one-step conditional mean exact.
    """
    order = dsar_order(gen)
    scales = np.asarray(gen.e_scale)
    burn = 0
    if state is None:
        state = [np.tile(gen.coefficient_means(), (n, 1)) for _ in range(order)]
        burn = gen.burn_in
    half = (n + 1) // 2
    out = np.empty((steps, n, gen.p))
    for step in range(burn + steps):
        z = rng.standard_normal((half, gen.p))
        e = np.concatenate([z, -z])[:n] if antithetic else rng.standard_normal((n, gen.p))
        nxt = dsar_step(gen, state, e * scales)
        state = state[1:] + [nxt]
        if step >= burn:
            out[step - burn] = nxt
    return out


def _rows(phis: np.ndarray, depth: int) -> np.ndarray:
    """``xi(t, t-j)`` per replication from coefficients ``phis[i]`` at ``t - L + 1 + i``."""
    L, n, p = phis.shape
    g = np.zeros((depth + 1, n))
    g[0] = 1.0
    for j in range(1, depth + 1):
        acc = np.zeros(n)
        for m in range(1, min(p, j) + 1):
            acc += phis[L - 1 - j + m, :, m - 1] * g[j - m]
        g[j] = acc
    return g


@dataclass
class DsarMoments:
    """Monte Carlo moments of a DS-AR process at one date.

    ``variance`` accounts for covariances between the drift weights at
    different lags; ``variance_diag`` keeps only their variances.
    """

    mean: float
    mean_se: float
    variance: float
    variance_se: float
    variance_diag: float
    abs_xi: np.ndarray
    xi_sq: np.ndarray
    xi_var: np.ndarray
    partial_xi_sq: np.ndarray
    diverging: bool
    n: int

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("abs_xi", "xi_sq", "xi_var", "partial_xi_sq"):
            out[key] = np.asarray(out[key]).tolist()
        return _jsonable(out)


def dsar_moments_mc(spec: DsarSpec, t: int = 0, n: int = 10_000, seed=None, depth: int = 200,
                    tail_tol: float = 1e-8) -> DsarMoments:
    """``E(y_t) = drift sum E xi(t, r)`` and ``Var(y_t)`` from simulated coefficient paths.

    The coefficient law is time invariant, so ``t`` only labels the date.
    """
    gen = spec.generator()
    rng = make_rng(seed)
    with np.errstate(over="ignore", invalid="ignore"):
        phis = _dsar_paths(gen, rng, n, depth + gen.p)
        g = _rows(phis, depth)
        abs_xi = np.mean(np.abs(g), axis=1)
        xi_sq = np.mean(g**2, axis=1)
        xi_var = np.var(g, axis=1)
        total = g.sum(axis=0)
        sq_total = (g**2).sum(axis=0)
    s2 = spec.sigma_eps**2
    mean = spec.drift * float(np.mean(total))
    mean_se = abs(spec.drift) * float(np.std(total)) / math.sqrt(n)
    dev = (total - total.mean()) ** 2
    variance = spec.drift**2 * float(np.mean(dev)) + s2 * float(np.mean(sq_total))
    variance_se = math.sqrt(
        (spec.drift**4 * float(np.var(dev)) + s2**2 * float(np.var(sq_total))) / n
    )
    variance_diag = spec.drift**2 * float(xi_var.sum()) + s2 * float(xi_sq.sum())
    tail = xi_sq[-10:]
    diverging = not (np.all(np.isfinite(tail)) and float(np.max(tail)) < tail_tol)
    return DsarMoments(
        mean=mean,
        mean_se=mean_se,
        variance=variance,
        variance_se=variance_se,
        variance_diag=variance_diag,
        abs_xi=abs_xi,
        xi_sq=xi_sq,
        xi_var=xi_var,
        partial_xi_sq=np.cumsum(xi_sq),
        diverging=bool(diverging),
        n=n,
    )


def dsar_predict(spec: DsarSpec, t: int, s: int, y_init, phi_history, n: int = 10_000,
                 seed=None) -> ForecastReport:
    """``E(y_t | K_s)`` by forward simulation of the coefficients from their state at ``s``.

    ``y_init`` holds ``y_s, ..., y_{s+1-p}``; ``phi_history`` has one row
    per date, most recent first (``phi_s, phi_{s-1}, ...``), covering the
    longest coefficient law.
    """
    if s >= t:
        raise ConfigError(f"need s < t, got s={s}, t={t}")
    gen = spec.generator()
    p = gen.p
    order = dsar_order(gen)
    y_init = np.asarray(y_init, dtype=float)
    hist = np.asarray(phi_history, dtype=float).reshape(-1, p)
    if len(y_init) != p or len(hist) < order:
        raise DataError(f"need {p} y values and {order} coefficient states")
    rng = make_rng(seed)
    k = t - s
    state = [np.tile(hist[order - 1 - i], (n, 1)) for i in range(order)]
    phis = _dsar_paths(gen, rng, n, k, state=state)  # dates s+1..t
    g = _rows(phis, k - 1)  # xi(t, t-j), j < k, i.e. r = t..s+1
    # xi^(m)(t, s) = sum_r phi_{m-1+r}(s+r) xi(t, s+r)
    hom = np.zeros((p, n))
    for m in range(1, p + 1):
        for r in range(1, p + 2 - m):
            if r <= k:
                hom[m - 1] += phis[r - 1, :, m - 2 + r] * g[k - r]
    s2 = spec.sigma_eps**2
    drift_sum = g.sum(axis=0)
    conditional = np.tensordot(y_init, hom, axes=(0, 0)) + spec.drift * drift_sum
    point = float(np.mean(conditional))
    innovation = s2 * float(np.mean((g**2).sum(axis=0)))
    mse = float(np.var(conditional)) + innovation
    mse_diag = (
        spec.drift**2 * float(np.var(g, axis=1).sum())
        + innovation
        + float(np.dot(np.var(hom, axis=1), y_init**2))
    )
    return ForecastReport(
        t=t,
        s=s,
        point=point,
        mse=mse,
        fe_weights=np.mean(g, axis=1)[::-1],
        sigma2=np.full(k, s2),
        diagnostics={
            "point_se": float(np.std(conditional)) / math.sqrt(n),
            "mse_diag": mse_diag,
            "expected_xi_m": np.mean(hom, axis=1).tolist(),
            "n": n,
        },
    )


# -- RC-AR stability diagnostics ------------------------------------------------

@dataclass
class RcarDiagnostics:
    """Monte Carlo evidence on the stability conditions of a random-coefficient AR.

    ``frac_xi_small`` is the share of paths with ``|xi(T, s)| < tol``;
    ``frac_c_eps_small`` the share with ``|C_{T-1,s} e_1 eps_T| < tol``;
    ``lyapunov`` the median of ``log|xi(T, s)| / (T - s)``. For p = 1,
    ``mean_log_abs_phi < 0`` signals almost-sure stability while
    ``mean_abs_phi > 1`` rules out stability in mean; the sample
    ``log_mean_abs_xi`` understates the latter because the mean is carried
    by rare paths.
    """

    s: int
    T: int
    n: int
    frac_xi_small: float
    frac_c_eps_small: float
    sup_c_eps_median: float
    sup_c_eps_q95: float
    lyapunov: float
    log_mean_abs_xi: float
    mean_abs_phi: float
    mean_log_abs_phi: float
    tol: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def rcar_stability_diag(spec: StochasticCoeffSpec, s: int, T: int, n: int = 10_000, seed=None,
                        tol: float = 1e-8) -> RcarDiagnostics:
    """Simulate companion products ``C_{t,s}`` along random coefficient paths."""
    if T <= s + 1:
        raise ConfigError("need T > s + 1")
    rng = make_rng(seed)
    p = spec.p
    steps = T - s
    sigma = spec.sigma_eps
    if spec.kind == "dsar":
        phis = _dsar_paths(spec, rng, n, steps, antithetic=False)
    with np.errstate(over="ignore", invalid="ignore"):
        # log-scaled product to survive growth: C = exp(logscale) * Cn
        Cn = np.tile(np.eye(p), (n, 1, 1))
        logscale = np.zeros(n)
        sup = np.zeros(n)
        last_c_eps = np.zeros(n)
        abs_phi = log_phi = 0.0
        for i in range(steps):
            eps = sigma * rng.standard_normal(n)
            if spec.kind == "dsar":
                coef = phis[i]
            else:
                eta = draw_eta(spec, rng, n) if spec.kind == "rc" else None
                coef = coefficients_from_eps(spec, eps, eta)
            # C_{t-1,s} e_1 eps_t uses the product before this step's matrix
            c_eps = np.linalg.norm(Cn[:, :, 0], axis=1) * np.exp(logscale) * np.abs(eps)
            sup = np.maximum(sup, np.nan_to_num(c_eps, nan=np.inf))
            last_c_eps = c_eps
            abs_phi += float(np.mean(np.abs(coef[:, 0])))
            log_phi += float(np.mean(np.log(np.abs(coef[:, 0]))))
            comp = np.zeros((n, p, p))
            comp[:, 0, :] = coef
            if p > 1:
                comp[:, 1:, :-1] = np.eye(p - 1)
            Cn = comp @ Cn
            norm = np.max(np.abs(Cn), axis=(1, 2))
            norm = np.where(norm > 0, norm, 1.0)
            Cn = Cn / norm[:, None, None]
            logscale = logscale + np.log(norm)
        log_abs_xi = np.log(np.abs(Cn[:, 0, 0])) + logscale
    finite = np.isfinite(log_abs_xi)
    log_mean = float(np.log(np.mean(np.exp(np.clip(log_abs_xi[finite], -700, 700))))) if finite.any() else -math.inf
    return RcarDiagnostics(
        s=s,
        T=T,
        n=n,
        frac_xi_small=float(np.mean(log_abs_xi < math.log(tol))),
        frac_c_eps_small=float(np.mean(last_c_eps < tol)),
        sup_c_eps_median=float(np.median(sup)),
        sup_c_eps_q95=float(np.quantile(sup, 0.95)),
        lyapunov=float(np.median(log_abs_xi) / steps),
        log_mean_abs_xi=log_mean,
        mean_abs_phi=abs_phi / steps,
        mean_log_abs_phi=log_phi / steps,
        tol=tol,
    )
