"""Command-line interface.

Exit codes: 0 success, 1 failed self-check, 2 configuration error,
3 numerical failure (divergent or non-invertible sums), 4 data error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .breaks import SegmentedAR, fit_segmented_ar, persistence_measures
from .coefficients import (
    PATH_KINDS,
    STOCHASTIC_KINDS,
    PathSpec,
    StochasticCoeffSpec,
    gegenbauer_coefficients,
    sample_stochastic_path,
)
from .errors import ConfigError, DataError, NumericalError, TvArmaError
from .forecast import predict_infinite
from .green import theta_green, xi, xi_m, xi_q
from .inversion import invertibility_report, recover_errors
from .moments import (
    TruncationPolicy,
    _jsonable,
    autocovariance,
    stability_report,
    unconditional_mean,
    unconditional_variance,
)
from .process import TvArmaModel, simulate
from .stochastic import (
    DsarSpec,
    GrcMomentInputs,
    dsar_moments_mc,
    expected_kron,
    grc2_closed_form,
    grc_autocov,
    grc_mean,
    grc_sigma2,
    rcar_stability_diag,
    spectral_radius,
)
from .verify import run_checks

EXIT_CODES = {ConfigError: 2, NumericalError: 3, DataError: 4}


def _exit_code(exc: TvArmaError) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 2


# -- spec loading -----------------------------------------------------------------

def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required for this command")
    return value


def load_spec(path: str):
    """Return ``(kind, object)`` for a JSON specification file.

    ``kind`` is ``"path"``, ``"stochastic"``, ``"grc"`` or ``"segmented"``.
    """
    data = io.load_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: specification must be a JSON object")
    kind = data.get("kind")
    base = os.path.dirname(os.path.abspath(path))
    if kind in PATH_KINDS:
        return "path", PathSpec.from_dict(data).build(base)
    if kind in STOCHASTIC_KINDS:
        return "stochastic", StochasticCoeffSpec.from_dict({k: v for k, v in data.items()})
    if kind == "grc":
        try:
            return "grc", GrcMomentInputs(data["means"], data["cov"], data["cross"], data["sigma_eps2"])
        except KeyError as exc:
            raise ConfigError(f"grc specification lacks {exc}") from exc
    if kind in (None, "segmented_ar") and "segments" in data:
        return "segmented", SegmentedAR.from_dict(data)
    raise ConfigError(f"{path}: unrecognised specification kind {kind!r}")


def _path_spec(args):
    kind, obj = load_spec(_require(args.spec, "--spec"))
    if kind != "path":
        raise ConfigError(f"this command needs a deterministic path specification, got {kind}")
    return obj


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(tail_tol=args.tail_tol, max_terms=args.max_terms)


def _emit(args, payload, csv_text: str | None = None, default: str = "json") -> None:
    fmt = args.format or default
    if fmt == "csv":
        if csv_text is None:
            raise ConfigError(f"{args.command} has no CSV output; use --format json")
        io.write_text(args.out, csv_text)
    else:
        io.write_text(args.out, io.dumps_json(_jsonable(payload)))


def _series(args):
    times, values, quarterly = io.read_series_csv(_require(args.input, "--input"))
    return times, values, quarterly


# -- subcommands ------------------------------------------------------------------

def cmd_green(args) -> int:
    path = _path_spec(args)
    s, K = args.s, args.horizon
    cols = ["k", "t", "s", "xi"] + [f"xi_m{m}" for m in range(1, path.p + 1)] + ["xi_q", "theta"]
    geg = getattr(path, "gegenbauer", None)
    if geg is not None:
        cols.append("gegenbauer_c")
        c = gegenbauer_coefficients(geg[0], geg[1], K)
    rows = []
    for k in range(K + 1):
        t = s + k
        row = [k, t, s, xi(path, t, s)]
        row += [xi_m(path, m, t, s) for m in range(1, path.p + 1)]
        row += [xi_q(path, t, s), theta_green(path, t, s)]
        if geg is not None:
            row.append(float(c[k]))
        rows.append(row)
    records = [dict(zip(cols, r)) for r in rows]
    _emit(args, {"rows": records}, io.dumps_csv(cols, rows), default="csv")
    return 0


def cmd_simulate(args) -> int:
    kind, obj = load_spec(_require(args.spec, "--spec"))
    window = (args.t0, args.t1)
    if kind == "stochastic":
        path = sample_stochastic_path(obj, args.seed, window)
        burn_in = 0
    elif kind == "path":
        path, burn_in = obj, args.burn_in
    else:
        raise ConfigError(f"cannot simulate a {kind} specification")
    run = simulate(TvArmaModel(path, noise=args.noise, df=args.df, window=window), seed=args.seed,
                   burn_in=burn_in)
    lo = window[0] - run.offset
    payload = {
        "t": list(range(window[0], window[1] + 1)),
        "y": run.y[lo:].tolist(),
        "eps": run.eps[lo:].tolist(),
        "seed": args.seed,
    }
    _emit(args, payload, run.to_csv(), default="csv")
    return 0


def cmd_moments(args) -> int:
    kind, obj = load_spec(_require(args.spec, "--spec"))
    policy = _policy(args)
    if kind == "path":
        report = stability_report(obj, args.t, policy=policy)
        payload = {
            "t": args.t,
            "mean": unconditional_mean(obj, args.t, policy),
            "variance": unconditional_variance(obj, args.t, policy),
            "autocovariance": [autocovariance(obj, args.t, k, policy) for k in range(args.lags + 1)],
            "stability": report.to_dict(),
        }
    elif kind == "grc":
        payload = {
            "mean": grc_mean(obj),
            "sigma2": grc_sigma2(obj),
            "spectral_radius": spectral_radius(expected_kron(obj)),
            "autocovariance": grc_autocov(obj, args.lags).tolist(),
        }
        if obj.p == 2:
            payload["closed_form"] = grc2_closed_form(obj)
    elif kind == "stochastic" and obj.kind == "dsar":
        spec = DsarSpec(obj.drift, obj.beta0, obj.beta, obj.e_scale, obj.sigma_eps, obj.burn_in)
        payload = dsar_moments_mc(spec, args.t, args.mc_n, args.seed).to_dict()
    elif kind == "stochastic":
        T = args.t if args.t > 1 else 500
        payload = rcar_stability_diag(obj, 0, T, args.mc_n, args.seed).to_dict()
    else:
        raise ConfigError(f"no moments for a {kind} specification")
    _emit(args, payload)
    return 0


def cmd_forecast(args) -> int:
    path = _path_spec(args)
    times, y, quarterly = _series(args)
    start = int(times[0])
    s = int(times[-1]) if args.s is None else args.s
    reports = []
    for h in range(1, args.horizon + 1):
        rep = predict_infinite(path, s + h, s, y, start, _policy(args))
        d = rep.to_dict()
        d["h"] = h
        if quarterly:
            d["date"] = io.format_quarter(s + h)
        reports.append(d)
    cols = ["h", "t", "point", "mse", "lo95", "hi95"]
    rows = [[d["h"], d["t"], d["point"], d["mse"], *d["interval95"]] for d in reports]
    _emit(args, {"origin": s, "forecasts": reports}, io.dumps_csv(cols, rows))
    return 0


def cmd_invert(args) -> int:
    path = _path_spec(args)
    times, y, _ = _series(args)
    start = int(times[0])
    report = invertibility_report(path, int(times[-1]), policy=_policy(args))
    rec = recover_errors(path, y, start, _policy(args))
    rows = list(zip(rec.times.tolist(), rec.eps.tolist()))
    payload = {"report": report.to_dict(), "eps": [{"t": t, "eps": e} for t, e in rows]}
    _emit(args, payload, io.dumps_csv(["t", "eps"], rows))
    return 0


def _fit(args):
    times, y, quarterly = _series(args)
    result = fit_segmented_ar(y, args.p, args.max_breaks, args.min_seg, int(times[0]), args.criterion)
    return result, quarterly


def cmd_fit_breaks(args) -> int:
    result, quarterly = _fit(args)
    payload = result.to_dict()
    if quarterly:
        payload["break_dates"] = [io.format_quarter(b) for b in result.best.break_times]
    rows = [[l, result.ssr[l], result.bic[l], " ".join(map(str, m.break_times))]
            for l, m in enumerate(result.models)]
    _emit(args, payload, io.dumps_csv(["breaks", "ssr", "bic", "break_times"], rows))
    return 0


def cmd_persistence(args) -> int:
    quarterly = args.quarterly
    if args.spec:
        kind, seg = load_spec(args.spec)
        if kind != "segmented":
            raise ConfigError("persistence needs a segmented AR specification")
    else:
        result, quarterly = _fit(args)
        seg = result.best
    report = persistence_measures(seg, dab_horizon=args.horizon)
    payload = report.to_dict()
    label = io.format_quarter if quarterly else str
    cols = ["t", "date", "var", "P", "mean"]
    rows = [[t, label(t), v, p, m] for t, v, p, m in report.trajectory]
    _emit(args, payload, io.dumps_csv(cols, rows))
    return 0


def cmd_verify(args) -> int:
    checks = run_checks(threads=args.threads)
    payload = {"passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]}
    if not args.timings:
        for c in payload["checks"]:
            c.pop("seconds")
    _emit(args, payload)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: error {c.error:.3g} (tol {c.tol:g})",
              file=sys.stderr)
    return 0 if payload["passed"] else 1


COMMANDS = {
    "green": cmd_green,
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "forecast": cmd_forecast,
    "invert": cmd_invert,
    "fit-breaks": cmd_fit_breaks,
    "persistence": cmd_persistence,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="CSV with a header row: date,value")
    common.add_argument("--spec", help="JSON specification file")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mc-n", type=int, default=10_000, help="Monte Carlo replications")
    common.add_argument("--tail-tol", type=float, default=1e-10)
    common.add_argument("--max-terms", type=int, default=100_000)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv"))

    parser = argparse.ArgumentParser(prog="tvarma", description="Time-varying ARMA toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("green", parents=[common], help="Green function grid")
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--horizon", type=int, default=10)

    p = sub.add_parser("simulate", parents=[common], help="simulate a path")
    p.add_argument("--t0", type=int, default=1)
    p.add_argument("--t1", type=int, default=200)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--noise", choices=("gaussian", "student_t"), default="gaussian")
    p.add_argument("--df", type=float, default=None)

    p = sub.add_parser("moments", parents=[common], help="unconditional moments")
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--lags", type=int, default=5)

    p = sub.add_parser("forecast", parents=[common], help="forecasts from a CSV history")
    p.add_argument("--s", type=int, default=None, help="forecast origin (default: last date)")
    p.add_argument("--horizon", type=int, default=8)

    sub.add_parser("invert", parents=[common], help="recover innovations")

    for name in ("fit-breaks", "persistence"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--p", type=int, default=2)
        p.add_argument("--max-breaks", type=int, default=2)
        p.add_argument("--min-seg", type=int, default=None)
        p.add_argument("--criterion", choices=("ssr", "gaussian"), default="ssr")
        if name == "persistence":
            p.add_argument("--horizon", type=int, default=40, help="periods after the last break")
            p.add_argument("--quarterly", action="store_true", help="label dates as YYYYQn")

    p = sub.add_parser("verify", parents=[common], help="run the oracle self-checks")
    p.add_argument("--timings", action="store_true", help="include run times (not reproducible)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.mc_n < 1:
        parser.error("--mc-n must be at least 1")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            return COMMANDS[args.command](args)
    except TvArmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
