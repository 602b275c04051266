"""Command-line front end: simulate, estimate, variance, ci, bench.

Exit status: 0 success, 1 bench rows flagged for failures, 2 bad flags,
3 data or numerical errors, 4 memory parameter outside the admissible range.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import asympvar, bench
from . import estimate as est
from .core import (DataError, DegenerateInputError, DomainError, EmbeddingError, InadmissibleError,
                   InsufficientDataError, LengthError, LrdError, NonConvergenceError, ConditioningError,
                   RankError, UnsupportedError, format_series, read_series, rng_stream)
from .simulate import ModelSpec, generate
from .wavelet import parse_wavelet, pyramid

EXIT_FLAGGED, EXIT_USAGE, EXIT_DATA, EXIT_INADMISSIBLE = 1, 2, 3, 4
THREADS_ENV = "LRDEST_THREADS"


class UsageError(Exception):
    pass


def _g(v) -> str:
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.6g}"


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> tuple:
    v = _floats(text)
    if len(v) != 2 or not v[0] < v[1]:
        raise argparse.ArgumentTypeError(f"expected a,b with a < b, got {text!r}")
    return tuple(v)


def _ell(text: str):
    if text.strip().lower() in ("inf", "infinity"):
        return asympvar.INF
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ell must be a positive integer or 'inf', got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("ell must be >= 1")
    return v


def _emit(obj, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(obj))
    else:
        for line in lines:
            print(line)


# ----------------------------------------------------------------- commands

def cmd_simulate(a) -> int:
    spec = ModelSpec(kind=a.model, d=a.d, ar=tuple(a.ar), ma=tuple(a.ma), sigma2=a.sigma2,
                     lambda0=a.lambda0, H=a.H)
    x = generate(spec, a.n, rng_stream(a.seed, a.stream))
    text = format_series(x)
    if a.output:
        Path(a.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _estimate_rows(a, x) -> list:
    method = a.method.lower()
    rows = []
    if method in ("gph", "lwf"):
        ms = a.bandwidth or [max(2, int(x.size ** 0.6) // (a.pooling + a.taper if method == "gph" else 1))]
        for m in ms:
            if method == "gph":
                r = est.gph(x, m, p=a.pooling, tau=a.taper, delta=a.difforder, trim=a.trim)
            else:
                r = est.lwf(x, m, tau=a.taper, delta=a.difforder, trim=a.trim, range=a.range)
            rows.append({"m": m, "d_hat": r.d_hat, "std": r.std})
        return rows
    w = parse_wavelet(a.wavelet)
    pyr = pyramid(x, w, counts=a.counts)
    for L in a.lower:
        if method == "lrw":
            r = est.lrw(pyr, w, L=L, U=a.upper, weights=a.weights)
            row = {"L": L, "d_hat": r.d_hat, "std": r.std}
            if a.two_step:
                ro = est.lrw(pyr, w, L=L, U=a.upper, weights="optimal", pilot=r.d_hat)
                row.update(dopt=ro.d_hat, stdopt=ro.std)
        else:
            r = est.lww(pyr, w, L=L, U=a.upper, range=a.range)
            row = {"L": L, "d_hat": r.d_hat, "std": r.std}
        rows.append(row)
    return rows


def cmd_estimate(a) -> int:
    method = a.method.lower()
    if a.two_step and method != "lrw":
        raise UsageError("--two-step only applies to --method lrw")
    x = read_series(a.series).values
    rows = _estimate_rows(a, x)
    cols = list(rows[0].keys())
    _emit({"method": method.upper(), "rows": rows}, a.json,
          [" ".join(cols)] + [" ".join(str(r[c]) if c in ("m", "L") else _g(r[c]) for c in cols) for r in rows])
    return 0


def cmd_variance(a) -> int:
    if a.shannon:
        vs = asympvar.v_shannon(a.d, a.ell)
        _emit({"d": a.d, "ell": str(a.ell), "v_shannon": vs}, a.json, [f"vs {_g(vs)}"])
        return 0
    w = parse_wavelet(a.wavelet)
    rep = asympvar.variance_report(a.d, a.ell, w)
    obj = {"d": a.d, "ell": str(a.ell), "wavelet": w.name, "v": rep.v_av, "vs": rep.v_shannon,
           "vopt": None if math.isnan(rep.v_opt) else rep.v_opt, "wopt": [float(v) for v in rep.w_opt]}
    lines = [f"v {_g(rep.v_av)}", f"vs {_g(rep.v_shannon)}"]
    if a.ell != asympvar.INF:
        lines += [f"vopt {_g(rep.v_opt)}", "wopt " + " ".join(_g(float(v)) for v in rep.w_opt)]
    _emit(obj, a.json, lines)
    return 0


def cmd_ci(a) -> int:
    if len(a.d) != len(a.std):
        raise UsageError(f"--d has {len(a.d)} values but --std has {len(a.std)}")
    if not 0.0 < a.level < 1.0:
        raise UsageError("--level must lie strictly between 0 and 1")
    out = [est.confidence_interval(d, s, a.level) for d, s in zip(a.d, a.std)]
    _emit({"level": a.level, "intervals": [list(v) for v in out]}, a.json,
          [f"{_g(lo)} {_g(hi)}" for lo, hi in out])
    return 0


def cmd_bench(a) -> int:
    cfg = bench.BenchConfig()
    if a.config:
        text = Path(a.config).read_text()
        try:
            cfg = bench.BenchConfig.from_json(text)
        except (json.JSONDecodeError, TypeError) as exc:
            raise UsageError(f"bad bench config {a.config}: {exc}") from None
    if a.reps is not None:
        cfg.reps = a.reps
    if a.seed is not None:
        cfg.seed = a.seed
    if a.n:
        cfg.n = tuple(a.n)
    if a.counts:
        cfg.counts = a.counts
    cfg.workers = a.workers if a.workers is not None else int(os.environ.get(THREADS_ENV, "1") or 1)
    cfg.__post_init__()
    progress = None if a.quiet else bench.stderr_progress
    rows = bench.run_bench(cfg, progress)
    text = bench.mse_curve(cfg, rows) if a.curve else bench.rows_to_csv(rows)
    if a.output:
        Path(a.output).write_text(text)
    else:
        sys.stdout.write(text)
    flagged = [r for r in rows if r.flagged]
    for r in flagged:
        print(f"flagged: {r.model} {r.method} {r.tuning}: {r.n_failed} failed replicates", file=sys.stderr)
    return EXIT_FLAGGED if flagged else 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="lrdest", description="Memory parameter estimation for long-range dependent series.",
                                formatter_class=fmt)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="draw a synthetic series", formatter_class=fmt)
    s.add_argument("--model", default="ARFIMA", choices=["ARFIMA", "DARFIMA", "FGN", "SUBORD1", "SUBORD2"],
                   type=str.upper, help="model family")
    s.add_argument("--d", type=float, default=0.0, help="memory parameter")
    s.add_argument("--H", type=float, default=None, help="Hurst index (FGN)")
    s.add_argument("--ar", type=_floats, default=[], help="AR coefficients phi_1,..,phi_p of 1 - sum phi_k z^k")
    s.add_argument("--ma", type=_floats, default=[], help="MA coefficients theta_1,..,theta_q of 1 + sum theta_k z^k")
    s.add_argument("--sigma2", type=float, default=1.0, help="innovation variance")
    s.add_argument("--lambda0", type=float, default=None, help="DARFIMA cutoff in radians (default pi/2)")
    s.add_argument("--n", type=int, default=4096, help="series length")
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--stream", type=int, default=0, help="stream id under the seed")
    s.add_argument("--output", default=None, help="output file (default: standard output)")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate d from a series file", formatter_class=fmt)
    e.add_argument("series", help="text file, one value per line")
    e.add_argument("--method", required=True, choices=["gph", "lwf", "lrw", "lww"], type=str.lower)
    e.add_argument("--bandwidth", type=_ints, default=None,
                   help="m values, comma separated (GPH: pooled blocks, LWF: frequencies); default n^0.6 frequencies")
    e.add_argument("--pooling", type=int, default=1, help="GPH pooling order p")
    e.add_argument("--taper", type=int, default=0, help="taper order tau")
    e.add_argument("--difforder", type=int, default=0, help="differencing order delta")
    e.add_argument("--trim", type=int, default=0, help="leading blocks/frequencies to skip")
    e.add_argument("--range", type=_pair, default=None, help="a,b restricts the LWF/LWW minimization to [a, b]")
    e.add_argument("--wavelet", default="db4", help="Daubechies wavelet db1..db10")
    e.add_argument("--lower", type=_ints, default=[3], help="finest scale(s) L, comma separated")
    e.add_argument("--upper", type=int, default=None, help="coarsest scale U (default: J)")
    e.add_argument("--weights", default="av", choices=["av", "optimal"], help="LRW regression weights")
    e.add_argument("--two-step", action="store_true", help="LRW: add optimal-weight dopt/stdopt columns")
    e.add_argument("--counts", default="formula", choices=["formula", "valid"],
                   help="coefficients kept per scale")
    e.add_argument("--json", action="store_true", help="JSON output")
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("variance", help="asymptotic variance of the wavelet estimators", formatter_class=fmt)
    v.add_argument("--d", type=float, required=True, help="memory parameter")
    v.add_argument("--ell", type=_ell, required=True, help="number of scales minus one (U - L), or 'inf'")
    v.add_argument("--wavelet", default="db4", help="Daubechies wavelet db1..db10")
    v.add_argument("--shannon", action="store_true", help="only the Shannon-wavelet closed form")
    v.add_argument("--json", action="store_true", help="JSON output")
    v.set_defaults(func=cmd_variance)

    c = sub.add_parser("ci", help="normal confidence intervals", formatter_class=fmt)
    c.add_argument("--d", type=_floats, required=True, help="estimates, comma separated")
    c.add_argument("--std", type=_floats, required=True, help="standard deviations, comma separated")
    c.add_argument("--level", type=float, default=0.95, help="coverage level in (0, 1)")
    c.add_argument("--json", action="store_true", help="JSON output")
    c.set_defaults(func=cmd_ci)

    b = sub.add_parser("bench", help="Monte-Carlo benchmark (CSV)", formatter_class=fmt)
    b.add_argument("--config", default=None, help="JSON config (default: all benchmark models)")
    b.add_argument("--reps", type=int, default=None, help="replicates per model (config default 200)")
    b.add_argument("--n", type=_ints, default=None, help="sample sizes (config default 512,4096)")
    b.add_argument("--seed", type=int, default=None, help="master seed (config default 20240607)")
    b.add_argument("--workers", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")
    b.add_argument("--counts", default=None, choices=["formula", "valid"],
                   help="wavelet coefficients kept per scale (config default valid)")
    b.add_argument("--curve", action="store_true", help="write equivalent-bandwidth,rmse instead of rows")
    b.add_argument("--output", default=None, help="output CSV (default: standard output)")
    b.add_argument("--quiet", action="store_true", help="no progress on standard error")
    b.set_defaults(func=cmd_bench)
    return p


_DATA_ERRORS = (DataError, LengthError, InsufficientDataError, DegenerateInputError, EmbeddingError,
                NonConvergenceError, ConditioningError, OSError)
_USAGE_ERRORS = (UsageError, DomainError, RankError, UnsupportedError)


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        return a.func(a)
    except InadmissibleError as exc:
        msg = str(exc)
        if exc.interval and "(" not in msg:
            lo, hi = exc.interval
            msg += f" (admissible interval ({lo:.6g}, {hi:.6g}])"
        print(f"lrdest: {msg}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except _DATA_ERRORS as exc:
        print(f"lrdest: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (*_USAGE_ERRORS, LrdError) as exc:
        print(f"lrdest: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
