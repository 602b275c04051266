"""Monte-Carlo comparison of the four estimators over models and tuning grids."""
from __future__ import annotations

import io
import json
import math
import os
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import estimate as est
from .core import DomainError, LrdError, rng_stream
from .simulate import ModelSpec, generate
from .wavelet import daubechies, n_available, pyramid, valid_counts

METHODS = ("GPH", "LWF", "LRW", "LWW")
CSV_HEADER = "model,method,tuning,bias,std,rmse,optimal"
FAIL_LIMIT = 0.01

# Fourier bandwidth grids around the optima reported for the two benchmark lengths.
_DEFAULT_GRIDS = {
    "GPH": {512: [5, 8, 12, 17, 26], 4096: [26, 37, 54, 110, 224]},
    "LWF": {512: [45, 72, 108, 153, 234], 4096: [234, 486, 990, 2016]},
}


@dataclass(frozen=True)
class EstimatorGrid:
    """One estimator with its tuning grid (m for Fourier methods, L for wavelet ones).

    An empty grid means "use the default": the bandwidth list above for
    GPH/LWF (or m = n^0.6 for other n) and every L = 1..J-1 for LRW/LWW.
    """
    method: str
    grid: tuple = ()
    p: int = 4
    tau: int = 5
    delta: int = 4
    wavelet: str = "db4"

    def __post_init__(self):
        object.__setattr__(self, "method", self.method.upper())
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        object.__setattr__(self, "grid", tuple(int(v) for v in self.grid))

    def resolve(self, n: int, J: int) -> tuple:
        if self.grid:
            return self.grid
        if self.method in ("LRW", "LWW"):
            return tuple(range(1, J))
        if n in _DEFAULT_GRIDS[self.method]:
            return tuple(_DEFAULT_GRIDS[self.method][n])
        return (max(2, int(round(n ** 0.6 / (self.p + self.tau if self.method == "GPH" else 1)))),)

    def to_dict(self) -> dict:
        return {"method": self.method, "grid": list(self.grid), "p": self.p, "tau": self.tau,
                "delta": self.delta, "wavelet": self.wavelet}


def default_models() -> list:
    """Model list of the benchmark tables; the AR coefficient is -0.8 in the 1 - sum phi z^k convention."""
    out = []
    for d in (-1.2, 0.0, 0.3, 1.5, 2.5, 3.5):
        out += [ModelSpec("ARFIMA", d), ModelSpec("ARFIMA", d, ar=(-0.8,))]
    for kind in ("DARFIMA", "SUBORD1", "SUBORD2"):
        for d in (0.0, 0.3):
            out += [ModelSpec(kind, d), ModelSpec(kind, d, ar=(-0.8,))]
    return out


def default_estimators() -> list:
    return [EstimatorGrid(m) for m in METHODS]


@dataclass
class BenchConfig:
    models: list = field(default_factory=default_models)
    n: tuple = (512, 4096)
    reps: int = 200
    estimators: list = field(default_factory=default_estimators)
    seed: int = 20240607
    workers: int = 1
    counts: str = "valid"

    def __post_init__(self):
        self.n = tuple(int(v) for v in (self.n if isinstance(self.n, (list, tuple)) else [self.n]))
        if self.reps < 2:
            raise DomainError("reps must be >= 2")
        if not self.models or not self.estimators:
            raise DomainError("models and estimators must be non-empty")
        labels = [self.label(m, n) for m in self.models for n in self.n]
        if len(set(labels)) != len(labels):
            raise DomainError("model labels must be unique")

    def label(self, model: ModelSpec, n: int) -> str:
        return model.label if len(self.n) == 1 else f"{model.label}@{n}"

    def to_dict(self) -> dict:
        return {"models": [m.to_dict() for m in self.models], "n": list(self.n), "reps": self.reps,
                "estimators": [e.to_dict() for e in self.estimators], "seed": self.seed,
                "workers": self.workers, "counts": self.counts}

    @classmethod
    def from_dict(cls, obj: dict) -> "BenchConfig":
        obj = dict(obj)
        known = {"models", "n", "reps", "estimators", "seed", "workers", "counts"}
        bad = set(obj) - known
        if bad:
            raise DomainError(f"unknown config fields {sorted(bad)}")
        if "models" in obj:
            obj["models"] = [ModelSpec.from_dict(m) for m in obj["models"]]
        if "estimators" in obj:
            obj["estimators"] = [EstimatorGrid(**{**e, "grid": tuple(e.get("grid", ()))})
                                 for e in obj["estimators"]]
        return cls(**obj)

    @classmethod
    def from_json(cls, text: str) -> "BenchConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class BenchRow:
    model: str
    method: str
    tuning: int
    bias: float
    std: float
    rmse: float
    optimal: bool
    n_ok: int = 0
    n_failed: int = 0

    @property
    def flagged(self) -> bool:
        total = self.n_ok + self.n_failed
        return total > 0 and self.n_failed / total > FAIL_LIMIT

    def csv_line(self) -> str:
        return (f"{self.model},{self.method},{self.tuning},{self.bias:.6g},{self.std:.6g},"
                f"{self.rmse:.6g},{int(self.optimal)}")


# ------------------------------------------------------------------- worker

def _stream_id(label: str, rep: int, redraw: int) -> int:
    return (zlib.crc32(label.encode()) << 32) | (rep << 1) | redraw


def _columns(cfg: BenchConfig, n: int) -> list:
    """(method, tuning, estimator) triples evaluated on every replicate of length n."""
    cols = []
    for e in cfg.estimators:
        J = _max_scale(n, daubechies(int(e.wavelet[2:])).T, cfg.counts) if e.method in ("LRW", "LWW") else 0
        for t in e.resolve(n, J):
            cols.append((e.method, t, e))
    return cols


def _max_scale(n: int, T: int, counts: str) -> int:
    if counts == "valid":
        return len(valid_counts(n, T))
    j = 0
    while n_available(n, T, j + 1) >= 1:
        j += 1
    return j


def _estimate_all(x: np.ndarray, cols: list, counts: str) -> np.ndarray:
    out = np.full(len(cols), np.nan)
    pyrs = {}
    for i, (method, t, e) in enumerate(cols):
        try:
            if method == "GPH":
                out[i] = est.gph(x, t, p=e.p, tau=e.tau, delta=e.delta).d_hat
            elif method == "LWF":
                out[i] = est.lwf(x, t, tau=e.tau, delta=e.delta).d_hat
            else:
                if e.wavelet not in pyrs:
                    w = daubechies(int(e.wavelet[2:]))
                    pyrs[e.wavelet] = pyramid(x, w, counts=counts)
                fn = est.lrw if method == "LRW" else est.lww
                out[i] = fn(pyrs[e.wavelet], pyrs[e.wavelet].wavelet, L=t, with_std=False).d_hat
        except (LrdError, FloatingPointError, ValueError):
            out[i] = np.nan
    return out


def _run_chunk(args) -> tuple:
    cfg_dict, model_dict, n, label, reps = args
    cfg = BenchConfig.from_dict(cfg_dict)
    model = ModelSpec.from_dict(model_dict)
    cols = _columns(cfg, n)
    vals = np.full((len(reps), len(cols)), np.nan)
    failed = np.zeros(len(cols), dtype=np.int64)
    for r_i, rep in enumerate(reps):
        try:
            x = generate(model, n, rng_stream(cfg.seed, _stream_id(label, rep, 0)))
            row = _estimate_all(x, cols, cfg.counts)
        except LrdError:
            row = np.full(len(cols), np.nan)
        bad = np.isnan(row)
        if bad.any():  # one redraw with a fresh stream
            try:
                x2 = generate(model, n, rng_stream(cfg.seed, _stream_id(label, rep, 1)))
                sub = [c for c, b in zip(cols, bad) if b]
                row[bad] = _estimate_all(x2, sub, cfg.counts)
            except LrdError:
                pass
        failed += np.isnan(row)
        vals[r_i] = row
    return vals, failed


def _threads(workers: Optional[int]) -> int:
    if workers:
        return max(1, int(workers))
    return max(1, int(os.environ.get("LRDEST_THREADS", "1")))


def simulate_estimates(cfg: BenchConfig, progress: Optional[Callable[[str], None]] = None) -> dict:
    """Raw estimates: {(label, d): (cols, values[reps, cols], failures[cols])}."""
    workers = _threads(cfg.workers)
    cfg_dict = cfg.to_dict()
    jobs = []
    for model in cfg.models:
        for n in cfg.n:
            label = cfg.label(model, n)
            nchunk = max(1, min(cfg.reps, 4 * workers))
            bounds = np.linspace(0, cfg.reps, nchunk + 1).astype(int)
            for a, b in zip(bounds[:-1], bounds[1:]):
                if b > a:
                    jobs.append((label, model, n, (cfg_dict, model.to_dict(), n, label, list(range(a, b)))))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, [j[3] for j in jobs]))
    else:
        results = []
        for j in jobs:
            results.append(_run_chunk(j[3]))
    out = {}
    for (label, model, n, _), (vals, failed) in zip(jobs, results):
        if label in out:
            prev = out[label]
            out[label] = (prev[0], np.vstack([prev[1], vals]), prev[2] + failed, model, n)
        else:
            out[label] = (_columns(cfg, n), vals, failed, model, n)
            if progress:
                progress(f"{label}: started")
    if progress:
        progress("done")
    return out


def summarize(values: np.ndarray, d: float) -> tuple:
    """Population bias, std and rmse of the finite entries."""
    v = values[np.isfinite(values)]
    if v.size == 0:
        return math.nan, math.nan, math.nan
    bias = float(v.mean() - d)
    std = float(v.std())
    return bias, std, math.sqrt(bias * bias + std * std)


def rows_from_estimates(raw: dict) -> list:
    rows = []
    for label, (cols, vals, failed, model, n) in raw.items():
        by_method: dict = {}
        for i, (method, t, _) in enumerate(cols):
            bias, std, rmse = summarize(vals[:, i], model.d)
            ok = int(np.isfinite(vals[:, i]).sum())
            by_method.setdefault(method, []).append([label, method, t, bias, std, rmse, False, ok, int(failed[i])])
        for method, lst in by_method.items():
            finite = [r for r in lst if np.isfinite(r[5])]
            if finite:
                min(finite, key=lambda r: r[5])[6] = True
            rows += [BenchRow(*r) for r in lst]
    return rows


def run_bench(cfg: BenchConfig, progress: Optional[Callable[[str], None]] = None) -> list:
    return rows_from_estimates(simulate_estimates(cfg, progress))


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(r.csv_line() + "\n")
    return buf.getvalue()


def bootstrap_se(values: np.ndarray, d: float, B: int = 1000, seed: int = 0) -> dict:
    """Replicate-bootstrap standard errors of the bias and std summaries."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, v.size, size=(B, v.size))
    s = v[idx]
    return {"bias": float(s.mean(axis=1).std(ddof=1)), "std": float(s.std(axis=1).std(ddof=1))}


def equivalent_bandwidth(method: str, tuning: int, n: int, e: EstimatorGrid, counts: str = "formula",
                         U: Optional[int] = None) -> float:
    method = method.upper()
    if method == "LWF":
        return float(tuning)
    if method == "GPH":
        return float(tuning * (e.p + e.tau))
    T = daubechies(int(e.wavelet[2:])).T
    if counts == "valid":
        c = [0] + valid_counts(n, T)
        U = len(c) - 1 if U is None else U
        return 0.5 * sum(c[tuning:U + 1])
    U = _max_scale(n, T, "formula") if U is None else U
    return 0.5 * sum(max(n_available(n, T, j), 0) for j in range(tuning, U + 1))


def mse_curve(cfg: BenchConfig, rows: Optional[list] = None) -> str:
    """CSV of (equivalent bandwidth, rmse) for a config with one model, one n and one method."""
    if len(cfg.models) != 1 or len(cfg.estimators) != 1 or len(cfg.n) != 1:
        raise DomainError("mse_curve needs exactly one model, one n and one estimator")
    rows = run_bench(cfg) if rows is None else rows
    e = cfg.estimators[0]
    n = cfg.n[0]
    buf = io.StringIO()
    buf.write("equivalent_bandwidth,rmse\n")
    for r in rows:
        buf.write(f"{equivalent_bandwidth(r.method, r.tuning, n, e, cfg.counts):.6g},{r.rmse:.6g}\n")
    return buf.getvalue()


def stderr_progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)
