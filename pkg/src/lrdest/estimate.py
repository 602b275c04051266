"""GPH, LWF, LRW and LWW estimators of the memory parameter d."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize, stats
from scipy.special import logsumexp

from . import asympvar
from .asympvar import INF, LOG2, av_weights, design
from .core import (ArrayLike, DegenerateInputError, DomainError, InadmissibleError, InsufficientDataError,
                   NonConvergenceError, RankError, as_array, difference)
from .fourier import n_blocks, n_freq, pool, tapered_periodogram
from .wavelet import WaveletPyramid, WaveletSpec, daubechies, pyramid

__all__ = ["EstimateResult", "gph", "lwf", "lrw", "lww", "av_weights", "optimal_weights",
           "confidence_interval", "argmin_convex"]


@dataclass
class EstimateResult:
    method: str
    d_hat: float
    std: float
    tuning: dict
    intercept: Optional[float] = None
    weights: Optional[np.ndarray] = None
    std_asymptotic: Optional[float] = None
    boundary: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"method": self.method, "d_hat": self.d_hat, "std": self.std, "tuning": self.tuning}
        if self.intercept is not None:
            out["intercept"] = self.intercept
        if self.weights is not None:
            out["weights"] = [float(v) for v in self.weights]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ------------------------------------------------------------ minimization

def argmin_convex(f, pilot: float = 0.0, bounds: Optional[tuple] = None, tol: float = 1e-8,
                  maxiter: int = 200, grad=None) -> tuple[float, bool]:
    """Minimize a convex function of one variable.

    Brackets by doubling steps away from ``pilot`` and refines with Brent's
    method.  Function values alone pin the minimizer down to about
    sqrt(machine eps), so when a derivative ``grad`` is supplied (or ``f``
    carries one as ``f.grad``) its root is polished to full precision.  With
    ``bounds`` the result is the projection of the free minimizer onto the
    interval (exact for convex f); the flag tells whether the returned point
    sits on a bound.
    """
    grad = grad if grad is not None else getattr(f, "grad", None)
    x0 = float(pilot)
    if bounds is not None:
        lo, hi = bounds
        if not lo < hi:
            raise DomainError(f"empty range {bounds}")
        x0 = min(max(x0, lo), hi)
    f0 = f(x0)
    if not np.isfinite(f0):
        raise DegenerateInputError("contrast is not finite at the starting point")
    step = 0.5
    evals = 1
    right = f(x0 + step)
    left = f(x0 - step)
    evals += 2
    if right >= f0 and left >= f0:
        a, b, c = x0 - step, x0, x0 + step
    else:
        sgn = 1.0 if right < left else -1.0
        b, fb = x0 + sgn * step, min(right, left)
        a = x0
        while True:
            step *= 2.0
            c = b + sgn * step
            fc = f(c)
            evals += 1
            if fc >= fb:
                break
            a, b, fb = b, c, fc
            if evals > maxiter or abs(c) > 1e6:
                if bounds is not None:
                    return (bounds[1] if sgn > 0 else bounds[0]), True
                raise NonConvergenceError("contrast has no finite minimizer")
        if sgn < 0:
            a, c = c, a
    res = optimize.minimize_scalar(f, bracket=(a, b, c), method="brent",
                                   options={"xtol": tol / 4, "maxiter": maxiter})
    x = float(res.x)
    if grad is not None:
        x = _polish_root(grad, x, max(abs(c - a), 1e-6))
    if bounds is not None:
        if x <= bounds[0]:
            return float(bounds[0]), True
        if x >= bounds[1]:
            return float(bounds[1]), True
    return x, False


def _polish_root(g, x: float, width: float) -> float:
    h = 1e-6
    while h <= width:
        lo, hi = x - h, x + h
        glo, ghi = g(lo), g(hi)
        if glo <= 0.0 <= ghi:
            if glo == 0.0:
                return lo
            if ghi == 0.0:
                return hi
            return float(optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))
        h *= 8.0
    return x


# ------------------------------------------------------------------ Fourier

def _log_abs_1mexp(lam: np.ndarray) -> np.ndarray:
    """log |1 - e^{i lam}| = log(2 sin(lam / 2)) on (0, pi)."""
    return np.log(2.0 * np.sin(lam / 2.0))


def gph(x: ArrayLike, m: int, p: int = 1, tau: int = 0, delta: int = 0, trim: int = 0) -> EstimateResult:
    """Log-periodogram regression on the pooled tapered periodogram of Delta^delta x."""
    if m < 2:
        raise RankError("GPH needs m >= 2 regression points")
    y = difference(as_array(x), delta)
    K = n_blocks(y.size, p, tau)
    if trim + m > K:
        raise InsufficientDataError(f"only {K} pooled blocks available, need trim+m = {trim + m}")
    pp = pool(tapered_periodogram(y, tau), p)
    I = pp.ordinates[trim:trim + m]
    if np.any(I <= 0):
        raise DegenerateInputError("zero pooled ordinate; log undefined")
    g = -2.0 * _log_abs_1mexp(pp.central_freqs[trim:trim + m])
    gc = g - g.mean()
    S = float(gc @ gc)
    d_hat = float(gc @ np.log(I) / S) + delta
    s2 = asympvar.sigma2_pool(p, tau).value
    tuning = {"m": m, "p": p, "tau": tau, "delta": delta, "trim": trim}
    return EstimateResult("GPH", d_hat, math.sqrt(s2 / S), tuning, std_asymptotic=math.sqrt(s2 / (4 * m)))


def lwf_contrast(I: np.ndarray, lam: np.ndarray):
    """Return L(e) = log mean(I |1-e^{i lam}|^{2e}) - 2e mean(log|1-e^{i lam}|) as a callable."""
    c = _log_abs_1mexp(lam)
    cbar = float(c.mean())
    with np.errstate(divide="ignore"):
        logI = np.log(I)
    m = I.size

    def L(e):
        return float(logsumexp(logI + 2.0 * e * c) - math.log(m) - 2.0 * e * cbar)

    def grad(e):
        z = logI + 2.0 * e * c
        wts = np.exp(z - logsumexp(z))
        return float(2.0 * (wts @ c - cbar))
    L.grad = grad
    return L


def lwf(x: ArrayLike, m: int, tau: int = 0, delta: int = 0, trim: int = 0,
        range: Optional[tuple] = None) -> EstimateResult:
    """Local Whittle estimate on the tapered periodogram of Delta^delta x."""
    if m < 2:
        raise RankError("LWF needs m >= 2 frequencies")
    y = difference(as_array(x), delta)
    nt = n_freq(y.size)
    if trim + m > nt:
        raise InsufficientDataError(f"only {nt} Fourier frequencies, need trim+m = {trim + m}")
    tp = tapered_periodogram(y, tau)
    I = tp.ordinates[trim:trim + m]
    # h_t^tau = (-2i)^tau sin^tau(pi t / n) e^{i pi tau t / n}: ordinate j is centred at pi (2j + tau) / n
    lam = tp.frequencies[trim:trim + m] + np.pi * tau / y.size
    if not np.any(I > 0):
        raise DegenerateInputError("all periodogram ordinates are zero")
    L = lwf_contrast(I, lam)
    pos = I > 0
    c = -2.0 * _log_abs_1mexp(lam[pos])
    pilot = float(np.polyfit(c, np.log(I[pos]), 1)[0]) if pos.sum() >= 2 else 0.0
    bounds = None if range is None else (range[0] - delta, range[1] - delta)
    e, at_bound = argmin_convex(L, pilot, bounds)
    tuning = {"m": m, "tau": tau, "delta": delta, "trim": trim}
    if range is not None:
        tuning["range"] = list(range)
    return EstimateResult("LWF", e + delta, math.sqrt(asympvar.phi_tau(tau) / (4 * m)), tuning,
                          boundary=at_bound)


# ------------------------------------------------------------------ wavelet

def _scales(pyr: WaveletPyramid, L: int, U: Optional[int]) -> tuple[int, int]:
    U = pyr.J if U is None else U
    if not (0 <= L < U <= pyr.J):
        raise RankError(f"need 0 <= L < U <= J = {pyr.J}, got L={L}, U={U}")
    return L, U


def _as_pyramid(x, w: WaveletSpec, counts: str = "formula") -> WaveletPyramid:
    return x if isinstance(x, WaveletPyramid) else pyramid(x, w, counts=counts)


def _wavelet_std(wts: np.ndarray, d: float, L: int, n: int, w: WaveletSpec) -> float:
    try:
        v = asympvar.quad_form(wts, d, w)
    except InadmissibleError:
        return math.nan
    return math.sqrt(v / (n * 2.0 ** (-L)))


def lrw(x, w: WaveletSpec = None, L: int = 3, U: Optional[int] = None,
        weights: Union[str, Sequence[float]] = "av", pilot: Optional[float] = None,
        with_std: bool = True, counts: str = "formula") -> EstimateResult:
    """Log-regression of the scale spectrum on the scale index.

    ``weights`` is ``"av"``, ``"optimal"`` (two-step, pilot from AV weights
    unless ``pilot`` is given) or an explicit vector of length U-L+1.
    ``x`` may be a series or a precomputed pyramid; ``counts`` is passed to
    :func:`pyramid` when a series is given.
    """
    w = w or daubechies(4)
    pyr = _as_pyramid(x, w, counts)
    L, U = _scales(pyr, L, U)
    ell = U - L
    energies = np.array([pyr.energy(j) for j in range(L, U + 1)])
    if np.any(energies <= 0):
        raise DegenerateInputError("a scale with zero energy makes log sigma^2_j undefined")
    ylog = np.log(energies / np.array(pyr.counts[L:U + 1], dtype=float))
    B, _ = design(ell)
    tuning = {"L": L, "U": U, "wavelet": w.name}

    if isinstance(weights, str) and weights.lower() in ("av", "abry-veitch", "abryveitch"):
        wts = av_weights(ell)
        D = np.diag(2.0 ** -np.arange(ell + 1))
        tuning["weights"] = "av"
    elif isinstance(weights, str) and weights.lower() in ("opt", "optimal"):
        if pilot is None:
            pilot = float(av_weights(ell) @ ylog)
        wts = asympvar.optimal_weights(pilot, ell, w)
        D = np.linalg.inv(asympvar.sigma_matrix(pilot, ell, w))
        tuning["weights"] = "optimal"
        tuning["pilot"] = pilot
    else:
        wts = np.asarray(weights, dtype=np.float64)
        if wts.size != ell + 1:
            raise RankError(f"need {ell + 1} weights, got {wts.size}")
        if abs(wts.sum()) > 1e-10 or abs(2 * LOG2 * (np.arange(ell + 1) @ wts) - 1) > 1e-10:
            raise DomainError("weights must satisfy sum w = 0 and 2 log2 sum i w_i = 1")
        D = np.eye(ell + 1)
        tuning["weights"] = "explicit"

    d_hat = float(wts @ ylog)
    # intercept of the companion weighted regression, re-expressed at absolute scale j
    slope = 2 * LOG2 * d_hat
    one = np.ones(ell + 1)
    b0 = float(one @ D @ (ylog - slope * B[:, 1]) / (one @ D @ one))
    intercept = math.exp(b0 - slope * L)
    std = _wavelet_std(wts, d_hat, L, pyr.n, w) if with_std else math.nan
    return EstimateResult("LRW", d_hat, std, tuning, intercept=intercept, weights=wts)


def lww_contrast(energies: np.ndarray, counts: np.ndarray, scales: np.ndarray):
    jbar = float(counts @ scales / counts.sum())
    loge = np.log(energies)
    sh = 2.0 * LOG2 * (jbar - scales)

    def L(d):
        return float(logsumexp(loge + d * sh))

    def grad(d):
        z = loge + d * sh
        return float(np.exp(z - logsumexp(z)) @ sh)
    L.grad = grad
    return L


def lww(x, w: WaveletSpec = None, L: int = 3, U: Optional[int] = None, range: Optional[tuple] = None,
        with_std: bool = True, counts: str = "formula") -> EstimateResult:
    """Local Whittle estimate on the wavelet coefficients of scales L..U."""
    w = w or daubechies(4)
    pyr = _as_pyramid(x, w, counts)
    L, U = _scales(pyr, L, U)
    scales = np.arange(L, U + 1)
    energies = np.array([pyr.energy(j) for j in scales])
    counts = np.array(pyr.counts[L:U + 1], dtype=float)
    if np.any(energies <= 0):
        raise DegenerateInputError("a scale with all-zero coefficients; contrast has no finite minimizer")
    contrast = lww_contrast(energies, counts, scales)
    pilot = float(np.polyfit(scales, np.log(energies / counts), 1)[0] / (2 * LOG2))
    d_hat, at_bound = argmin_convex(contrast, pilot, range)
    tuning = {"L": L, "U": U, "wavelet": w.name}
    if range is not None:
        tuning["range"] = list(range)
    std = math.nan
    if with_std:
        try:
            std = math.sqrt(asympvar.lww_variance(d_hat, U - L, w) / (pyr.n * 2.0 ** (-L)))
        except InadmissibleError:
            std = math.nan
    return EstimateResult("LWW", d_hat, std, tuning, boundary=at_bound)


def optimal_weights(d: float, ell: int, w: WaveletSpec) -> np.ndarray:
    return asympvar.optimal_weights(d, ell, w)


def confidence_interval(d: float, std: float, level: float = 0.95) -> tuple[float, float]:
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    if std < 0:
        raise DomainError("std must be >= 0")
    z = float(stats.norm.ppf(0.5 * (1.0 + level)))
    return d - z * std, d + z * std
