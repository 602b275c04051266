"""Asymptotic variances of the four estimators.

Wavelet side: the generalized fractional Brownian motion B_(d) has
Cov(B(f), B(g)) = int |x|^{-2d} f^(x) conj(g^(x)) dx.  Everything below is
built from psi^ on a uniform frequency grid:

* K(psi, d) = int |x|^{-2d} |psi^(x)|^2 dx
* I_u(d) = (2 pi)^{-1} sum_tau Cov^2(W_{0,0}, W_{-u,tau})
* Sigma(d, l)[i, j] = 4 pi 2^{2d|i-j|} 2^{min(i,j)} I_{|i-j|}(d) / K^2

Fourier side: Phi(tau) for the tapered local Whittle estimator and the
log-variance sigma^2_{p,tau} of a pooled tapered white-noise ordinate.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .core import ConditioningError, InadmissibleError, rng_stream, trigamma
from .fourier import taper
from .wavelet import WaveletSpec, daubechies

LOG2 = math.log(2.0)
INF = math.inf


# ================================================================ quadrature

@dataclass(frozen=True)
class Quadrature:
    """Uniform midpoint grid on |x| < 2 pi 2^octaves with ``per_period`` points per 2 pi."""

    octaves: int = 10
    per_period: int = 128

    @property
    def step(self) -> float:
        return 2 * np.pi / self.per_period

    @property
    def half_points(self) -> int:
        return (1 << self.octaves) * self.per_period

    @property
    def cutoff(self) -> float:
        return 2 * np.pi * (1 << self.octaves)

    def grid(self) -> np.ndarray:
        N = self.half_points
        return (np.arange(-N, N) + 0.5) * self.step

    def refined(self) -> "Quadrature":
        return Quadrature(self.octaves + 1, self.per_period * 2)


DEFAULT_QUAD = Quadrature()


# ============================================================= psi-hat

def _closure_coeffs(w: WaveletSpec) -> tuple[complex, complex]:
    """First two derivatives at 0 of phi^, used to close the infinite product."""
    h = np.asarray(w.lowpass) / math.sqrt(2.0)
    k = np.arange(h.size)
    d1 = -1j * np.sum(k * h)
    d2 = -np.sum(k * k * h)
    return complex(d1), complex((d2 + 2 * d1 * d1) / 3.0)


def _phi_closure(w: WaveletSpec, om: np.ndarray) -> np.ndarray:
    c1, c2 = _closure_coeffs(w)
    return 1.0 + c1 * om + 0.5 * c2 * om * om


def _start_level(xmax: float) -> int:
    # phi^ is closed by its 2nd-order Taylor polynomial at |x| 2^-U <= 2^-20
    return max(10, int(math.ceil(math.log2(max(xmax, 1.0)))) + 20)


def psi_hat(w: WaveletSpec, xi, depth: int | None = None) -> np.ndarray:
    """psi^(xi) = m1(xi/2) prod_{k>=2} m0(xi/2^k), with m0(0) = 1.

    ``depth`` refinement factors are applied exactly and the rest of the
    product is replaced by a second-order expansion of phi^ near 0.
    """
    xi = np.asarray(xi, dtype=np.float64)
    flat = xi.ravel()
    U = depth if depth is not None else _start_level(float(np.max(np.abs(flat), initial=1.0)))
    if U < 10:
        raise ValueError("depth must be >= 10")
    lo = np.asarray(w.lowpass) / math.sqrt(2.0)
    hi = np.asarray(w.highpass) / math.sqrt(2.0)
    phi = _phi_closure(w, flat / 2.0 ** U).astype(np.complex128)
    for k in range(U, 1, -1):
        _kernels.refine(phi, lo, flat / 2.0 ** k)
    _kernels.refine(phi, hi, flat / 2.0)
    return phi.reshape(xi.shape)


@dataclass(frozen=True)
class WaveletFourierTable:
    grid: np.ndarray
    values: np.ndarray
    M: int
    alpha: float
    resolution: float


def psi_hat_table(w: WaveletSpec, depth: int = 40, quad: Quadrature = DEFAULT_QUAD) -> WaveletFourierTable:
    lam = quad.grid()
    return WaveletFourierTable(grid=lam, values=psi_hat(w, lam, depth), M=w.M, alpha=w.alpha,
                               resolution=quad.step)


def _shannon_psi_hat(xi):
    a = np.abs(xi)
    return np.where((a >= np.pi) & (a <= 2 * np.pi), np.exp(-0.5j * xi), 0.0)


class _Engine:
    """psi^ on the grid plus a generator of psi^(2^-u x) for u = umax..1."""

    def __init__(self, w: WaveletSpec | None, quad: Quadrature):
        self.w = w
        self.quad = quad
        self.lam = quad.grid()
        self.h = quad.step
        self.psi0 = _shannon_psi_hat(self.lam) if w is None else psi_hat(w, self.lam)

    def scaled(self, umax: int):
        lam = self.lam
        if self.w is None:
            for u in range(umax, 0, -1):
                yield u, _shannon_psi_hat(lam / 2.0 ** u)
            return
        w = self.w
        lo = np.asarray(w.lowpass) / math.sqrt(2.0)
        hi = np.asarray(w.highpass) / math.sqrt(2.0)
        U = max(_start_level(self.quad.cutoff) + umax, umax + 1)
        phi = _phi_closure(w, lam / 2.0 ** U).astype(np.complex128)
        for k in range(U, 1, -1):
            # here phi = phi^(lam / 2^k)
            u = k - 1
            if u <= umax:
                yield u, _kernels.trigpoly(hi, lam / 2.0 ** k) * phi
            _kernels.refine(phi, lo, lam / 2.0 ** k)

    def fold(self, F: np.ndarray, u: int) -> np.ndarray:
        """Periodize F with period 2^{u+1} pi (``2^u * per_period`` grid points)."""
        Pu = (1 << u) * self.quad.per_period
        if Pu <= F.size:
            return F.reshape(-1, Pu).sum(axis=0)
        return F


@functools.lru_cache(maxsize=32)
def _engine(M: int | None, quad: Quadrature) -> _Engine:
    return _Engine(None if M is None else daubechies(M), quad)


def _key(w: WaveletSpec | None):
    return None if w is None else w.M


# ============================================================ admissibility

def check_admissible(d: float, w: WaveletSpec) -> None:
    lo, hi = w.admissible_interval()
    if not (lo < d <= hi):
        raise InadmissibleError(
            f"d={d:g} outside the admissible interval ({lo:g}, {hi:g}] for {w.name}", (lo, hi))


def _check_K_window(d: float, w: WaveletSpec) -> None:
    lo, hi = 0.5 - w.alpha, w.M + 0.5
    if not (lo < d < hi):
        raise InadmissibleError(
            f"K(psi, d) diverges: need {lo:g} < d < {hi:g} for {w.name}, got d={d:g}", (lo, hi))


# ==================================================================== K, I_u

@functools.lru_cache(maxsize=256)
def _K_cached(M, d: float, quad: Quadrature) -> float:
    eng = _engine(M, quad)
    a = np.abs(eng.lam)
    f = a ** (-2 * d) * np.abs(eng.psi0) ** 2
    total = eng.h * float(np.sum(f))
    if M is not None:
        # first cell on each side: integrate the power law ~ x^{2(M-d)} exactly
        e = 2.0 * (M - d)
        N = quad.half_points
        mid = f[N]  # value at x = h/2
        total += 2 * eng.h * mid * (2.0 ** e / (e + 1.0) - 1.0)
        # geometric octave extrapolation of the tail beyond the grid
        Lc = quad.cutoff
        o1 = eng.h * float(np.sum(f[(a > Lc / 2)]))
        o0 = eng.h * float(np.sum(f[(a > Lc / 4) & (a <= Lc / 2)]))
        if o0 > 0 and 0 < o1 < o0:
            r = o1 / o0
            total += o1 * r / (1 - r)
    return total


def K_psi(d: float, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> float:
    """int |x|^{-2d} |psi^(x)|^2 dx.  ``w=None`` selects the Shannon wavelet."""
    if w is None:
        return 2.0 * g_power(-2.0 * d)
    _check_K_window(d, w)
    return _K_cached(w.M, float(d), quad)


@functools.lru_cache(maxsize=512)
def _I_cached(M, d: float, umax: int, quad: Quadrature) -> tuple:
    eng = _engine(M, quad)
    wgt = np.abs(eng.lam) ** (-2 * d)
    A = wgt * eng.psi0
    out = [0.0] * (umax + 1)
    G = eng.fold(A * np.conj(eng.psi0), 0)
    out[0] = eng.h * float(np.sum(np.abs(G) ** 2))
    for u, psu in eng.scaled(umax):
        G = eng.fold(A * np.conj(psu), u)
        out[u] = eng.h * float(np.sum(np.abs(G) ** 2))
    return tuple(out)


def I_vector(d: float, umax: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> np.ndarray:
    """I_0(d), ..., I_umax(d)."""
    if w is not None:
        _check_K_window(d, w)
    return np.array(_I_cached(_key(w), float(d), int(umax), quad))


def I_u(d: float, u: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> float:
    return float(I_vector(d, u, w, quad)[u])


def wavelet_covariances(d: float, u: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> np.ndarray:
    """Cov(W_{0,0}, W_{-u,tau}) of B_(d) for tau = 0..2^u*per_period - 1 (circular index).

    Obtained by FFT quadrature of 2^{-u/2} int |x|^{-2d} psi^(x) conj(psi^(2^-u x)) e^{i x 2^-u tau} dx.
    ``(2 pi)^{-1} sum(cov**2)`` reproduces ``I_u`` (Parseval).
    """
    eng = _engine(_key(w), quad)
    psu = eng.psi0 if u == 0 else dict(eng.scaled(u))[u]
    F = np.abs(eng.lam) ** (-2 * d) * eng.psi0 * np.conj(psu)
    G = eng.fold(F, u)
    Pu = G.size
    tau = np.arange(Pu)
    theta0 = eng.lam[0]
    phase = np.exp(1j * theta0 * tau / 2.0 ** u)
    cov = 2.0 ** (-u / 2.0) * eng.h * phase * Pu * np.fft.ifft(G)
    return cov.real


# =========================================================== weights, Sigma

def eta_kappa(ell) -> tuple[float, float]:
    if ell == INF:
        return 1.0, 2.0
    i = np.arange(ell + 1)
    s = 2.0 - 2.0 ** (-ell)
    p = 2.0 ** (-i) / s
    eta = float(np.sum(i * p))
    kappa = float(np.sum((i - eta) ** 2 * p))
    return eta, kappa


def av_weights(ell: int) -> np.ndarray:
    """Abry-Veitch weights w_i = (i - eta) 2^-i / (2 log2 kappa (2 - 2^-l)), i = 0..l."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    eta, kappa = eta_kappa(ell)
    i = np.arange(ell + 1)
    return (i - eta) * 2.0 ** (-i) / (2 * LOG2 * kappa * (2.0 - 2.0 ** (-ell)))


def design(ell: int) -> tuple[np.ndarray, np.ndarray]:
    B = np.column_stack([np.ones(ell + 1), np.arange(ell + 1.0)])
    b = np.array([0.0, 1.0 / (2 * LOG2)])
    return B, b


def sigma_matrix(d: float, ell: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> np.ndarray:
    if w is not None:
        check_admissible(d, w)
    K = K_psi(d, w, quad)
    I = I_vector(d, ell, w, quad)
    i = np.arange(ell + 1)
    du = np.abs(i[:, None] - i[None, :])
    lo = np.minimum(i[:, None], i[None, :])
    return 4 * np.pi * 2.0 ** (2 * d * du) * 2.0 ** lo * I[du] / K ** 2


def v_av(d: float, ell, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD, umax_inf: int = 40) -> float:
    """Limit variance of LRW with Abry-Veitch weights (= LWW variance)."""
    if w is not None:
        check_admissible(d, w)
    K = K_psi(d, w, quad)
    if ell == INF:
        I = I_vector(d, umax_inf, w, quad)
        u = np.arange(1, umax_inf + 1)
        brace = I[0] + 2 * np.sum(I[1:] * 2.0 ** ((2 * d - 1) * u))
        return float(np.pi / (2 * LOG2 * K) ** 2 * brace)
    ell = int(ell)
    I = I_vector(d, ell, w, quad)
    eta, kappa = eta_kappa(ell)
    s = 2.0 - 2.0 ** (-ell)
    cross = 0.0
    for u in range(1, ell + 1):
        i = np.arange(ell - u + 1)
        inner = float(np.sum(2.0 ** (-i) / s * (i - eta) * (i + u - eta)))
        cross += I[u] * 2.0 ** ((2 * d - 1) * u) * inner
    return float(np.pi / (s * kappa * (LOG2 * K) ** 2) * (I[0] + 2.0 / kappa * cross))


def lww_variance(d: float, ell, w: WaveletSpec, quad: Quadrature = DEFAULT_QUAD) -> float:
    return v_av(d, ell, w, quad)


def _solve_design(S: np.ndarray):
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConditioningError(f"Sigma is numerically singular (condition number {cond:.3g})")
    B, b = design(S.shape[0] - 1)
    SiB = np.linalg.solve(S, B)
    A = B.T @ SiB
    return SiB, A, b


def optimal_weights(d: float, ell: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> np.ndarray:
    """w = Sigma^{-1} B (B' Sigma^{-1} B)^{-1} b."""
    SiB, A, b = _solve_design(sigma_matrix(d, ell, w, quad))
    return SiB @ np.linalg.solve(A, b)


def v_opt(d: float, ell: int, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> float:
    _, A, b = _solve_design(sigma_matrix(d, ell, w, quad))
    return float(b @ np.linalg.solve(A, b))


def quad_form(wts, d: float, w: WaveletSpec | None, quad: Quadrature = DEFAULT_QUAD) -> float:
    wts = np.asarray(wts, dtype=np.float64)
    S = sigma_matrix(d, wts.size - 1, w, quad)
    return float(wts @ S @ wts)


# ================================================================= Shannon

def g_power(x: float) -> float:
    """int_pi^{2 pi} t^x dt, with the log 2 limit at x = -1."""
    y = x + 1.0
    if abs(y) < 1e-8:
        return LOG2 * (1.0 + 0.5 * y * (math.log(2 * math.pi ** 2)))
    return math.pi ** y * math.expm1(y * LOG2) / y


def v_shannon(d: float, ell) -> float:
    if ell == INF:
        s, kappa = 2.0, 2.0
    else:
        s = 2.0 - 2.0 ** (-int(ell))
        kappa = eta_kappa(int(ell))[1]
    return math.pi * g_power(-4 * d) / (2 * s * kappa * LOG2 ** 2 * g_power(-2 * d) ** 2)


# =================================================================== report

@dataclass(frozen=True)
class VarianceReport:
    d: float
    ell: float
    wavelet: str
    v_av: float
    v_shannon: float
    v_opt: float
    w_opt: np.ndarray
    sigma_matrix: np.ndarray


def variance_report(d: float, ell, w: WaveletSpec, quad: Quadrature = DEFAULT_QUAD) -> VarianceReport:
    check_admissible(d, w)
    va = v_av(d, ell, w, quad)
    vs = v_shannon(d, ell)
    if ell == INF:
        return VarianceReport(d, INF, w.name, va, vs, math.nan, np.array([]), np.array([[]]))
    S = sigma_matrix(d, ell, w, quad)
    SiB, A, b = _solve_design(S)
    wopt = SiB @ np.linalg.solve(A, b)
    return VarianceReport(d, int(ell), w.name, va, vs, float(b @ np.linalg.solve(A, b)), wopt, S)


def lww_lrw_av_equality_check(d: float, ell: int, w: WaveletSpec, quad: Quadrature = DEFAULT_QUAD) -> bool:
    """LWW variance and AV-weighted LRW quadratic form agree (same quantity, two code paths)."""
    a = lww_variance(d, ell, w, quad)
    b = quad_form(av_weights(ell), d, w, quad)
    return abs(a - b) <= 1e-10 * max(1.0, abs(a))


# ============================================================ Fourier side

def phi_tau(tau: int) -> float:
    """Phi(tau) = Gamma(4 tau + 1) Gamma(tau + 1)^4 / Gamma(2 tau + 1)^4."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return math.exp(math.lgamma(4 * tau + 1) + 4 * math.lgamma(tau + 1) - 4 * math.lgamma(2 * tau + 1))


@dataclass(frozen=True)
class Sigma2Estimate:
    p: int
    tau: int
    value: float
    stderr: float
    reps: int
    seed: int


CONSTANTS_FILE = Path(__file__).with_name("data") / "sigma2_pool.txt"
_CONSTANTS_VERSION = 1
_SEED = 20240607


def simulate_sigma2_pool(p: int, tau: int, reps: int = 1_000_000, seed: int = _SEED,
                         n_series: int = 1 << 15) -> Sigma2Estimate:
    """Var log of a pooled tapered white-noise ordinate, by simulation.

    Long Gaussian white-noise series are tapered and pooled; the blocks
    that reach the upper end of the frequency range are discarded, the
    rest are independent draws.  Standard error from the fourth moment.
    """
    if reps < 10_000:
        raise ValueError("reps must be >= 1e4")
    q = p + tau
    K = (n_series - 1) // (2 * q)
    keep = K - 2
    h = taper(n_series, tau)
    j = np.arange(1, keep * q + 1)
    sh = np.exp(2j * np.pi * j / n_series)
    vals = []
    got = 0
    s = 0
    while got < reps:
        x = rng_stream(seed, (p << 48) | (tau << 32) | s).standard_normal(n_series)
        s += 1
        D = (n_series * np.fft.ifft(h * x))[j] * sh
        I = (np.abs(D) ** 2).reshape(keep, q)[:, :p].sum(axis=1)
        take = min(keep, reps - got)
        vals.append(np.log(I[:take]))
        got += take
    v = np.concatenate(vals)
    c = v - v.mean()
    m2 = float(np.mean(c ** 2))
    m4 = float(np.mean(c ** 4))
    return Sigma2Estimate(p, tau, m2, math.sqrt(max(m4 - m2 * m2, 0.0) / v.size), v.size, seed)


@functools.lru_cache(maxsize=1)
def _load_constants() -> dict:
    table = {}
    if not CONSTANTS_FILE.exists():
        return table
    for line in CONSTANTS_FILE.read_text().splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        p, tau, val, se, reps, seed = s.split()
        table[(int(p), int(tau))] = Sigma2Estimate(int(p), int(tau), float(val), float(se), int(reps), int(seed))
    return table


_RUNTIME_CACHE: dict = {}


def sigma2_pool(p: int, tau: int, reps: int | None = None) -> Sigma2Estimate:
    """sigma^2_{p,tau}: exact trigamma(p) for tau = 0, tabulated or simulated otherwise."""
    if p < 1 or tau < 0:
        raise ValueError("need p >= 1 and tau >= 0")
    if tau == 0:
        return Sigma2Estimate(p, 0, trigamma(p), 0.0, 0, 0)
    if reps is None:
        hit = _load_constants().get((p, tau))
        if hit is not None:
            return hit
        reps = 1_000_000
    key = (p, tau, reps)
    if key not in _RUNTIME_CACHE:
        _RUNTIME_CACHE[key] = simulate_sigma2_pool(p, tau, reps)
    return _RUNTIME_CACHE[key]


def write_constants(pairs, reps: int = 1_000_000, path: Path = CONSTANTS_FILE) -> None:
    lines = [f"# sigma2_pool constants, format version {_CONSTANTS_VERSION}",
             "# Var log of a pooled tapered white-noise periodogram ordinate (simulated)",
             "# p tau sigma2 stderr reps seed"]
    for p, tau in pairs:
        e = sigma2_pool(p, tau) if tau == 0 else simulate_sigma2_pool(p, tau, reps)
        lines.append(f"{p} {tau} {e.value!r} {e.stderr!r} {e.reps} {e.seed}")
    path.write_text("\n".join(lines) + "\n")
    _load_constants.cache_clear()
