"""Exact Gaussian generators (circulant embedding) and transformed models."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .core import DomainError, EmbeddingError, difference, integrate

KINDS = ("ARFIMA", "DARFIMA", "FGN", "SUBORD1", "SUBORD2")


class InfeasibleSubordinationError(DomainError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str = "ARFIMA"
    d: float = 0.0
    ar: tuple = ()
    ma: tuple = ()
    sigma2: float = 1.0
    lambda0: Optional[float] = None
    H: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.upper())
        object.__setattr__(self, "ar", tuple(float(v) for v in self.ar))
        object.__setattr__(self, "ma", tuple(float(v) for v in self.ma))
        if self.kind not in KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.kind == "FGN":
            H = self.H if self.H is not None else self.d + 0.5
            if not 0 < H < 1:
                raise DomainError("FGN needs 0 < H < 1")
            object.__setattr__(self, "H", float(H))
            object.__setattr__(self, "d", float(H) - 0.5)
        if self.kind == "DARFIMA":
            lam0 = math.pi / 2 if self.lambda0 is None else self.lambda0
            if not 0 < lam0 <= math.pi:
                raise DomainError("DARFIMA needs 0 < lambda0 <= pi")
            object.__setattr__(self, "lambda0", float(lam0))
        if self.sigma2 <= 0:
            raise DomainError("innovation variance must be positive")
        lam = np.linspace(0, np.pi, 4097)
        if self.ar and np.min(np.abs(_poly(self.ar, lam, -1.0))) < 1e-8:
            raise DomainError("AR polynomial vanishes on the unit circle")
        if self.ma and abs(1 + sum(self.ma)) < 1e-12:
            raise DomainError("MA polynomial vanishes at z = 1")
        if not self.label:
            object.__setattr__(self, "label", self.default_label())

    def default_label(self) -> str:
        if self.kind == "FGN":
            return f"FGN({self.H:g})"
        return f"{self.kind}({len(self.ar)},{self.d:.1f},{len(self.ma)})"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ar"] = list(self.ar)
        out["ma"] = list(self.ma)
        return {k: v for k, v in out.items() if v is not None}

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelSpec":
        keys = {"kind", "d", "ar", "ma", "sigma2", "lambda0", "H", "label"}
        bad = set(obj) - keys
        if bad:
            raise DomainError(f"unknown model fields {sorted(bad)}")
        return cls(**obj)


def _poly(coef, lam, sign):
    """1 + sign * sum_k coef_k e^{-i k lam}."""
    z = np.exp(-1j * np.asarray(lam))
    acc = np.ones_like(z)
    zk = np.ones_like(z)
    for c in coef:
        zk = zk * z
        acc = acc + sign * c * zk
    return acc


def split_memory(d: float) -> tuple[int, float]:
    """d = k + d_s with k = floor(d + 1/2), so d_s lies in [-1/2, 1/2).

    Half-integers go to d_s = -1/2, which is still stationary (d_s = 1/2 is not).
    """
    k = math.floor(d + 0.5)
    return k, d - k


# ------------------------------------------------------------ covariances

def fracdiff_acvf(d: float, nlags: int, sigma2: float = 1.0) -> np.ndarray:
    """Autocovariance of ARFIMA(0, d, 0), lags 0..nlags, for -1/2 <= d < 1/2."""
    if not -0.5 <= d < 0.5:
        raise DomainError("stationary fractional noise needs -1/2 <= d < 1/2")
    g = np.empty(nlags + 1)
    g[0] = sigma2 * math.exp(gammaln(1 - 2 * d) - 2 * gammaln(1 - d))
    h = np.arange(1, nlags + 1)
    g[1:] = g[0] * np.cumprod((h - 1 + d) / (h - d))
    return g


def _arma_fourier(ar, ma, size: int = 1 << 16) -> np.ndarray:
    """c_k = (2 pi)^-1 int |theta|^2/|phi|^2 e^{i k lam} dlam for k = -K..K, and K."""
    while True:
        lam = 2 * np.pi * np.arange(size) / size
        G = np.abs(_poly(ma, lam, 1.0)) ** 2 / np.abs(_poly(ar, lam, -1.0)) ** 2
        c = np.fft.ifft(G).real
        half = size // 2
        if abs(c[half]) <= 1e-16 * c[0] or size >= 1 << 24:
            break
        size *= 2
    keep = np.nonzero(np.abs(c[:half]) > 1e-17 * c[0])[0]
    K = int(keep.max()) if keep.size else 0
    return np.concatenate([c[size - K:], c[: K + 1]]), K


def arfima_acvf(d: float, ar=(), ma=(), sigma2: float = 1.0, nlags: int = 10) -> np.ndarray:
    """Autocovariance of the stationary ARFIMA(p, d, q), lags 0..nlags.

    Exact fractional-noise autocovariance convolved with the Fourier
    coefficients of the ARMA factor |theta|^2/|phi|^2 (FFT quadrature of a
    smooth periodic function, accurate to rounding).
    """
    if not ar and not ma:
        return fracdiff_acvf(d, nlags, sigma2) if d != 0 else np.r_[sigma2, np.zeros(nlags)]
    c, K = _arma_fourier(tuple(ar), tuple(ma))
    base = fracdiff_acvf(d, nlags + K, sigma2) if d != 0 else np.r_[sigma2, np.zeros(nlags + K)]
    two = np.concatenate([base[:0:-1], base])  # lags -(nlags+K)..(nlags+K)
    full = np.convolve(two, c, mode="valid")  # lags -nlags..nlags
    return full[nlags:]


def fgn_acvf(H: float, nlags: int) -> np.ndarray:
    h = np.arange(nlags + 1, dtype=float)
    return 0.5 * (np.abs(h + 1) ** (2 * H) + np.abs(h - 1) ** (2 * H) - 2 * h ** (2 * H))


# ----------------------------------------------------- circulant embedding

def embedding_eigenvalues(acvf_fn, n: int, max_factor: int = 16, tol: float = 1e-10):
    """Eigenvalues of the smallest non-negative circulant embedding of size 2n..max_factor*n."""
    first = 1 << int(math.ceil(math.log2(max(2 * n, 2))))
    size = first
    while True:
        g = acvf_fn(size // 2)
        row = np.concatenate([g, g[-2:0:-1]])
        eig = np.fft.fft(row).real
        if eig.min() >= -tol * max(eig.max(), 1.0):
            return np.clip(eig, 0.0, None), eig.min()
        size *= 2
        if size > max(first, max_factor * n):
            raise EmbeddingError(f"circulant embedding has negative eigenvalues up to size {size // 2}")


def _gaussian_path(eig: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    size = eig.size
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    y = np.fft.fft(np.sqrt(eig / size) * z)
    return y.real[:n].copy()


def stationary_arfima(d_s: float, ar, ma, sigma2: float, n: int, rng) -> np.ndarray:
    eig, _ = embedding_eigenvalues(lambda L: arfima_acvf(d_s, ar, ma, sigma2, L), n)
    return _gaussian_path(eig, n, rng)


# --------------------------------------------------------------- generators

def gen_arfima(spec: ModelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """ARFIMA(p, d, q) for any real d.

    The stationary part with memory d_s is drawn exactly; it is then
    integrated k times (k > 0) or differenced -k times (k < 0).
    """
    k, ds = split_memory(spec.d)
    if k < 0:
        x = stationary_arfima(ds, spec.ar, spec.ma, spec.sigma2, n - k, rng)
        return difference(x, -k)
    x = stationary_arfima(ds, spec.ar, spec.ma, spec.sigma2, n, rng)
    return integrate(x, k, 0.0)


def gen_fgn(H: float, n: int, rng: np.random.Generator, sigma2: float = 1.0) -> np.ndarray:
    if not 0 < H < 1:
        raise DomainError("FGN needs 0 < H < 1")
    eig, _ = embedding_eigenvalues(lambda L: fgn_acvf(H, L), n)
    return math.sqrt(sigma2) * _gaussian_path(eig, n, rng)


def gen_fbm(H: float, n: int, rng: np.random.Generator) -> np.ndarray:
    return np.cumsum(gen_fgn(H, n, rng))


def sinc_kernel(lambda0: float, Lf: int) -> np.ndarray:
    t = np.arange(-Lf, Lf + 1, dtype=float)
    out = np.empty_like(t)
    nz = t != 0
    out[nz] = np.sin(lambda0 * t[nz]) / (np.pi * t[nz])
    out[~nz] = lambda0 / np.pi
    return out


def gen_darfima(spec: ModelSpec, n: int, rng: np.random.Generator, Lf: int = 512) -> np.ndarray:
    """ARFIMA path low-pass filtered by a truncated ideal (sinc) kernel."""
    base = ModelSpec("ARFIMA", spec.d, spec.ar, spec.ma, spec.sigma2)
    path = gen_arfima(base, n + 2 * Lf, rng)
    return np.convolve(path, sinc_kernel(spec.lambda0, Lf), mode="valid")


def subordination_memory(kind: str, d_target: float) -> float:
    k0 = {"SUBORD1": 1, "SUBORD2": 2}[kind.upper()]
    return 0.5 * (1.0 - (1.0 - 2.0 * d_target) / k0)


def gen_subord(kind: str, d_target: float, base: ModelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """G(Y) with Y a unit-variance stationary Gaussian ARFIMA.

    SUBORD1 uses G = exp (Hermite rank 1), SUBORD2 uses G(y) = y^2 - 1
    (rank 2).  The ARMA part acts on Y, which is then scaled to unit
    marginal variance.
    """
    kind = kind.upper()
    dY = subordination_memory(kind, d_target)
    if not -0.5 <= dY < 0.5:
        raise InfeasibleSubordinationError(f"{kind} with d={d_target:g} needs d_Y={dY:g} outside [-1/2, 1/2)")
    g0 = arfima_acvf(dY, base.ar, base.ma, 1.0, 0)[0]
    y = stationary_arfima(dY, base.ar, base.ma, 1.0, n, rng) / math.sqrt(g0)
    return np.exp(y) if kind == "SUBORD1" else y * y - 1.0


def generate(spec: ModelSpec, n: int, rng: np.random.Generator, Lf: int = 512) -> np.ndarray:
    if spec.kind == "ARFIMA":
        return gen_arfima(spec, n, rng)
    if spec.kind == "DARFIMA":
        return gen_darfima(spec, n, rng, Lf)
    if spec.kind == "FGN":
        return gen_fgn(spec.H, n, rng, spec.sigma2)
    return gen_subord(spec.kind, spec.d, spec, n, rng)
