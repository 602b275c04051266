"""Daubechies filters and the boundary-free pyramidal wavelet transform.

Scale convention: scale j >= 1 is the j-th level of Mallat's pyramid, i.e.
coefficients are decimated by 2**j.  Scale 0 is the undecimated scale whose
filter is <phi(. + l), psi>; it vanishes identically for orthonormal
wavelets, so it is kept (with the right count) but always holds zeros.
"""
from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._filters import LOWPASS
from .core import ArrayLike, InsufficientDataError, UnsupportedError, as_array, difference

# Sup-norm decay exponents of psi-hat quoted for the two common Daubechies filters.
_ALPHA = {2: 1.34, 4: 1.91}


def alpha_lower_bound(M: int) -> float:
    return (1.0 - math.log2(3.0) / 2.0) * M


@dataclass(frozen=True)
class WaveletSpec:
    M: int
    lowpass: np.ndarray = field(repr=False)
    highpass: np.ndarray = field(repr=False)
    T: int
    alpha: float
    family: str = "Daubechies"

    @property
    def name(self) -> str:
        return f"db{self.M}"

    def admissible_interval(self) -> tuple[float, float]:
        """Range (1/2 - alpha, M] on which the wavelet variance formulas hold."""
        return 0.5 - self.alpha, float(self.M)


def daubechies(M: int) -> WaveletSpec:
    if not isinstance(M, (int, np.integer)) or not 1 <= M <= 10:
        raise UnsupportedError(f"Daubechies wavelets are available for M = 1..10, got {M!r}")
    M = int(M)
    lo = np.array(LOWPASS[M], dtype=np.float64)
    L = lo.size
    hi = np.array([(-1) ** k * lo[L - 1 - k] for k in range(L)])
    lo.setflags(write=False)
    hi.setflags(write=False)
    return WaveletSpec(M=M, lowpass=lo, highpass=hi, T=2 * M, alpha=_ALPHA.get(M, alpha_lower_bound(M)))


def parse_wavelet(name: str) -> WaveletSpec:
    m = re.fullmatch(r"\s*db(\d+)\s*", str(name).lower())
    if not m:
        raise UnsupportedError(f"unknown wavelet {name!r}; use db1..db10")
    return daubechies(int(m.group(1)))


def n_available(n: int, T: int, j: int) -> int:
    """floor(2^-j (n - T + 1) - T + 1), in exact integer arithmetic."""
    return (n - T + 1) // (1 << j) - T + 1


def max_scale(n: int, T: int) -> int:
    if n_available(n, T, 0) < 1:
        raise InsufficientDataError(f"no wavelet coefficient available for n={n}, T={T}")
    j = 0
    while n_available(n, T, j + 1) >= 1:
        j += 1
    return j


def valid_counts(n: int, T: int) -> list:
    """Number of fully supported outputs of each pyramid level, j = 1, 2, ... while >= 1."""
    out = []
    a = n
    while a >= T:
        a = (a - T) // 2 + 1
        out.append(a)
    return out


COUNT_RULES = ("formula", "valid")


@dataclass(frozen=True)
class WaveletPyramid:
    coeffs: tuple
    counts: tuple
    J: int
    n: int
    wavelet: WaveletSpec

    def energy(self, j: int) -> float:
        return float(np.dot(self.coeffs[j], self.coeffs[j]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("scale,k,coefficient\n")
        for j, c in enumerate(self.coeffs):
            for k, v in enumerate(c.tolist()):
                buf.write(f"{j},{k},{v!r}\n")
        return buf.getvalue()


def pyramid(x: ArrayLike, w: WaveletSpec, J: int | None = None, predifference: int = 0,
            counts: str = "formula") -> WaveletPyramid:
    """Boundary-free DWT.

    Each level only uses fully supported filter windows ("valid" correlation),
    so no coefficient touches a boundary.  With ``counts="formula"`` the first
    ``n_available(n, T, j)`` outputs of level j are kept; ``counts="valid"``
    keeps every fully supported output, which adds a few coefficients per
    level and usually one extra coarse scale.  ``predifference`` applies
    Delta^k before the transform.
    """
    if counts not in COUNT_RULES:
        raise ValueError(f"counts must be one of {COUNT_RULES}, got {counts!r}")
    x = as_array(x)
    if predifference:
        x = difference(x, predifference)
    n = x.size
    n0 = n_available(n, w.T, 0)
    if counts == "formula":
        Jmax = max_scale(n, w.T)
        avail = [n_available(n, w.T, j) for j in range(1, Jmax + 1)]
    else:
        if n0 < 1:
            raise InsufficientDataError(f"no wavelet coefficient available for n={n}, T={w.T}")
        avail = valid_counts(n, w.T)
        Jmax = len(avail)
    if J is None:
        J = Jmax
    elif J > Jmax or J < 0:
        raise InsufficientDataError(f"scale {J} not available (max {Jmax})")
    cnt = (n0,) + tuple(avail[:J])
    coeffs = [np.zeros(n0)]
    lo = np.ascontiguousarray(w.lowpass)
    hi = np.ascontiguousarray(w.highpass)
    a = np.ascontiguousarray(x, dtype=np.float64)
    for j in range(1, J + 1):
        a, dj = _kernels.analysis_step(a, lo, hi)
        if dj.size < cnt[j]:  # cannot happen for T = 2M; guarded anyway
            raise InsufficientDataError(f"level {j}: {dj.size} valid coefficients < {cnt[j]}")
        coeffs.append(np.array(dj[: cnt[j]]))
    for c in coeffs:
        c.setflags(write=False)
    return WaveletPyramid(coeffs=tuple(coeffs), counts=cnt, J=J, n=n, wavelet=w)


def scale_spectrum(p: WaveletPyramid, j: int) -> float:
    if not 0 <= j <= p.J:
        raise IndexError(f"scale {j} not in pyramid (0..{p.J})")
    if p.counts[j] < 1:
        raise IndexError(f"scale {j} holds no coefficient")
    c = p.coeffs[j]
    return float(np.dot(c, c) / c.size)


def equivalent_filter(w: WaveletSpec, j: int) -> np.ndarray:
    """Level-j filter g_j with W_{j,k} = sum_m g_j[m] x[2^j k + m] (j >= 1)."""
    if j < 1:
        raise ValueError("equivalent filter defined for j >= 1")
    approx = np.array([1.0])
    for lev in range(1, j + 1):
        step = 1 << (lev - 1)
        up_h = np.zeros((w.lowpass.size - 1) * step + 1)
        up_h[::step] = w.lowpass
        up_g = np.zeros_like(up_h)
        up_g[::step] = w.highpass
        if lev == j:
            return np.convolve(approx, up_g)
        approx = np.convolve(approx, up_h)
    raise AssertionError("unreachable")
