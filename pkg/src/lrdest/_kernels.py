"""Hot inner loops with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``LRDEST_DISABLE_NUMBA`` is
unset (or ``0``).  Both paths are always importable so tests and the kernel
benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("LRDEST_DISABLE_NUMBA", "0").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False
    njit = None


# ---------------------------------------------------------------- numpy path

def analysis_step_np(a: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """One pyramid level: valid correlation with both filters, then keep every other output."""
    L = lo.size
    if a.size < L:
        return np.empty(0), np.empty(0)
    win = np.lib.stride_tricks.sliding_window_view(a, L)[::2]
    return win @ lo, win @ hi


def trigpoly_np(coef: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """sum_k coef[k] * exp(-i k omega), by Horner's rule."""
    z = np.exp(-1j * omega)
    acc = np.zeros(omega.shape, dtype=np.complex128)
    for c in coef[::-1]:
        acc = acc * z + c
    return acc


def refine_np(phi: np.ndarray, coef: np.ndarray, omega: np.ndarray) -> None:
    phi *= trigpoly_np(coef, omega)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _analysis_step_nb(a, lo, hi):
        L = lo.size
        if a.size < L:
            return np.empty(0), np.empty(0)
        m = (a.size - L) // 2 + 1
        outa = np.empty(m)
        outd = np.empty(m)
        for k in range(m):
            s0 = 0.0
            s1 = 0.0
            base = 2 * k
            for i in range(L):
                v = a[base + i]
                s0 += lo[i] * v
                s1 += hi[i] * v
            outa[k] = s0
            outd[k] = s1
        return outa, outd

    @njit(cache=True)
    def _trigpoly_nb(coef, omega):
        out = np.empty(omega.size, dtype=np.complex128)
        K = coef.size
        for i in range(omega.size):
            z = complex(np.cos(omega[i]), -np.sin(omega[i]))
            acc = 0j
            for k in range(K - 1, -1, -1):
                acc = acc * z + coef[k]
            out[i] = acc
        return out

    @njit(cache=True)
    def _refine_nb(phi, coef, omega):
        K = coef.size
        for i in range(omega.size):
            z = complex(np.cos(omega[i]), -np.sin(omega[i]))
            acc = 0j
            for k in range(K - 1, -1, -1):
                acc = acc * z + coef[k]
            phi[i] *= acc


def analysis_step(a, lo, hi):
    if HAVE_NUMBA:
        return _analysis_step_nb(np.ascontiguousarray(a, dtype=np.float64), lo, hi)
    return analysis_step_np(a, lo, hi)


def trigpoly(coef, omega):
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    if HAVE_NUMBA:
        return _trigpoly_nb(np.ascontiguousarray(coef, dtype=np.float64), omega.ravel()).reshape(omega.shape)
    return trigpoly_np(coef, omega)


def refine(phi, coef, omega):
    """In place: phi *= sum_k coef[k] exp(-i k omega)."""
    if HAVE_NUMBA:
        _refine_nb(phi, np.ascontiguousarray(coef, dtype=np.float64), np.ascontiguousarray(omega, dtype=np.float64))
    else:
        refine_np(phi, coef, omega)


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
