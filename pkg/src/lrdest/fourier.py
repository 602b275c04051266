"""DFT at Fourier frequencies, complex-tapered periodogram, pooling."""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import ArrayLike, InsufficientDataError, as_array


def n_freq(n: int) -> int:
    """Number of interior Fourier frequencies, floor((n-1)/2)."""
    return (n - 1) // 2


def fourier_frequencies(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(1, n_freq(n) + 1) / n


def _sum_exp(y: np.ndarray) -> np.ndarray:
    """S_j = sum_{t=1}^{n} y_t exp(i t lambda_j) for j = 1..floor((n-1)/2), via FFT."""
    n = y.size
    j = np.arange(1, n_freq(n) + 1)
    full = n * np.fft.ifft(y)
    return full[j] * np.exp(2j * np.pi * j / n)


def dft(x: ArrayLike) -> np.ndarray:
    """D(lambda_j) = (2 pi n)^{-1/2} sum_t x_t e^{i t lambda_j}, j = 1..n~."""
    x = as_array(x)
    if x.size < 3:
        raise InsufficientDataError("need n >= 3 for an interior Fourier frequency")
    return _sum_exp(x.astype(np.complex128)) / np.sqrt(2 * np.pi * x.size)


def taper(n: int, tau: int) -> np.ndarray:
    """Weights h_t^tau with h_t = 1 - exp(2 i pi t / n), t = 1..n."""
    t = np.arange(1, n + 1)
    return (1.0 - np.exp(2j * np.pi * t / n)) ** tau


@dataclass(frozen=True)
class TaperedPeriodogram:
    tau: int
    ordinates: np.ndarray
    frequencies: np.ndarray
    a_tau: float
    n: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("freq,ordinate\n")
        for f, v in zip(self.frequencies.tolist(), self.ordinates.tolist()):
            buf.write(f"{f!r},{v!r}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class PooledPeriodogram:
    p: int
    tau: int
    K: int
    ordinates: np.ndarray
    central_freqs: np.ndarray
    n: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("block,freq,ordinate\n")
        for k, (f, v) in enumerate(zip(self.central_freqs.tolist(), self.ordinates.tolist()), 1):
            buf.write(f"{k},{f!r},{v!r}\n")
        return buf.getvalue()


def tapered_dft(x: ArrayLike, tau: int) -> tuple[np.ndarray, float]:
    """Tapered DFT of order tau and its normalizer a_tau.

    For tau >= 1 the mean is left in: sum_t h_t^tau e^{i t lambda_j} vanishes
    at every interior Fourier frequency.  For tau = 0 the mean is removed.
    """
    x = as_array(x)
    n = x.size
    if tau < 0:
        raise ValueError("taper order must be >= 0")
    if n < 2 * (tau + 1) or n < 3:
        raise InsufficientDataError(f"need n >= {max(3, 2 * (tau + 1))} for taper order {tau}")
    if tau == 0:
        y = (x - x.mean()).astype(np.complex128)
        a = 1.0
    else:
        h = taper(n, tau)
        y = h * x
        a = float(np.mean(np.abs(h) ** 2))
    return _sum_exp(y) / np.sqrt(2 * np.pi * n * a), a


def tapered_periodogram(x: ArrayLike, tau: int = 0) -> TaperedPeriodogram:
    D, a = tapered_dft(x, tau)
    n = as_array(x).size
    I = np.abs(D) ** 2
    I.setflags(write=False)
    return TaperedPeriodogram(tau=tau, ordinates=I, frequencies=fourier_frequencies(n), a_tau=a, n=n)


def n_blocks(n: int, p: int, tau: int) -> int:
    return (n - 1) // (2 * (p + tau))


def pool(tp: TaperedPeriodogram, p: int = 1) -> PooledPeriodogram:
    """Sum p consecutive ordinates per block, skipping tau between blocks."""
    if p < 1:
        raise ValueError("pooling order must be >= 1")
    q = p + tp.tau
    K = n_blocks(tp.n, p, tp.tau)
    if K < 1:
        raise InsufficientDataError(f"no complete pooling block for n={tp.n}, p={p}, tau={tp.tau}")
    blocks = tp.ordinates[: K * q].reshape(K, q)[:, :p].sum(axis=1)
    k = np.arange(1, K + 1)
    lam = (2 * q * (k - 1) + q + 1) * np.pi / tp.n
    blocks.setflags(write=False)
    return PooledPeriodogram(p=p, tau=tp.tau, K=K, ordinates=blocks, central_freqs=lam, n=tp.n)
