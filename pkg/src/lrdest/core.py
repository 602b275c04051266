"""Time-series container, integer differencing/integration, RNG streams, I/O."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np
from scipy import special


# ------------------------------------------------------------------- errors

class LrdError(ValueError):
    """Base class for all errors raised by this package."""


class DataError(LrdError):
    """Bad or unreadable input data."""


class LengthError(LrdError):
    pass


class DomainError(LrdError):
    pass


class InsufficientDataError(LrdError):
    pass


class DegenerateInputError(LrdError):
    pass


class RankError(LrdError):
    pass


class ConditioningError(LrdError):
    pass


class InadmissibleError(LrdError):
    """Memory parameter outside the range where a variance formula is finite."""

    def __init__(self, msg: str, interval: tuple[float, float] | None = None):
        super().__init__(msg)
        self.interval = interval


class UnsupportedError(LrdError):
    pass


class NonConvergenceError(LrdError):
    pass


class EmbeddingError(LrdError):
    pass


# ------------------------------------------------------------------ series

@dataclass(frozen=True)
class TimeSeries:
    """Finite real sample x_1..x_n.  The stored array is read-only."""

    values: np.ndarray

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size < 1:
            raise LengthError("empty series")
        if not np.all(np.isfinite(arr)):
            raise DataError("series contains NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


ArrayLike = Union[TimeSeries, np.ndarray, Iterable[float]]


def as_array(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.ravel()
    return arr


def difference(x: ArrayLike, order: int) -> np.ndarray:
    """Apply Delta^order, dropping the first ``order`` points."""
    x = as_array(x)
    if order < 0:
        raise DomainError("differencing order must be non-negative")
    if order >= x.size:
        raise LengthError(f"cannot difference {order} times a series of length {x.size}")
    if order == 0:
        return x.copy()
    return np.diff(x, n=order)


def integrate(x: ArrayLike, order: int, initial: float = 0.0) -> np.ndarray:
    """Cumulative-sum ``order`` times; each pass starts from ``initial``.

    Length is preserved, so ``difference(integrate(x, k), k)`` gives back
    ``x[k:]``; the first k values are absorbed into the starting conditions.
    """
    y = as_array(x).copy()
    if order < 0:
        raise DomainError("integration order must be non-negative")
    for _ in range(order):
        y = initial + np.cumsum(y)
    return y


# ------------------------------------------------------- special functions

def trigamma(z: float) -> float:
    if not z > 0:
        raise DomainError("trigamma needs z > 0")
    return float(special.polygamma(1, z))


def digamma(z: float) -> float:
    if not z > 0:
        raise DomainError("digamma needs z > 0")
    return float(special.digamma(z))


def log_gamma(z: float) -> float:
    return math.lgamma(z)


# ------------------------------------------------------------------- RNG

def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream_id).

    Philox with a 128-bit key made of the two integers: every stream is
    reproducible on its own, independently of how many other streams exist
    or in which order they are drawn.
    """
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(stream_id) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# -------------------------------------------------------------------- I/O

def read_series(path: Union[str, Path]) -> TimeSeries:
    """Read one real per line; blank lines and lines starting with ``#`` are skipped."""
    vals = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            v = float(s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{lineno}: non-finite value")
        vals.append(v)
    if not vals:
        raise DataError(f"{path}: no data")
    return TimeSeries(vals)


def format_series(x: ArrayLike) -> str:
    return "".join(f"{v!r}\n" for v in as_array(x).tolist())


def write_series(x: ArrayLike, path: Union[str, Path]) -> None:
    Path(path).write_text(format_series(x))
