"""Estimation of the memory parameter d of long-range dependent time series.

Fourier side: log-periodogram regression (GPH) and local Whittle (LWF) on
differenced, tapered and pooled periodograms.  Wavelet side: log-regression
(LRW) and local Whittle (LWW) on boundary-free Daubechies coefficients,
with exact asymptotic variances.  Exact Gaussian simulators and a
Monte-Carlo bench are included.
"""
from .core import (ConditioningError, DataError, DegenerateInputError, DomainError, EmbeddingError,
                   InadmissibleError, InsufficientDataError, LengthError, LrdError, NonConvergenceError,
                   RankError, TimeSeries, UnsupportedError, difference, integrate, read_series, rng_stream,
                   write_series)
from .estimate import EstimateResult, confidence_interval, gph, lrw, lwf, lww
from .fourier import pool, tapered_periodogram
from .simulate import ModelSpec, generate
from .wavelet import daubechies, parse_wavelet, pyramid

__version__ = "0.1.0"

__all__ = [
    "ConditioningError", "DataError", "DegenerateInputError", "DomainError", "EmbeddingError",
    "InadmissibleError", "InsufficientDataError", "LengthError", "LrdError", "NonConvergenceError",
    "RankError", "TimeSeries", "UnsupportedError", "difference", "integrate", "read_series", "rng_stream",
    "write_series", "EstimateResult", "confidence_interval", "gph", "lrw", "lwf", "lww", "pool",
    "tapered_periodogram", "ModelSpec", "generate", "daubechies", "parse_wavelet", "pyramid",
]
