"""Time the numba kernels against their numpy counterparts.

Run with ``python benchmarks/bench_kernels.py [--n 65536] [--repeat 20]``.
Both paths are imported directly, so the flag ``LRDEST_DISABLE_NUMBA`` does
not matter here; when numba is unavailable only the numpy timings print.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from lrdest import _kernels
from lrdest.wavelet import daubechies


def _time(fn, repeat: int) -> float:
    fn()  # warm-up (includes JIT compilation)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1 << 16, help="series length / grid size")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--M", type=int, default=4, help="vanishing moments of the Daubechies filter")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    x = rng.standard_normal(args.n)
    w = daubechies(args.M)
    lo, hi = np.ascontiguousarray(w.lowpass), np.ascontiguousarray(w.highpass)
    omega = rng.uniform(0, 2 * np.pi, args.n)

    cases = {
        "analysis_step": (lambda: _kernels.analysis_step_np(x, lo, hi),
                          (lambda: _kernels._analysis_step_nb(x, lo, hi)) if _kernels.HAVE_NUMBA else None),
        "trigpoly": (lambda: _kernels.trigpoly_np(lo, omega),
                     (lambda: _kernels._trigpoly_nb(lo, omega)) if _kernels.HAVE_NUMBA else None),
    }
    print(f"n={args.n} wavelet=db{args.M} numba={'yes' if _kernels.HAVE_NUMBA else 'no'}")
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (f_np, f_nb) in cases.items():
        t_np = _time(f_np, args.repeat) * 1e3
        if f_nb is None:
            print(f"{name:<16}{t_np:>12.3f}{'-':>12}{'-':>10}")
            continue
        # agreement check before timing
        a, b = f_np(), f_nb()
        if isinstance(a, tuple):
            ok = all(np.allclose(u, v, rtol=1e-12, atol=1e-12) for u, v in zip(a, b))
        else:
            ok = np.allclose(a, b, rtol=1e-12, atol=1e-12)
        if not ok:
            raise SystemExit(f"{name}: numba and numpy results differ")
        t_nb = _time(f_nb, args.repeat) * 1e3
        print(f"{name:<16}{t_np:>12.3f}{t_nb:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
