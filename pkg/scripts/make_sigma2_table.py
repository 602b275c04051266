"""Regenerate src/lrdest/data/sigma2_pool.txt (simulated Var log of pooled tapered ordinates)."""
import sys

from lrdest.asympvar import write_constants

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
pairs = [(p, tau) for p in range(1, 9) for tau in range(0, 9)]
write_constants(pairs, reps)
