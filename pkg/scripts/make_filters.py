"""Regenerate src/lrdest/_filters.py (needs mpmath)."""
from pathlib import Path

import mpmath as mp

mp.mp.dps = 60


def daub(M):
    # z^{M-1} P(y(z)) with P(y) = sum_k C(M-1+k, k) y^k and y = (2 - z - 1/z)/4
    poly = [mp.mpf(0)] * (2 * M - 1)
    for k in range(M):
        c = mp.binomial(M - 1 + k, k)
        base = [mp.mpf(1)]
        for _ in range(k):
            new = [mp.mpf(0)] * (len(base) + 2)
            for i, b in enumerate(base):
                new[i] -= b / 4
                new[i + 1] += b / 2
                new[i + 2] -= b / 4
            base = new
        for i, b in enumerate(base):
            poly[i + M - 1 - k] += c * b
    roots = []
    if M > 1:
        roots = mp.polyroots(list(reversed(poly)), maxsteps=500, extraprec=400)
        roots = [r for r in roots if abs(r) < 1]
    h = [mp.mpc(1)]
    for _ in range(M):
        h = [a + b for a, b in zip(h + [0], [0] + h)]
    for r in roots:
        h = [a - r * b for a, b in zip([0] + h, h + [0])]
    h = [mp.re(x) for x in h]
    s = sum(h)
    return [x * mp.sqrt(2) / s for x in h][::-1]


def main():
    out = ['"""Daubechies scaling filters, M = 1..10 vanishing moments.', '',
           'Obtained by spectral factorization of the Daubechies polynomial in 60-digit',
           'arithmetic (minimum-phase roots), normalized so the taps sum to sqrt(2),',
           'then rounded to the nearest double.  Regenerate with scripts/make_filters.py.',
           '"""', '', 'LOWPASS = {']
    for M in range(1, 11):
        out.append(f"    {M}: (")
        out.extend(f"        {float(x)!r}," for x in daub(M))
        out.append("    ),")
    out.append("}")
    target = Path(__file__).resolve().parents[1] / "src" / "lrdest" / "_filters.py"
    target.write_text("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
