"""Nesting shifted intervals: how f(A+h) + f(A+h') - f(A+h) gets quadratically many elements.

Run with ``python3 demos/squeeze_tour.py``.
"""

from fractions import Fraction

from sumprod.convexity import ConvexMap
from sumprod.expanders import QUAD, ShiftPair, select_pairs, squeeze_witnesses
from sumprod.setops import RSet, evaluate_size


def main() -> None:
    A = RSet(range(1, 7))
    f = ConvexMap.power(2)
    h = ShiftPair(Fraction(0), Fraction(1, 2), "additive")
    cert = squeeze_witnesses(A, f, h)
    print(f"A = {list(map(str, A))}, f = t^2, h = ({h.lo}, {h.hi})")
    print("each interval (f(b_j), f(b_j + 1/2)] hosts one element per earlier b_i:")
    for e, (lo, hi) in cert.witnesses[:8]:
        print(f"  {str(e):>8}  in ({lo}, {hi}]")
    print(f"  ... {cert.count} witnesses, guaranteed {cert.guaranteed_count}, verified={cert.verified}")

    print("\nexact size of (a+A)^2 + (a'+A)^2 - (a+A)^2 on A=[N] with the nearest pair:")
    for N in (8, 16, 32, 64, 128):
        A = RSet(range(1, N + 1))
        near, _ = select_pairs(A)
        size = evaluate_size(QUAD, {"X": A, "a": near.lo, "w": near.hi})
        print(f"  N={N:4d}  size={size:7d}  size/N^2={size / N**2:.3f}  floor N(N-1)/2={N * (N - 1) // 2}")


if __name__ == "__main__":
    main()
