"""Box-and-chain construction on A=[N] with cubes and with the log-shift maps.

Prints the convexity partition, the witness counts and the exact sizes of
both growth sets, next to the N^5/(W log N)^3 scale they are compared with.
"""

import sys

from sumprod.convexity import ConvexMap
from sumprod.expanders import cubic_instance, logshift_instance, main_expander_run
from sumprod.setops import RSet


def run(label: str, N: int) -> None:
    A = RSet(range(1, N + 1))
    if label == "cubic":
        X, h = cubic_instance(A)
        f = ConvexMap.power(3)
    else:
        X, h = logshift_instance(A)
        f = ConvexMap.logshift(1)
    rep = main_expander_run(X, f, f, h)
    print(f"{label:9s} N={N:3d} |X'|={len(X):3d} shifts={tuple(map(str, h))}")
    print(f"          W={rep.W} piece={rep.piece} core={rep.core_size}/{rep.half_size} boxes={len(rep.boxes.boxes)}")
    print(f"          witnesses {rep.cert1.count} / {rep.cert2.count}, lhs {rep.lhs1} / {rep.lhs2}")
    print(f"          product/scale = {rep.ratio:.3f}, verified={rep.verified}")


def main(argv=None) -> None:
    ns = [int(v) for v in (argv or sys.argv[1:])] or [8, 16, 24]
    for N in ns:
        run("cubic", N)
        run("log-shift", N)


if __name__ == "__main__":
    main()
