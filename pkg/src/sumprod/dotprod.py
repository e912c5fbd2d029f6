"""Planar dot-product sets and an instrumented run of the few-dot-products argument.

Everything is exact.  Rotations are replaced by the quarter turn
``(x, y) -> (-y, x)``, which preserves every dot product, so no
irrational coordinates ever appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional

import numpy as np

from .exactnum import as_rat, format_rat, parse_rat
from .expanders import select_pairs
from .setops import RSet, SizeLimitError, evaluate_size

Point = tuple[Fraction, Fraction]

DEFAULT_C = Fraction(1, 3057)
_I64_SAFE = 1 << 62
_BLOCK = 1 << 20


class PointSet:
    """A deduplicated, sorted set of rational points."""

    __slots__ = ("points",)

    def __init__(self, points: Iterable = ()):
        pts = {(as_rat(x), as_rat(y)) for x, y in points}
        self.points: tuple[Point, ...] = tuple(sorted(pts))

    @classmethod
    def from_text(cls, text: str) -> "PointSet":
        pts = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'x y', got {line!r}")
            pts.append((parse_rat(parts[0]), parse_rat(parts[1])))
        return cls(pts)

    def to_text(self) -> str:
        return "".join(f"{format_rat(x)} {format_rat(y)}\n" for x, y in self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return (as_rat(p[0]), as_rat(p[1])) in set(self.points)

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and self.points == other.points

    def __hash__(self) -> int:
        return hash(self.points)

    def __repr__(self) -> str:
        return f"PointSet({[(format_rat(x), format_rat(y)) for x, y in self.points]})"

    @property
    def has_origin(self) -> bool:
        return (0, 0) in set(self.points)

    def without_origin(self) -> "PointSet":
        return PointSet(p for p in self.points if p != (0, 0))

    def quarter_turn(self) -> "PointSet":
        return PointSet((-y, x) for x, y in self.points)


@dataclass(frozen=True, order=True)
class Slope:
    """Direction ``(dy : dx)`` of a line through the origin: coprime, ``dx > 0``, vertical is ``(1 : 0)``."""

    dy: int
    dx: int

    @classmethod
    def of(cls, x, y) -> "Slope":
        x, y = as_rat(x), as_rat(y)
        if x == 0 and y == 0:
            raise ValueError("the origin has no slope")
        den = math.lcm(x.denominator, y.denominator)
        a, b = int(x * den), int(y * den)
        g = math.gcd(a, b)
        a, b = a // g, b // g
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        return cls(b, a)

    @classmethod
    def from_value(cls, v) -> "Slope":
        v = as_rat(v)
        return cls(v.numerator, v.denominator)

    @property
    def vertical(self) -> bool:
        return self.dx == 0

    @property
    def value(self) -> Optional[Fraction]:
        return None if self.dx == 0 else Fraction(self.dy, self.dx)

    def __str__(self) -> str:
        return f"({self.dy}:{self.dx})"


def _dot(p: Point, q: Point) -> Fraction:
    return p[0] * q[0] + p[1] * q[1]


def _scaled(points) -> tuple[np.ndarray, np.ndarray, int]:
    """Integer coordinates over a common denominator ``D``."""
    den = reduce(math.lcm, (c.denominator for p in points for c in p), 1)
    xs = [int(p[0] * den) for p in points]
    ys = [int(p[1] * den) for p in points]
    bound = max((abs(v) for v in xs + ys), default=0)
    wide = 2 * bound * bound >= _I64_SAFE
    dtype = object if wide else np.int64
    return np.array(xs, dtype=dtype), np.array(ys, dtype=dtype), den


def dot_product_set(P: PointSet, Q: Optional[PointSet] = None) -> RSet:
    """``{p . q : p in P, q in Q}`` over ordered pairs, ``Q = P`` by default (self pairs included)."""
    if not len(P):
        raise ValueError("point set must be nonempty")
    Q = P if Q is None else Q
    pts = P.points + Q.points
    xs, ys, den = _scaled(pts)
    n = len(P)
    px, py, qx, qy = xs[:n], ys[:n], xs[n:], ys[n:]
    rows = max(1, _BLOCK // max(1, len(Q)))
    chunks = []
    for s in range(0, n, rows):
        block = px[s : s + rows, None] * qx[None, :] + py[s : s + rows, None] * qy[None, :]
        chunks.append(np.unique(block.ravel()))
    vals = np.unique(np.concatenate(chunks)) if chunks else np.array([], dtype=np.int64)
    d2 = den * den
    return RSet(Fraction(int(v), d2) for v in vals.tolist())


def origin_line_decomposition(P: PointSet) -> tuple[dict, bool]:
    """Points of ``P`` other than the origin grouped by the line through the origin they lie on.

    Returns ``(classes, has_origin)``; the origin lies on every line and is only flagged.
    """
    classes: dict = {}
    for p in P:
        if p == (0, 0):
            continue
        classes.setdefault(Slope.of(*p), []).append(p)
    return {k: tuple(v) for k, v in sorted(classes.items())}, P.has_origin


def perp_line_identity_check(P: PointSet, slope: Slope, p: Point) -> bool:
    """Distinct values ``p . q`` versus distinct lines perpendicular to ``slope`` through ``P``.

    Each perpendicular line is canonicalised as ``dx*x + dy*y = c`` with the
    reduced direction; the count is independent of where ``p`` sits on the line.
    """
    p = (as_rat(p[0]), as_rat(p[1]))
    if p == (0, 0):
        raise ValueError("p must not be the origin")
    if p not in P:
        raise ValueError("p must belong to P")
    if Slope.of(*p) != slope:
        raise ValueError("p does not lie on the given line")
    products = {_dot(p, q) for q in P}
    lines = set()
    for qx, qy in P:
        c = slope.dx * qx + slope.dy * qy
        lines.add((slope.dx, slope.dy, c))
    return len(products) == len(lines)


@dataclass(frozen=True)
class RichLines:
    slopes: tuple
    M: int
    point_count: int
    bound: Fraction

    @property
    def holds(self) -> bool:
        return len(self.slopes) * self.M >= self.bound


def dyadic_rich_lines(P: PointSet) -> RichLines:
    """Dyadic class of origin lines maximising ``|L'| * M``.

    Lines with ``2^(j-1) <= |l cap P| < 2^j`` form class ``j``; ``M`` is the
    smallest richness in the class, so ``M <= |l cap P| <= 2M`` on it.  Ties
    go to the smaller ``M``.
    """
    if len(P) < 2:
        raise ValueError("need at least 2 points")
    classes, _ = origin_line_decomposition(P)
    levels: dict = {}
    for s, pts in classes.items():
        levels.setdefault(len(pts).bit_length(), []).append(s)
    best = None
    for j, slopes in levels.items():
        M = min(len(classes[s]) for s in slopes)
        key = (len(slopes) * M, -M)
        if best is None or key > best[0]:
            best = (key, tuple(sorted(slopes)), M)
    n = len(P) - (1 if P.has_origin else 0)
    bound = Fraction(n, 1 + math.ceil(math.log2(len(P))))
    if best is None:
        return RichLines((), 0, n, bound)
    return RichLines(best[1], best[2], n, bound)


@dataclass
class PipelineReport:
    """Exact record of one run; ``checks`` holds every verified claim."""

    applicable: bool
    reason: str = ""
    c: Fraction = DEFAULT_C
    turned: bool = False
    lines: int = 0
    rich: Optional[RichLines] = None
    p_prime_size: int = 0
    X: Optional[RSet] = None
    x0: Optional[Fraction] = None
    lines_at_x0: int = 0
    S: Optional[RSet] = None
    s: Optional[Fraction] = None
    s_prime: Optional[Fraction] = None
    Xs: Optional[RSet] = None
    Xs_prime: Optional[RSet] = None
    a: Optional[Fraction] = None
    Z: Optional[RSet] = None
    ratio_set_size: int = 0
    lambda_size: int = 0
    lambda1: int = 0
    lambda2: int = 0
    lambda3: int = 0
    sp_size: Optional[int] = None
    checks: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.applicable and all(self.checks.values())

    def to_json(self) -> dict:
        def rs(x):
            return None if x is None else [format_rat(v) for v in x]

        def r(x):
            return None if x is None else format_rat(x)

        out = {"applicable": self.applicable, "c": format_rat(self.c)}
        if not self.applicable:
            out["reason"] = self.reason
            return out
        out.update(
            {
                "quarter_turn": self.turned,
                "lines": self.lines,
                "rich_lines": [str(s) for s in self.rich.slopes],
                "M": self.rich.M,
                "p_prime_size": self.p_prime_size,
                "X_size": len(self.X),
                "x0": r(self.x0),
                "lines_at_x0": self.lines_at_x0,
                "S": rs(self.S),
                "s": r(self.s),
                "s_prime": r(self.s_prime),
                "X(s)": rs(self.Xs),
                "X(s')": rs(self.Xs_prime),
                "a": r(self.a),
                "Z": rs(self.Z),
                "ratio_set_size": self.ratio_set_size,
                "lambda_size": self.lambda_size,
                "lambda1": self.lambda1,
                "lambda2": self.lambda2,
                "lambda3": self.lambda3,
                "sp_size": self.sp_size,
                "checks": dict(self.checks),
                "verified": self.verified,
            }
        )
        return out


def _inapplicable(rep: PipelineReport, reason: str) -> PipelineReport:
    rep.applicable = False
    rep.reason = reason
    return rep


def _dots(pairs) -> set:
    return {_dot(p, q) for p, q in pairs}


def pipeline_run(P: PointSet, c=DEFAULT_C, *, sp_cap: Optional[int] = 10**6) -> PipelineReport:
    """Instrument the few-dot-products argument on a concrete point set.

    Rich lines are chosen dyadically; if most of them have negative slope the
    whole set is quarter-turned.  Lines of nonnegative slope in the rich class
    carry ``P'``.  A column ``x = x0`` meeting the most of them gives the
    slope set ``S`` (positive slopes only), from which two close slopes
    ``s, s'`` are taken.  The dilate ``a`` maximising ``|X(s) cap aX(s')|``
    gives ``Z``, and the three dot-product families built from these sets are
    checked element by element against the full dot-product set.
    ``sp_cap`` bounds the optional size of ``(sS+1)^(4)(s'S+1)^(4)``.
    """
    c = as_rat(c)
    if not len(P):
        return PipelineReport(False, "empty point set", c)
    lam = dot_product_set(P)
    rep = PipelineReport(True, c=c)
    rep.lambda_size = len(lam)
    checks = rep.checks
    checks["quarter_turn_invariant"] = dot_product_set(P.quarter_turn()) == lam

    work = P
    classes, _ = origin_line_decomposition(work)
    if len(work.without_origin()) < 2:
        return _inapplicable(rep, "fewer than two points off the origin")
    rich = dyadic_rich_lines(work)
    pos = sum(1 for s in rich.slopes if not s.vertical and s.dy > 0)
    neg = sum(1 for s in rich.slopes if not s.vertical and s.dy < 0)
    if neg > pos:
        work = work.quarter_turn()
        rep.turned = True
        classes, _ = origin_line_decomposition(work)
        rich = dyadic_rich_lines(work)
    rep.lines = len(classes)
    rep.rich = rich
    checks["rich_pigeonhole"] = rich.holds
    kept = [s for s in rich.slopes if not s.vertical and s.dy >= 0]
    if sum(1 for s in kept if s.dy > 0) < 2:
        return _inapplicable(rep, "fewer than two positive-slope rich lines")
    p_prime = [p for s in kept for p in classes[s]]
    rep.p_prime_size = len(p_prime)
    X = RSet(p[0] for p in p_prime)
    rep.X = X

    # the x-axis point gives |X| distinct products with P'
    axis = next((p for p in classes.get(Slope(0, 1), ()) if p[0] != 0), (Fraction(1), Fraction(0)))
    checks["axis_bijection"] = len({_dot(axis, q) for q in p_prime}) == len(X)

    at: dict = {}
    for s in kept:
        for p in classes[s]:
            at.setdefault(p[0], []).append(s)
    x0 = min(X, key=lambda x: (-len(at[x]), x))
    rep.x0 = x0
    rep.lines_at_x0 = len(at[x0])
    checks["column_pigeonhole"] = rep.lines_at_x0 * len(X) >= len(p_prime)
    S = RSet(s.value for s in at[x0] if s.dy > 0)
    rep.S = S
    if len(S) < 2:
        return _inapplicable(rep, "fewer than two positive slopes through the chosen column")
    if len(S) == 2:
        s, sp = S.elements
    else:
        near, _ = select_pairs(S, "multiplicative")
        s, sp = near.lo, near.hi
    rep.s, rep.s_prime = s, sp
    on_s = classes[Slope.from_value(s)]
    on_sp = classes[Slope.from_value(sp)]
    Xs = RSet(p[0] for p in on_s)
    Xsp = RSet(p[0] for p in on_sp)
    rep.Xs, rep.Xs_prime = Xs, Xsp

    counts: dict = {}
    for x in Xs:
        for y in Xsp:
            r = x / y
            counts[r] = counts.get(r, 0) + 1
    rep.ratio_set_size = len(counts)
    a = min(counts, key=lambda r: (-counts[r], r))
    rep.a = a
    Z = RSet(x for x in Xs if x / a in Xsp)
    rep.Z = Z
    checks["Z_size"] = len(Z) == counts[a]
    checks["Z_pigeonhole"] = len(Z) * len(counts) >= len(Xs) * len(Xsp)

    lam1 = _dots(((x, s * x), (y, sp * y)) for x in Xs for y in Xsp)
    lam2 = _dots(((x, s * x), (x0, t * x0)) for x in Z for t in S)
    lam3 = _dots(((x / a, sp * x / a), (x0, t * x0)) for x in Z for t in S)
    rep.lambda1, rep.lambda2, rep.lambda3 = len(lam1), len(lam2), len(lam3)
    checks["lambda1_identity"] = len(lam1) == evaluate_size("X*Y", {"X": Xs, "Y": Xsp})
    checks["lambda2_identity"] = len(lam2) == evaluate_size("Z*(1+s*S)", {"Z": Z, "s": s, "S": S})
    checks["lambda3_identity"] = len(lam3) == evaluate_size("Z*(1+s*S)", {"Z": Z, "s": sp, "S": S})
    checks["lambda1_in_lambda"] = all(v in lam for v in lam1)
    checks["lambda2_in_lambda"] = all(v in lam for v in lam2)
    checks["lambda3_in_lambda"] = all(v in lam for v in lam3)
    checks["aim"] = max(len(lam2), len(lam3)) <= len(lam)
    if sp_cap is not None:
        try:
            rep.sp_size = evaluate_size(
                "(s*S+1)^(4)*(w*S+1)^(4)", {"S": S, "s": s, "w": sp}, max_set_size=sp_cap
            )
        except SizeLimitError:
            rep.sp_size = None
    return rep
