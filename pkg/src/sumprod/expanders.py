"""Witness-producing constructions for sum/product expanders.

Every construction returns a :class:`WitnessCert`: explicit elements of a
target set, each with the interval that locates it, a combinatorial
guaranteed count, and a verdict obtained by re-evaluating the target.

Maps of the ``logshift`` kind work in the multiplicative group: a point
``x > 0`` shifted by ``z`` maps to ``z*x + 1``, sums become products and
differences become ratios.  Polynomial maps work additively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .convexity import ConvexMap, ConvexityError, certify_convex, w_partition
from .exactnum import as_rat, format_rat
from .setops import (
    RSet,
    SetExpr,
    SizeLimitError,
    evaluate_view,
    evaluate_size,
    parse_expr,
    to_text,
)


class HypothesisError(ValueError):
    """A construction's precondition failed; ``check`` names which one."""

    def __init__(self, check: str, message: str, witness=None):
        super().__init__(f"{check}: {message}")
        self.check = check
        self.witness = witness


# ---------------------------------------------------------------------------
# groups


class _Group:
    def __init__(self, name: str):
        self.name = name
        self.mult = name == "multiplicative"

    def op(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b if self.mult else a + b

    def gap(self, a: Fraction, b: Fraction) -> Fraction:
        """``b - a`` or ``b / a``."""
        return b / a if self.mult else b - a

    def combine_text(self, p: str, q: str, r: str) -> str:
        return f"{p}*{q}/{r}" if self.mult else f"{p}+{q}-{r}"


ADDITIVE = _Group("additive")
MULTIPLICATIVE = _Group("multiplicative")


def _group_of(f: ConvexMap) -> _Group:
    return MULTIPLICATIVE if f.is_multiplicative else ADDITIVE


# ---------------------------------------------------------------------------
# shift pairs


@dataclass(frozen=True)
class ShiftPair:
    lo: Fraction
    hi: Fraction
    flavor: str = "additive"

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rat(self.lo))
        object.__setattr__(self, "hi", as_rat(self.hi))
        if self.flavor not in ("additive", "multiplicative"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if not self.lo < self.hi:
            raise ValueError("shift pair needs lo < hi")
        if self.flavor == "multiplicative" and self.lo <= 0:
            raise ValueError("multiplicative shift pair needs 0 < lo")

    @property
    def width(self) -> Fraction:
        return self.hi / self.lo if self.flavor == "multiplicative" else self.hi - self.lo

    def to_json(self) -> dict:
        return {"lo": format_rat(self.lo), "hi": format_rat(self.hi), "flavor": self.flavor}


def select_pairs(A: RSet, flavor: str = "additive") -> tuple[ShiftPair, ShiftPair]:
    """Nearest and second nearest consecutive pairs of ``A``.

    The nearest pair minimises the gap (difference, or ratio for the
    multiplicative flavor).  The second minimises it over the remaining
    consecutive pairs, so any strictly closer consecutive pair is the
    nearest one.  Ties go to the smaller left endpoint.
    """
    xs = A.elements
    if len(xs) < 3:
        raise ValueError("need at least 3 elements")
    group = MULTIPLICATIVE if flavor == "multiplicative" else ADDITIVE
    if group.mult and xs[0] <= 0:
        raise ValueError("multiplicative flavor needs positive elements")
    ranked = sorted(range(len(xs) - 1), key=lambda i: (group.gap(xs[i], xs[i + 1]), xs[i]))
    a, b = ranked[0], ranked[1]
    return (
        ShiftPair(xs[a], xs[a + 1], group.name),
        ShiftPair(xs[b], xs[b + 1], group.name),
    )


def every_second(A: RSet) -> RSet:
    """Elements with even index ``b_2 < b_4 < ...`` (1-based)."""
    return RSet._trusted(A.elements[1::2])


def _min_gap(xs: Sequence[Fraction], group: _Group) -> tuple[Optional[Fraction], int]:
    best, where = None, -1
    for i in range(len(xs) - 1):
        g = group.gap(xs[i], xs[i + 1])
        if best is None or g < best:
            best, where = g, i
    return best, where


def _check_spacing(xs, width: Fraction, group: _Group, label: str) -> None:
    g, i = _min_gap(xs, group)
    if g is not None and g < width:
        raise HypothesisError(
            "spacing",
            f"consecutive gap {format_rat(g)} at index {i + 1} is below the shift width {format_rat(width)} ({label})",
            i + 1,
        )


# ---------------------------------------------------------------------------
# certificates


def _in_interval(e: Fraction, loc) -> bool:
    lo, hi = loc
    return lo < e <= hi


@dataclass
class WitnessCert:
    """Explicit elements of ``target`` with locating intervals ``(lo, hi]``."""

    target: SetExpr
    witnesses: list
    guaranteed_count: int
    verified: bool = False
    checks: dict = field(default_factory=dict)
    label: str = ""

    @property
    def count(self) -> int:
        return len(self.witnesses)

    def verify(self, target_set: RSet) -> bool:
        elems = [e for e, _ in self.witnesses]
        self.checks["distinct"] = len(set(elems)) == len(elems)
        self.checks["membership"] = all(e in target_set for e in elems)
        self.checks["located"] = all(_in_interval(e, loc) for e, loc in self.witnesses)
        locs = sorted(set(loc for _, loc in self.witnesses))
        self.checks["locators_disjoint"] = all(
            a[1] <= b[0] for a, b in zip(locs, locs[1:])
        )
        self.checks["count"] = len(elems) >= self.guaranteed_count
        self.verified = all(self.checks.values())
        return self.verified

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "target": to_text(self.target),
            "witnesses": [
                {"element": format_rat(e), "locator": [format_rat(loc[0]), format_rat(loc[1])]}
                for e, loc in self.witnesses
            ],
            "count": self.count,
            "guaranteed_count": self.guaranteed_count,
            "checks": dict(self.checks),
            "verified": self.verified,
        }


# ---------------------------------------------------------------------------
# squeezing


def _require_cert(f: ConvexMap, lo, hi, group: _Group):
    if group.mult:
        return certify_convex(f).require()
    try:
        return certify_convex(f, (lo, hi)).require()
    except ConvexityError as exc:
        raise HypothesisError("convexity", str(exc), exc.witness) from None


def squeeze_witnesses(A: RSet, f: ConvexMap, h: ShiftPair, *, max_set_size=None) -> WitnessCert:
    """Elements of ``f(A+h) + f(A+h') - f(A+h)`` found by nesting the shift intervals.

    For a convex map the image intervals ``(f(b_j+h), f(b_j+h')]`` grow
    with ``j``, so for every ``i < j`` the element
    ``f(b_j+h) + f(b_i+h') - f(b_i+h)`` lies in the ``j``-th one.  A concave
    map reverses the roles of ``i`` and ``j``.  The count is exactly
    ``N(N-1)/2``.
    """
    group = _group_of(f)
    if (h.flavor == "multiplicative") != group.mult:
        raise ValueError("shift flavor does not match the map")
    xs = A.elements
    _check_spacing(xs, h.width, group, "squeeze")
    if xs:
        cert = _require_cert(f, xs[0] + h.lo, xs[-1] + h.hi, group)
        convex = cert.orientation == "convex"
    else:
        convex = True
    lows = [f.act(b, h.lo) for b in xs]
    highs = [f.act(b, h.hi) for b in xs]
    incs = [group.gap(u, v) for u, v in zip(lows, highs)]
    out = []
    n = len(xs)
    for j in range(n):
        for i in range(j):
            host, guest = (j, i) if convex else (i, j)
            out.append((group.op(lows[host], incs[guest]), (lows[host], highs[host])))
    target = parse_expr(group.combine_text("P", "Q", "P"))
    bindings = {"P": RSet(lows), "Q": RSet(highs)}
    wc = WitnessCert(target, out, n * (n - 1) // 2, label="squeeze")
    wc.verify(evaluate_view(target, bindings, max_set_size=max_set_size))
    return wc


# ---------------------------------------------------------------------------
# gap decomposition


@dataclass(frozen=True)
class GapDecomposition:
    """Consecutive gaps grouped by multiplicity, with the chosen dyadic level.

    ``classes[d]`` lists the 1-based indices ``i`` with gap ``d`` between
    ``x_i`` and ``x_{i+1}``.  ``chosen`` holds the gaps whose multiplicity
    ``r`` satisfies ``L/2 < r <= L`` (``r = 1`` sits at level ``L = 1``).
    """

    source_size: int
    gaps: RSet
    multiplicity: dict
    classes: dict
    level: int
    chosen: RSet

    @property
    def m(self) -> int:
        return len(self.chosen)

    @property
    def mL(self) -> int:
        return self.m * self.level

    def pigeonhole_bound(self) -> Fraction:
        n = self.source_size
        return Fraction(n - 1, 1 + math.ceil(math.log2(n))) if n > 1 else Fraction(0)

    def check(self) -> bool:
        L = self.level
        ok = all(Fraction(L, 2) <= self.multiplicity[d] <= L for d in self.chosen)
        return ok and self.mL >= self.pigeonhole_bound()

    def to_json(self) -> dict:
        return {
            "N": self.source_size,
            "gaps": {format_rat(d): self.multiplicity[d] for d in self.gaps},
            "L": self.level,
            "chosen": [format_rat(d) for d in self.chosen],
            "m": self.m,
        }


def _level_of(r: int) -> int:
    return 1 << (r - 1).bit_length()


def _decompose(xs: Sequence[Fraction], group: _Group) -> GapDecomposition:
    classes: dict = {}
    for i in range(len(xs) - 1):
        classes.setdefault(group.gap(xs[i], xs[i + 1]), []).append(i + 1)
    mult = {d: len(v) for d, v in classes.items()}
    by_level: dict = {}
    for d, r in mult.items():
        by_level.setdefault(_level_of(r), []).append(d)
    # maximise m*L, ties to the smaller level
    best = max((len(v) * L for L, v in by_level.items()), default=0)
    level = min(L for L, v in by_level.items() if len(v) * L == best) if by_level else 1
    return GapDecomposition(
        len(xs),
        RSet(mult),
        mult,
        {d: tuple(v) for d, v in classes.items()},
        level,
        RSet(by_level.get(level, [])),
    )


def gap_decompose(X: RSet, flavor: str = "additive") -> GapDecomposition:
    """Dyadic pigeonholing of the consecutive gaps of ``X``."""
    if len(X) < 2:
        raise ValueError("need at least 2 elements")
    group = MULTIPLICATIVE if flavor == "multiplicative" else ADDITIVE
    return _decompose(X.elements, group)


# ---------------------------------------------------------------------------
# two-dimensional growth from one convex chain


def _expansion2_core(xs, ys, group: _Group, dec: Optional[GapDecomposition] = None):
    """Witness lists for ``X+X-X`` and ``F(X)+F(X)-F(X)`` on a convex chain.

    ``xs`` increasing, ``ys[i] = F(xs[i])`` with ``F`` strictly monotone and
    strictly convex or concave.  Returns ``(first, second, dec, floor1, floor2)``.
    """
    if len(xs) < 2:
        return [], [], None, 0, 0
    dec = dec or _decompose(xs, group)
    chosen = dec.chosen.elements
    first = []
    for rank, dprime in enumerate(chosen):
        for i in dec.classes[dprime]:
            loc = (xs[i - 1], xs[i])
            for d in chosen[: rank + 1]:
                first.append((group.op(xs[i - 1], d), loc))
    floor1 = sum((j + 1) * len(dec.classes[d]) for j, d in enumerate(chosen))
    second = []
    floor2 = 0
    for d in chosen:
        idx = dec.classes[d]
        r = len(idx)
        floor2 += r * (r - 1) // 2
        lens = {i: group.gap(ys[i - 1], ys[i]) for i in idx}
        for i in idx:
            loc = (ys[i - 1], ys[i]) if ys[i - 1] < ys[i] else (ys[i], ys[i - 1])
            for j in idx:
                if lens[j] < lens[i]:
                    second.append((group.op(ys[i - 1], lens[j]), loc))
    return first, second, dec, floor1, floor2


def expansion2_witnesses(
    X: RSet, F: ConvexMap, *, max_set_size=None
) -> tuple[WitnessCert, WitnessCert]:
    """Certificates for ``X+X-X`` and ``F(X)+F(X)-F(X)`` inside ``(x_1, x_N]``.

    The first has at least ``sum_j j*|I_{d_j}|`` elements over the chosen
    gaps ``d_1 < ... < d_m``; the second one element per gap class ``d``
    and ordered pair ``i, j`` of its indices with a shorter image interval
    at ``j`` than at ``i``.
    """
    group = _group_of(F)
    xs = X.elements
    if xs:
        _require_cert(F, xs[0], xs[-1], group)
    ys = [F(x) for x in xs]
    first, second, _, floor1, floor2 = _expansion2_core(xs, ys, group)
    t1 = parse_expr(group.combine_text("X", "X", "X"))
    t2 = parse_expr(group.combine_text("FX", "FX", "FX"))
    c1 = WitnessCert(t1, first, floor1, label="expansion-first")
    c2 = WitnessCert(t2, second, floor2, label="expansion-second")
    c1.verify(evaluate_view(t1, {"X": X}, max_set_size=max_set_size))
    c2.verify(evaluate_view(t2, {"FX": RSet(ys)}, max_set_size=max_set_size))
    return c1, c2


# ---------------------------------------------------------------------------
# boxes


@dataclass
class BoxReport:
    """Boxes ``B_{k1,k2}`` for ``k > N/2`` and the points placed in them by ``j <= N/2``."""

    boxes: dict
    points: dict
    disjoint: bool
    overlap: Optional[tuple]
    contained: bool
    in_target: bool

    @property
    def verified(self) -> bool:
        return self.disjoint and self.contained and self.in_target

    def to_json(self) -> dict:
        def iv(p):
            return [format_rat(p[0]), format_rat(p[1])]

        return {
            "boxes": [
                {"k": list(k), "x": iv(b[0]), "y": iv(b[1]), "points": len(self.points[k])}
                for k, b in sorted(self.boxes.items())
            ],
            "disjoint": self.disjoint,
            "overlap": None if self.overlap is None else [list(k) for k in self.overlap],
            "contained": self.contained,
            "in_target": self.in_target,
            "verified": self.verified,
        }


def _box_indices(n: int) -> tuple[list[int], list[int]]:
    ks = [k for k in range(1, n + 1) if 2 * k > n]
    js = [j for j in range(1, n + 1) if 2 * j <= n]
    if n == 1:
        js = []
    return ks, js


def _first_overlap(intervals: dict) -> Optional[tuple]:
    items = sorted(intervals.items(), key=lambda kv: kv[1])
    for (ka, a), (kb, b) in zip(items, items[1:]):
        if b[0] < a[1]:
            return ka, kb
    return None


def _shift_values(A: RSet, f: ConvexMap, h, hp):
    group = _group_of(f)
    lows = [f.act(a, h) for a in A]
    highs = [f.act(a, hp) for a in A]
    return lows, highs, [group.gap(u, v) for u, v in zip(lows, highs)]


def box_witnesses(
    A: RSet,
    f1: ConvexMap,
    f2: ConvexMap,
    h: tuple,
    *,
    check_spacing: bool = True,
    max_set_size=None,
) -> BoxReport:
    """Place the squeezed points into the boxes and verify disjointness.

    ``check_spacing=False`` skips the spacing precondition so that a
    violating input reaches the disjointness check (negative control).
    """
    group = _group_of(f1)
    if _group_of(f2) is not group:
        raise ValueError("maps must act in the same group")
    h1, h1p, h2, h2p = (as_rat(v) for v in h)
    width = max(group.gap(h1, h1p), group.gap(h2, h2p))
    xs = A.elements
    if check_spacing:
        _check_spacing(xs, width, group, "boxes")
        if xs:
            _require_cert(f1, xs[0] + h1, xs[-1] + h1p, group)
            _require_cert(f2, xs[0] + h2, xs[-1] + h2p, group)
    lo1, hi1, g1 = _shift_values(A, f1, h1, h1p)
    lo2, hi2, g2 = _shift_values(A, f2, h2, h2p)
    ks, js = _box_indices(len(xs))
    xint = {k: (lo1[k - 1], hi1[k - 1]) for k in ks}
    yint = {k: (lo2[k - 1], hi2[k - 1]) for k in ks}
    boxes = {(k1, k2): (xint[k1], yint[k2]) for k1 in ks for k2 in ks}
    points = {
        (k1, k2): [
            (group.op(lo1[k1 - 1], g1[j1 - 1]), group.op(lo2[k2 - 1], g2[j2 - 1]))
            for j1 in js
            for j2 in js
        ]
        for k1, k2 in boxes
    }
    overlap = None
    ox = _first_overlap(xint)
    oy = _first_overlap(yint)
    if ox is not None:
        overlap = ((ox[0], ks[0]), (ox[1], ks[0]))
    elif oy is not None:
        overlap = ((ks[0], oy[0]), (ks[0], oy[1]))
    contained = all(
        _in_interval(p[0], boxes[k][0]) and _in_interval(p[1], boxes[k][1])
        for k, pts in points.items()
        for p in pts
    )
    t1 = parse_expr(group.combine_text("P", "Q", "P"))
    s1 = evaluate_view(t1, {"P": RSet(lo1), "Q": RSet(hi1)}, max_set_size=max_set_size)
    s2 = evaluate_view(t1, {"P": RSet(lo2), "Q": RSet(hi2)}, max_set_size=max_set_size)
    in_target = all(p[0] in s1 and p[1] in s2 for pts in points.values() for p in pts)
    return BoxReport(boxes, points, overlap is None, overlap, contained, in_target)


# ---------------------------------------------------------------------------
# the main superquadratic construction


def growth_target(group: _Group) -> SetExpr:
    """``2P - 2P + 2Q - Q`` in the group, with ``P = f(A+h)`` and ``Q = f(A+h')``."""
    if group.mult:
        return parse_expr("P^(2)*Q^(2)/(P^(2)*Q)")
    return parse_expr("P+P-P-P+Q+Q-Q")


@dataclass
class MainRunReport:
    N: int
    W: int
    partition: object
    boxes: BoxReport
    piece: int
    core_size: int
    half_size: int
    cert1: WitnessCert
    cert2: WitnessCert
    lhs1: int
    lhs2: int
    bound: Optional[float]
    ratio: Optional[float]
    checks: dict

    @property
    def verified(self) -> bool:
        return all(self.checks.values()) and self.cert1.verified and self.cert2.verified

    def to_json(self, witnesses: bool = False) -> dict:
        out = {
            "N": self.N,
            "W": self.W,
            "partition": self.partition.to_json(),
            "piece": self.piece,
            "core_size": self.core_size,
            "half_size": self.half_size,
            "boxes": {
                "count": len(self.boxes.boxes),
                "disjoint": self.boxes.disjoint,
                "contained": self.boxes.contained,
            },
            "lhs1": self.lhs1,
            "lhs2": self.lhs2,
            "bound": self.bound,
            "ratio": self.ratio,
            "checks": dict(self.checks),
            "verified": self.verified,
        }
        for name, c in (("cert1", self.cert1), ("cert2", self.cert2)):
            j = c.to_json()
            if not witnesses:
                j.pop("witnesses")
            out[name] = j
        return out


def main_expander_run(
    A: RSet,
    f1: ConvexMap,
    f2: ConvexMap,
    h: tuple,
    *,
    max_set_size=None,
    jobs: int = 1,
) -> MainRunReport:
    """Run the box-and-chain construction and measure both growth sets exactly.

    Checks spacing, map certificates and the W-partition, builds the boxes,
    restricts the first half of ``A`` to the partition piece holding most
    of it, and chains the two-dimensional construction inside every box.
    Because the chain only depends on the box through a translation, the
    witnesses factor into one certificate per coordinate.
    """
    group = _group_of(f1)
    if _group_of(f2) is not group:
        raise ValueError("maps must act in the same group")
    h1, h1p, h2, h2p = (as_rat(v) for v in h)
    xs = A.elements
    N = len(xs)
    if N < 1:
        raise HypothesisError("size", "A is empty")
    if group.mult and xs[0] <= 0:
        raise HypothesisError("positivity", "log-shift maps need positive points")
    _check_spacing(xs, max(group.gap(h1, h1p), group.gap(h2, h2p)), group, "main")
    try:
        part = w_partition(f1, f2, (h1, h1p, h2, h2p), (xs[0], None))
    except ConvexityError as exc:
        raise HypothesisError("W-partition", str(exc), exc.witness) from None
    except ValueError as exc:
        raise HypothesisError("shifts", str(exc)) from None
    boxes = box_witnesses(A, f1, f2, (h1, h1p, h2, h2p), max_set_size=max_set_size)

    half = list(xs[: N // 2])
    counts = [0] * part.W
    for a in half:
        counts[part.piece_of(a)] += 1
    piece = max(range(part.W), key=lambda i: (counts[i], -i))
    core = [a for a in half if part.piece_of(a) == piece]

    lo1, hi1, g1 = _shift_values(A, f1, h1, h1p)
    lo2, hi2, g2 = _shift_values(A, f2, h2, h2p)
    core_g1 = [group.gap(f1.act(a, h1), f1.act(a, h1p)) for a in core]
    core_g2 = [group.gap(f2.act(a, h2), f2.act(a, h2p)) for a in core]
    ks, _ = _box_indices(N)
    dec = _decompose(core_g1, group) if len(core) >= 2 else None
    first_all, second_all = [], []
    floor1 = floor2 = 0
    for k in ks:
        xs_k = [group.op(lo1[k - 1], g) for g in core_g1]
        ys_k = [group.op(lo2[k - 1], g) for g in core_g2]
        # k indexes the x-box for the first chain and the y-box for the second
        first, second, _, f1c, f2c = _expansion2_core(xs_k, ys_k, group, dec)
        first_all += first
        second_all += second
        floor1 += f1c
        floor2 += f2c

    target = growth_target(group)
    b1 = {"P": RSet(lo1), "Q": RSet(hi1)}
    b2 = {"P": RSet(lo2), "Q": RSet(hi2)}
    s1 = evaluate_view(target, b1, max_set_size=max_set_size, jobs=jobs)
    s2 = evaluate_view(target, b2, max_set_size=max_set_size, jobs=jobs)
    c1 = WitnessCert(target, first_all, floor1, label="main-first")
    c2 = WitnessCert(target, second_all, floor2, label="main-second")
    c1.verify(s1)
    c2.verify(s2)

    checks = {
        "boxes_disjoint": boxes.disjoint,
        "boxes_contain_points": boxes.contained and boxes.in_target,
        "piece_pigeonhole": len(core) * part.W >= len(half),
        "chain_in_box_x": all(_owner(e, ks, lo1, hi1) is not None for e, _ in first_all),
        "chain_in_box_y": all(_owner(e, ks, lo2, hi2) is not None for e, _ in second_all),
    }
    bound = ratio = None
    if N >= 2:
        bound = N**5 / (part.W * math.log2(N)) ** 3
        ratio = len(s1) * len(s2) / bound
    return MainRunReport(
        N, part.W, part, boxes, piece, len(core), len(half), c1, c2, len(s1), len(s2), bound, ratio, checks
    )


def _owner(e: Fraction, ks, lows, highs) -> Optional[int]:
    for k in ks:
        if lows[k - 1] < e <= highs[k - 1]:
            return k
    return None


def cubic_instance(A: RSet) -> tuple[RSet, tuple]:
    """Even-index thinning of ``A`` with shifts from its nearest and second nearest pairs."""
    near, second = select_pairs(A, "additive")
    return every_second(A), (near.lo, near.hi, second.lo, second.hi)


def logshift_instance(X: RSet) -> tuple[RSet, tuple]:
    """Multiplicative analogue of :func:`cubic_instance` for positive ``X``."""
    near, second = select_pairs(X, "multiplicative")
    return every_second(X), (near.lo, near.hi, second.lo, second.hi)


# ---------------------------------------------------------------------------
# named quantities

PRODSHIFT_52 = "(z*X+1)^(2)*(w*X+1)^(2)/((z*X+1)^(2)*(w*X+1))"
QUADCOR = "(z*X+1)*(w*X+1)/(z*X+1)"
SP_33_16 = "(z*X+1)^(4)*(w*X+1)^(4)"
CUBES = "(a+X)^3+(a+X)^3+(w+X)^3+(w+X)^3-(a+X)^3-(a+X)^3-(w+X)^3"
PRODSHIFT_ALT = "(a+X)^(2)*(w+X)^(2)/((a+X)^(2)*(w+X))"
PRODSHIFT3 = "(X*X+1)*(X*X+1)*(X*X+1)"
TWO_VAR = "b*X+d*X"
QUAD = "(a+X)^2+(w+X)^2-(a+X)^2"
SQUARES_FACTOR = "(X+a)^2+(X+a)^2-(X+a)^2-(X+a)^2+(X+w)^2+(X+w)^2-(X+w)^2"
CUBES_FACTOR = "(X+a)^3+(X+a)^3-(X+a)^3-(X+a)^3+(X+w)^3+(X+w)^3-(X+w)^3"
COUNTEREXAMPLE = "(X+X)^2+(X+X)^2+(X+X)^2+(X+X)^2-(X+X)^2-(X+X)^2-(X+X)^2"

NAMED = {
    # name: (expression, pair source, exponent)
    "quad": (QUAD, "additive", Fraction(2)),
    "two-var": (TWO_VAR, "two-var", Fraction(2)),
    "quadcor": (QUADCOR, "multiplicative", Fraction(2)),
    "prodshift-5/2": (PRODSHIFT_52, "multiplicative", Fraction(5, 2)),
    "sp-33/16": (SP_33_16, "multiplicative", Fraction(33, 16)),
    "cubes": (CUBES, "additive", Fraction(5, 2)),
    "prodshift-alt": (PRODSHIFT_ALT, "additive", Fraction(5, 2)),
    "prodshift3": (PRODSHIFT3, None, Fraction(65, 32)),
    "squares-cubes": ((SQUARES_FACTOR, CUBES_FACTOR), "additive-nearest", Fraction(5)),
    "counterexample": (COUNTEREXAMPLE, None, Fraction(2)),
}


def _pair_candidates(X: RSet, source: Optional[str], mode: str) -> list[tuple]:
    xs = X.elements
    if source is None or len(xs) < 2:
        return [(xs[0], xs[0])] if source is not None and xs else [None]
    if mode == "exhaustive":
        return [(a, b) for a in xs for b in xs if a != b]
    if len(xs) == 2:
        return [(xs[0], xs[1])]
    flavor = "multiplicative" if source == "multiplicative" or source == "two-var" else "additive"
    if flavor == "multiplicative" and xs[0] <= 0:
        return []
    near, second = select_pairs(X, flavor)
    if source in ("additive-nearest", "two-var"):
        return [(near.lo, near.hi)]
    return [(near.lo, near.hi), (second.lo, second.hi)]


def _bind_pair(source: Optional[str], X: RSet, pair) -> dict:
    b: dict = {"X": X}
    if pair is None:
        return b
    p, q = pair
    if source == "two-var":
        b.update(b=p, d=q - p)
    elif source == "multiplicative":
        b.update(z=p, w=q)
    else:
        b.update(a=p, w=q)
    return b


def named_expanders(
    X: RSet,
    *,
    names: Optional[Sequence[str]] = None,
    mode: str = "constructive",
    max_set_size=None,
    max_pairs=None,
) -> dict:
    """Exact sizes of the named expander sets for ``X``.

    The constructive mode takes the largest value over the nearest and
    second nearest consecutive pairs; ``exhaustive`` scans all ordered
    pairs of distinct elements.  Each entry records the pair, the size,
    the exponent and ``size / |X|^exponent``, or the abort reason.
    """
    if mode not in ("constructive", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    out = {}
    n = len(X)
    for name in names or NAMED:
        expr, source, beta = NAMED[name]
        entry: dict = {"expr": expr if isinstance(expr, str) else " | ".join(expr), "exponent": str(beta)}
        best = None
        try:
            cands = _pair_candidates(X, source, mode)
            if not cands:
                entry["status"] = "inapplicable"
                out[name] = entry
                continue
            for pair in cands:
                b = _bind_pair(source, X, pair)
                if isinstance(expr, tuple):
                    size = 1
                    for e in expr:
                        size *= evaluate_size(e, b, max_set_size=max_set_size, max_pairs=max_pairs)
                else:
                    size = evaluate_size(expr, b, max_set_size=max_set_size, max_pairs=max_pairs)
                if best is None or size > best[0]:
                    best = (size, pair)
            entry["status"] = "ok"
            entry["size"] = best[0]
            entry["pair"] = None if best[1] is None else [format_rat(v) for v in best[1]]
            entry["ratio"] = best[0] / n ** float(beta) if n else None
        except SizeLimitError as exc:
            entry["status"] = "size-limit"
            entry["error"] = str(exc)
        except ZeroDivisionError as exc:
            entry["status"] = "inapplicable"
            entry["error"] = str(exc)
        out[name] = entry
    return out


def garaev_equality(B: RSet) -> tuple[int, int]:
    """``|b_max*B + d_min*B|`` and ``|B|^2`` for a set of positive integers."""
    if len(B) < 2:
        raise ValueError("need at least 2 elements")
    if not B.is_integral() or B.min() <= 0:
        raise ValueError("B must consist of positive integers")
    d = min(b - a for a, b in zip(B.elements, B.elements[1:]))
    size = evaluate_size("m*B+d*B", {"B": B, "m": B.max(), "d": d})
    return size, len(B) ** 2
