"""Convexity certificates for maps and for difference-of-shift curves.

A :class:`ConvexMap` is a strictly increasing, strictly convex (or
concave) map on a declared domain.  Polynomial kinds are certified by
exact sign analysis of the first two derivatives.  The ``logshift`` kind
stands for ``t -> log(z e^t + 1)``; it is never evaluated
transcendentally.  Shifting its argument by ``log w`` and exponentiating
gives the rational action ``x -> z*w*x + 1`` on ``x = e^t``, which is how
every set it feeds is computed.

:func:`w_partition` splits the domain of the curve
``t -> (f1(t+h1') - f1(t+h1), f2(t+h2') - f2(t+h2))`` into the fewest
pieces on which it is the graph of a strictly convex or strictly concave
function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactnum import (
    Cut,
    Poly,
    sign,
    as_rat,
    count_sign_changes,
    format_rat,
    isolate_real_roots,
    parse_rat,
    sign_on,
    squarefree_part,
)

Bound = Optional[Fraction]


class ConvexityError(ValueError):
    """A map or curve fails a convexity or graph requirement."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateCurveError(ConvexityError):
    pass


class NonGraphError(ConvexityError):
    pass


def _fmt_bound(b: Bound, inf: str) -> str:
    return inf if b is None else format_rat(b)


def _interior_point(lo: Bound, hi: Bound) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _region_points(p: Poly, lo: Bound, hi: Bound) -> list[Fraction]:
    """One non-root rational in ``[lo, hi]`` per sign region of ``p``."""
    roots = isolate_real_roots(p, lo, hi)
    if not roots:
        return [_interior_point(lo, hi)] if p(_interior_point(lo, hi)) != 0 else [
            _nonzero_near(p, lo, hi)
        ]
    return [roots[0][0]] + [b for _, b in roots]


def _nonzero_near(p: Poly, lo: Bound, hi: Bound) -> Fraction:
    t = _interior_point(lo, hi)
    step = Fraction(1, 2)
    while p(t) == 0:
        t = t + step if hi is None or t + step < hi else t - step
        step /= 2
    return t


def _wrong_sign_point(p: Poly, lo: Bound, hi: Bound, want: int) -> Optional[Fraction]:
    for t in _region_points(p, lo, hi):
        v = p(t)
        if (v > 0) - (v < 0) == -want:
            return t
    return None


@dataclass(frozen=True)
class ConvexityCertificate:
    """Outcome of :func:`certify_convex`.

    ``orientation`` is ``"convex"`` or ``"concave"`` when ``ok``.  A
    rejection carries a rational ``witness`` in the domain at which the
    first or second derivative has the wrong sign (``None`` if no rational
    point can be named, e.g. a non-positive log-shift scalar).
    """

    ok: bool
    orientation: Optional[str]
    domain: tuple[Bound, Bound]
    reason: str = ""
    witness: Optional[Fraction] = None

    def require(self) -> "ConvexityCertificate":
        if not self.ok:
            raise ConvexityError(self.reason, self.witness)
        return self

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "orientation": self.orientation,
            "domain": [_fmt_bound(self.domain[0], "-inf"), _fmt_bound(self.domain[1], "inf")],
            "reason": self.reason,
            "witness": None if self.witness is None else format_rat(self.witness),
        }


def _certify_poly(p: Poly, lo: Bound, hi: Bound) -> ConvexityCertificate:
    dom = (lo, hi)
    d1, d2 = p.derivative(), p.derivative(2)
    if d1.is_zero() or d2.is_zero():
        w = _interior_point(lo, hi)
        return ConvexityCertificate(False, None, dom, "map is affine on the domain", w)
    # isolated zeros of f' or f'' (even order) keep strict monotonicity/convexity
    n1, _ = count_sign_changes(d1, lo, hi)
    s1 = sign_on(d1, lo, hi)
    if n1 or s1 < 0:
        w = _wrong_sign_point(d1, lo, hi, +1)
        return ConvexityCertificate(False, None, dom, "first derivative is not positive", w)
    n2, _ = count_sign_changes(d2, lo, hi)
    if n2:
        w = _wrong_sign_point(d2, lo, hi, +1)
        return ConvexityCertificate(False, None, dom, "second derivative changes sign", w)
    orient = "convex" if sign_on(d2, lo, hi) > 0 else "concave"
    return ConvexityCertificate(True, orient, dom)


def _meet(a: Bound, b: Bound, pick) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    return pick(a, b)


@dataclass(frozen=True)
class ConvexMap:
    """A certified strictly increasing, strictly convex/concave map.

    Build with :meth:`power`, :meth:`cube_shift`, :meth:`polynomial`,
    :meth:`logshift` or :func:`parse_convex_map`.  Construction fails
    with :class:`ConvexityError` if the declared domain does not certify.
    """

    kind: str
    poly: Optional[Poly]
    domain: tuple[Bound, Bound]
    z: Fraction = Fraction(1)
    param: Optional[Fraction] = None
    certificate: ConvexityCertificate = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.certificate is None:
            object.__setattr__(self, "certificate", certify_convex(self, self.domain))
        self.certificate.require()

    @classmethod
    def power(cls, k: int) -> "ConvexMap":
        if k < 2:
            raise ValueError("monomial degree must be at least 2")
        return cls("pow", Poly.t() ** k, (Fraction(0), None), param=Fraction(k))

    @classmethod
    def cube_shift(cls, h) -> "ConvexMap":
        h = as_rat(h)
        return cls("cube-shift", Poly((h, 1)) ** 3, (-h, None), param=h)

    @classmethod
    def polynomial(cls, coeffs, lo=None, hi=None) -> "ConvexMap":
        lo = None if lo is None else as_rat(lo)
        hi = None if hi is None else as_rat(hi)
        return cls("poly", Poly(coeffs), (lo, hi))

    @classmethod
    def logshift(cls, z=1) -> "ConvexMap":
        return cls("logshift", None, (None, None), z=as_rat(z))

    @property
    def is_multiplicative(self) -> bool:
        return self.kind == "logshift"

    def act(self, x, shift) -> Fraction:
        """Image of the shifted point: ``f(x + shift)``, or ``z*shift*x + 1`` for log-shift."""
        x, shift = as_rat(x), as_rat(shift)
        if self.is_multiplicative:
            return self.z * shift * x + 1
        return self.poly(x + shift)

    def __call__(self, x) -> Fraction:
        if self.is_multiplicative:
            return self.act(x, 1)
        return self.poly(as_rat(x))

    def shifted(self, shift) -> Poly:
        """``t -> f(t + shift)`` as a polynomial (additive kinds only)."""
        if self.is_multiplicative:
            raise TypeError("log-shift maps act multiplicatively")
        return self.poly.shift(shift)

    def text(self) -> str:
        if self.kind == "pow":
            return f"pow:{self.param.numerator}"
        if self.kind == "cube-shift":
            return f"cube-shift:{format_rat(self.param)}"
        if self.kind == "logshift":
            return f"logshift:{format_rat(self.z)}"
        cs = ",".join(format_rat(c) for c in self.poly.coeffs)
        lo, hi = self.domain
        return f"poly:[{cs}]@({_fmt_bound(lo, '-inf')},{_fmt_bound(hi, 'inf')})"

    def __str__(self) -> str:
        return self.text()


_MAP_RE = re.compile(r"^\s*([a-z-]+)\s*:\s*(.*?)\s*$")
_POLY_RE = re.compile(r"^\[([^\]]*)\]\s*(?:@\s*\(\s*([^,]+?)\s*,\s*([^)]+?)\s*\))?$")


def _parse_bound(text: str) -> Bound:
    t = text.strip()
    if t in ("inf", "+inf", "-inf", "oo", "-oo"):
        return None
    return parse_rat(t)


def parse_convex_map(text: str) -> ConvexMap:
    """Parse ``pow:k``, ``cube-shift:h``, ``poly:[c0,c1,...]@(lo,hi)`` or ``logshift:z``."""
    m = _MAP_RE.match(text)
    if not m:
        raise ValueError(f"bad map spec {text!r}")
    kind, arg = m.groups()
    if kind == "pow":
        return ConvexMap.power(int(arg))
    if kind == "cube-shift":
        return ConvexMap.cube_shift(parse_rat(arg))
    if kind == "logshift":
        return ConvexMap.logshift(parse_rat(arg))
    if kind == "poly":
        pm = _POLY_RE.match(arg)
        if not pm:
            raise ValueError(f"bad polynomial map {arg!r}")
        coeffs = [parse_rat(c) for c in pm.group(1).split(",") if c.strip()]
        lo = _parse_bound(pm.group(2)) if pm.group(2) else None
        hi = _parse_bound(pm.group(3)) if pm.group(3) else None
        return ConvexMap.polynomial(coeffs, lo, hi)
    raise ValueError(f"unknown map kind {kind!r}")


def certify_convex(f: ConvexMap, domain=None) -> ConvexityCertificate:
    """Certify ``f' > 0`` and ``f''`` of one strict sign on ``domain``.

    ``domain`` is ``(lo, hi)`` with ``None`` for an infinite end; it
    defaults to the map's declared domain.  Zeros of ``f'`` or ``f''``
    that do not change sign are allowed.
    """
    lo, hi = f.domain if domain is None else domain
    lo = None if lo is None else as_rat(lo)
    hi = None if hi is None else as_rat(hi)
    if lo is not None and hi is not None and lo >= hi:
        raise ValueError("empty domain")
    if f.is_multiplicative:
        # d/dt log(z e^t + 1) = z e^t/(z e^t + 1), second derivative z e^t/(z e^t + 1)^2
        if f.z > 0:
            return ConvexityCertificate(True, "convex", (lo, hi))
        return ConvexityCertificate(False, None, (lo, hi), "log-shift scalar must be positive")
    return _certify_poly(f.poly, lo, hi)


# ---------------------------------------------------------------------------
# curves and W-partitions


def logshift_curvature_numerator(z1, z1p, z2, z2p) -> Poly:
    """Numerator of the curvature sign for the log-shift curve, in ``x = e^t``.

    With ``N_i(x) = (z_i x + 1)(z_i' x + 1)`` the slope is
    ``dy/dx = c * N_1/N_2`` for a positive constant ``c``, so the sign of
    ``d2y/dx2`` is the sign of ``N_1' N_2 - N_1 N_2'``.
    """
    z1, z1p, z2, z2p = map(as_rat, (z1, z1p, z2, z2p))
    n1 = Poly((1, z1)) * Poly((1, z1p))
    n2 = Poly((1, z2)) * Poly((1, z2p))
    return n1.derivative() * n2 - n1 * n2.derivative()


@dataclass(frozen=True)
class ConvexityPartition:
    """Pieces ``(c_{i-1}, c_i]`` of the domain, cut where the curve changes convexity or folds.

    ``cuts`` are :class:`Cut` points strictly inside the domain; each cut
    belongs to the piece on its left.  ``flags[i]`` is ``"convex"`` or
    ``"concave"`` for piece ``i``.  ``numerator`` has the sign of
    ``d2y/dx2`` away from its roots.
    """

    domain: tuple[Bound, Bound]
    cuts: tuple
    flags: tuple
    numerator: Poly
    coordinate: str  # "t" (additive) or "x = e^t" (log-shift)

    @property
    def W(self) -> int:
        return len(self.flags)

    def piece_of(self, t) -> int:
        t = as_rat(t)
        return sum(1 for c in self.cuts if c.compare(t) > 0)

    def curvature_sign(self, t) -> int:
        return sign(self.numerator(as_rat(t)))

    def to_json(self) -> dict:
        lo, hi = self.domain
        return {
            "W": self.W,
            "coordinate": self.coordinate,
            "domain": [_fmt_bound(lo, "-inf"), _fmt_bound(hi, "inf")],
            "cuts": [c.to_json() for c in self.cuts],
            "flags": list(self.flags),
            "numerator": [format_rat(c) for c in self.numerator.coeffs],
        }


def _partition_from(numer: Poly, dx: Poly, lo: Bound, hi: Bound, coord: str) -> ConvexityPartition:
    """Cut where ``numer * dx`` (the sign of ``d2y/dx2``) or ``dx`` (a fold) changes sign."""
    if dx.is_zero():
        raise NonGraphError("first coordinate of the curve is constant", None)
    if numer.is_zero():
        raise DegenerateCurveError("second derivative of the curve vanishes identically")
    q = numer * dx
    roots = isolate_real_roots(squarefree_part(q), lo, hi)
    crossings = [
        (a, b)
        for a, b in roots
        if sign(q(a)) != sign(q(b)) or sign(dx(a)) != sign(dx(b))
    ]
    cuts = tuple(Cut(q, a, b) for a, b in crossings)
    if crossings:
        signs = [sign(q(crossings[0][0]))] + [sign(q(b)) for _, b in crossings]
    else:
        signs = [sign_on(q, lo, hi)]
    flags = tuple("convex" if sg > 0 else "concave" for sg in signs)
    return ConvexityPartition((lo, hi), cuts, flags, q, coord)


def curve_partition(x: Poly, y: Poly, domain: tuple = (None, None)) -> ConvexityPartition:
    """Minimal split of the polynomial curve ``t -> (x(t), y(t))`` into convex/concave graph pieces.

    A piece ends where ``d2y/dx2`` changes sign or where ``x`` turns back.
    """
    lo = None if domain[0] is None else as_rat(domain[0])
    hi = None if domain[1] is None else as_rat(domain[1])
    if lo is not None and hi is not None and lo >= hi:
        raise ValueError("empty curve domain")
    dx, dy = x.derivative(), y.derivative()
    # d2y/dx2 = (x'y'' - y'x'') / x'^3
    return _partition_from(dx * dy.derivative() - dy * dx.derivative(), dx, lo, hi, "t")


def w_partition(
    f1: ConvexMap,
    f2: ConvexMap,
    h: tuple,
    domain: Optional[tuple] = None,
) -> ConvexityPartition:
    """Minimal convex/concave partition of the difference-of-shifts curve.

    For additive maps ``h = (h1, h1', h2, h2')`` with ``0 < h1 < h1'`` and
    ``0 < h2 < h2'``, the curve parameter is ``t`` and ``domain`` defaults
    to the largest interval on which both shifted maps stay inside their
    declared domains.  For log-shift maps ``h`` holds the multiplicative
    shifts ``(z1, z1', z2, z2')`` with ``0 < z1 < z1'`` and ``0 < z2 < z2'``,
    and the parameter is ``x = e^t`` with default domain ``(0, inf)``.

    Raises :class:`DegenerateCurveError` when the curvature vanishes
    identically and :class:`NonGraphError` when the first coordinate is
    constant.
    """
    h1, h1p, h2, h2p = (as_rat(v) for v in h)
    if f1.is_multiplicative != f2.is_multiplicative:
        raise ValueError("cannot mix log-shift and polynomial maps in one curve")
    if f1.is_multiplicative:
        if not (0 < h1 < h1p and 0 < h2 < h2p):
            raise ValueError("need 0 < z1 < z1' and 0 < z2 < z2'")
        lo, hi = (Fraction(0), None) if domain is None else domain
        lo = None if lo is None else as_rat(lo)
        hi = None if hi is None else as_rat(hi)
        if lo is None or lo < 0:
            raise ValueError("log-shift curves live on x = e^t > 0")
        z1, z1p, z2, z2p = f1.z * h1, f1.z * h1p, f2.z * h2, f2.z * h2p
        if z1 == z2 and z1p == z2p:
            raise DegenerateCurveError("curve is a straight line when z1 = z2 and z1' = z2'")
        numer = logshift_curvature_numerator(z1, z1p, z2, z2p)
        # dx/du > 0 for u > 0, and the constant factor has the sign of z2' - z2 > 0
        return _partition_from(numer, Poly.const(1), lo, hi, "x = e^t")

    if not (0 < h1 < h1p and 0 < h2 < h2p):
        raise ValueError("need 0 < h1 < h1' and 0 < h2 < h2'")
    if domain is None:
        lo = _meet(
            None if f1.domain[0] is None else f1.domain[0] - h1,
            None if f2.domain[0] is None else f2.domain[0] - h2,
            max,
        )
        hi = _meet(
            None if f1.domain[1] is None else f1.domain[1] - h1p,
            None if f2.domain[1] is None else f2.domain[1] - h2p,
            min,
        )
    else:
        lo = None if domain[0] is None else as_rat(domain[0])
        hi = None if domain[1] is None else as_rat(domain[1])
    if lo is not None and hi is not None and lo >= hi:
        raise ValueError("empty curve domain")
    for f, a, b in ((f1, h1, h1p), (f2, h2, h2p)):
        certify_convex(
            f, (None if lo is None else lo + a, None if hi is None else hi + b)
        ).require()
    x, y = curve_polys(f1, f2, (h1, h1p, h2, h2p))
    return curve_partition(x, y, (lo, hi))


def curve_polys(f1: ConvexMap, f2: ConvexMap, h: tuple) -> tuple[Poly, Poly]:
    """The coordinate polynomials ``(g1, g2)`` of an additive difference-of-shifts curve."""
    h1, h1p, h2, h2p = (as_rat(v) for v in h)
    return f1.shifted(h1p) - f1.shifted(h1), f2.shifted(h2p) - f2.shifted(h2)
