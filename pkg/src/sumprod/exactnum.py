"""Exact rational scalars and univariate polynomials over the rationals.

Scalars are :class:`fractions.Fraction` values, which are kept in lowest
terms with a positive denominator and compare structurally.  Polynomials
are immutable coefficient tuples, lowest degree first.  Real-root work
(Sturm sequences, root isolation, sign-change counting) never touches
floating point.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence, Union

Rat = Fraction
RatLike = Union[int, Fraction, str]

_RAT_LITERAL = re.compile(r"^\s*([+-]?\d+)(?:/(\d+))?\s*$")


def parse_rat(text: str) -> Fraction:
    """Parse a rational literal such as ``"-3/7"`` or ``"42"``."""
    m = _RAT_LITERAL.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in literal {text!r}")
    return Fraction(num, den)


def format_rat(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def as_rat(x: RatLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


class Poly:
    """Immutable polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RatLike] = ()):
        cs = [as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def t(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: RatLike) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly([{', '.join(format_rat(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = format_rat(abs(c)) + (("*" + mono) if mono else "")
            terms.append(("-" if c < 0 else "+", body))
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for s, body in terms[1:]:
            out += f" {s} {body}"
        return out

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    def __add__(self, other) -> "Poly":
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (n - len(o.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x: RatLike) -> Fraction:
        x = as_rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, order: int = 1) -> "Poly":
        p = self
        for _ in range(order):
            p = Poly(k * c for k, c in enumerate(p.coeffs) if k > 0)
        return p

    def shift(self, c: RatLike) -> "Poly":
        """Return ``t -> p(t + c)``."""
        return self.compose(Poly((c, 1)))

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        q = [Fraction(0)] * max(len(rem) - dq, 0)
        lead = other.lc
        while len(rem) - 1 >= dq and rem:
            k = len(rem) - 1 - dq
            f = rem[-1] / lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[i + k] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return Poly(c / self.lc for c in self.coeffs)

    def primitive(self) -> "Poly":
        """Positive-leading integer multiple with coprime coefficients."""
        if self.is_zero():
            return self
        m = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * m) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Poly(Fraction(v // g) for v in ints)

    def sign_at_pos_inf(self) -> int:
        return sign(self.lc)

    def sign_at_neg_inf(self) -> int:
        s = sign(self.lc)
        return s if self.degree % 2 == 0 else -s


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    """Product of the distinct irreducible factors of ``p`` (monic)."""
    if p.degree <= 0:
        return p.monic()
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    # positive rescaling keeps signs and tames coefficient growth
    return [s.primitive() if s.lc > 0 else -((-s).primitive()) for s in seq]


def _variations(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def _sturm_count(seq: list[Poly], a: Fraction, b: Fraction) -> int:
    """Distinct roots in ``(a, b]`` of a squarefree ``seq[0]``; ``a`` must not be a root."""
    va = _variations([sign(s(a)) for s in seq])
    vb = _variations([sign(s(b)) for s in seq])
    return va - vb


def cauchy_bound(p: Poly) -> Fraction:
    """Every real root of ``p`` lies strictly inside ``(-B, B)``."""
    lead = abs(p.lc)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0)) + 1


def _nonroot_split(q: Poly, a: Fraction, b: Fraction) -> Fraction:
    """A rational point strictly inside ``(a, b)`` where ``q`` does not vanish."""
    den = 2
    while True:
        for k in range(1, den):
            m = a + (b - a) * Fraction(k, den)
            if q(m) != 0:
                return m
        den += 1


def isolate_real_roots(
    p: Poly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None
) -> list[tuple[Fraction, Fraction]]:
    """Isolate the distinct real roots of ``p`` in the open interval ``(lo, hi)``.

    ``None`` endpoints mean unbounded.  Each returned ``(a, b)`` satisfies
    ``a < b``, contains exactly one distinct root of ``p`` strictly inside,
    and neither endpoint is a root.  Intervals are returned in increasing
    order and are pairwise disjoint.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    q = squarefree_part(p)
    if q.degree <= 0:
        return []
    bound = cauchy_bound(q)
    a = -bound if lo is None else max(Fraction(lo), -bound)
    b = bound if hi is None else min(Fraction(hi), bound)
    if a >= b:
        return []
    # strip rational roots sitting exactly on the window edges
    for edge in (a, b):
        if q(edge) == 0:
            q = q // Poly((-edge, 1))
    if q.degree <= 0:
        return []
    seq = sturm_sequence(q)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(a, b, _sturm_count(seq, a, b))]
    while stack:
        x, y, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((x, y))
            continue
        m = _nonroot_split(q, x, y)
        stack.append((m, y, _sturm_count(seq, m, y)))
        stack.append((x, m, _sturm_count(seq, x, m)))
    out.sort()
    return [_clear_edge_roots(p, q, seq, x, y) for x, y in out]


def _clear_edge_roots(p: Poly, q: Poly, seq: list[Poly], x: Fraction, y: Fraction):
    # a window edge may be a root of p (stripped from q); move it inward
    while p(x) == 0:
        m = _nonroot_split(q, x, y)
        if _sturm_count(seq, x, m) == 0:
            x = m
        else:
            y = m
    while p(y) == 0:
        m = _nonroot_split(q, x, y)
        if _sturm_count(seq, x, m) == 1:
            y = m
        else:
            x = m
    return x, y


def refine_root(
    p: Poly, interval: tuple[Fraction, Fraction], width: Fraction
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval of a sign-changing root below ``width``."""
    a, b = interval
    sa = sign(p(a))
    while b - a > width:
        m = (a + b) / 2
        sm = sign(p(m))
        if sm == 0:
            eps = (b - a) / 8
            return (m - eps, m + eps) if p(m - eps) != 0 and p(m + eps) != 0 else (a, b)
        if sm == sa:
            a = m
        else:
            b = m
    return a, b


def count_sign_changes(
    p: Poly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None
) -> tuple[int, list[tuple[Fraction, Fraction]]]:
    """Count the points in ``(lo, hi)`` where ``p`` changes sign.

    Roots of even multiplicity are touched but not crossed and are not
    counted.  Returns the count and one isolating interval per crossing.
    Raises ``ValueError`` for the zero polynomial, whose sign is undefined.
    """
    if p.is_zero():
        raise ValueError("polynomial is identically zero on the domain")
    crossings = [
        (a, b) for a, b in isolate_real_roots(p, lo, hi) if sign(p(a)) != sign(p(b))
    ]
    return len(crossings), crossings


def sign_on(p: Poly, lo: Optional[Fraction], hi: Optional[Fraction]) -> int:
    """Sign of ``p`` at a rational point of ``(lo, hi)`` that is not a root."""
    if p.is_zero():
        return 0
    if lo is None and hi is None:
        a, b = Fraction(-1), Fraction(1)
    elif lo is None:
        a, b = Fraction(hi) - 2, Fraction(hi)
    elif hi is None:
        a, b = Fraction(lo), Fraction(lo) + 2
    else:
        a, b = Fraction(lo), Fraction(hi)
    return sign(p(_nonroot_split(p, a, b)))


class Cut:
    """An exact point of the real line: a rational, or an isolated algebraic root.

    An algebraic cut is the unique root of the squarefree polynomial
    ``poly`` inside the open interval ``(lo, hi)``.  Comparisons against
    rationals are exact.
    """

    __slots__ = ("poly", "lo", "hi", "value")

    def __init__(self, poly: Optional[Poly] = None, lo=None, hi=None, value=None):
        self.value = None if value is None else as_rat(value)
        self.poly = None if poly is None else squarefree_part(poly)
        self.lo = None if lo is None else as_rat(lo)
        self.hi = None if hi is None else as_rat(hi)
        if self.value is None and self.poly is not None:
            if self.poly(self.lo) == 0 or self.poly(self.hi) == 0:
                raise ValueError("isolating interval endpoint is a root")

    @classmethod
    def rational(cls, r: RatLike) -> "Cut":
        return cls(value=r)

    def compare(self, t: RatLike) -> int:
        """Return -1, 0, 1 as ``t`` is below, at, or above this point."""
        t = as_rat(t)
        if self.value is not None:
            return sign(t - self.value)
        if t <= self.lo:
            return -1
        if t >= self.hi:
            return 1
        v = self.poly(t)
        if v == 0:
            return 0
        return -1 if sign(v) == sign(self.poly(self.lo)) else 1

    def approx(self, digits: int = 12) -> str:
        if self.value is not None:
            return format_rat(self.value)
        a, b = refine_root(self.poly, (self.lo, self.hi), Fraction(1, 10**digits))
        return format_rat((a + b) / 2)

    def to_json(self) -> dict:
        if self.value is not None:
            return {"value": format_rat(self.value)}
        return {
            "poly": [format_rat(c) for c in self.poly.coeffs],
            "isolating": [format_rat(self.lo), format_rat(self.hi)],
        }

    def __repr__(self) -> str:
        if self.value is not None:
            return f"Cut({format_rat(self.value)})"
        return f"Cut(root of {self.poly} in ({format_rat(self.lo)}, {format_rat(self.hi)}))"
