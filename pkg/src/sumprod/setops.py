"""Finite sets of rationals, set expressions, and their exact evaluation.

An :class:`RSet` is an immutable, strictly increasing tuple of
``Fraction`` values.  A :class:`SetExpr` tree describes a composite set
such as ``(z*X+1)^(2)*(w*X+1)``; :func:`evaluate` computes it exactly.

Scalars in an expression are treated as singleton sets, so ``z*X`` is a
dilate and ``X+1`` a shift.  ``E^(k)`` is the k-fold product set (factors
may repeat), ``E^k`` the elementwise k-th power.

The evaluator represents intermediate sets as numerator/denominator
arrays.  Pair enumeration runs in int64 when the operand magnitudes
guarantee no overflow, and on Python integers otherwise; additive
operations on integer-valued sets with a modest span use a bitset
convolution instead of enumerating pairs.
"""

from __future__ import annotations

import heapq
import re
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Optional

import numpy as np

from .exactnum import Poly, as_rat, format_rat, parse_rat

DEFAULT_MAX_SET_SIZE = 10**8

_I64_SAFE = 1 << 62
_BLOCK = 1 << 21  # pairs per enumeration block
_MERGE_AT = 1 << 23  # accumulated block output before an intermediate dedupe
_DENSE_MAX_SPAN = 1 << 28


class SetOpsError(Exception):
    """Base class for evaluation failures."""


class ExprSyntaxError(SetOpsError, ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnboundVariableError(SetOpsError, KeyError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"unbound variable(s): {', '.join(self.names)}")

    def __str__(self) -> str:
        return self.args[0]


class ZeroDivisorError(SetOpsError, ZeroDivisionError):
    pass


class SizeLimitError(SetOpsError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


try:
    Fraction(1, 1, _normalize=False)

    def _frac(n: int, d: int) -> Fraction:
        return Fraction(n, d, _normalize=False)

except TypeError:  # pragma: no cover - newer Pythons dropped the flag

    def _frac(n: int, d: int) -> Fraction:
        return Fraction(n, d)


class RSet:
    """Finite set of rationals stored as a strictly increasing tuple."""

    __slots__ = ("_elems", "_vals", "_hash")

    def __init__(self, elements: Iterable = ()):
        self._elems = tuple(sorted({as_rat(x) for x in elements}))
        self._vals = None
        self._hash = None

    @classmethod
    def _trusted(cls, elems: tuple) -> "RSet":
        obj = cls.__new__(cls)
        obj._elems = elems
        obj._vals = None
        obj._hash = None
        return obj

    @classmethod
    def range(cls, lo: int, hi: int) -> "RSet":
        """The integers ``lo..hi`` inclusive."""
        return cls._trusted(tuple(Fraction(i) for i in range(lo, hi + 1)))

    @classmethod
    def from_text(cls, text: str) -> "RSet":
        """Parse one rational literal per line; blank lines and ``#`` comments skipped."""
        out = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(parse_rat(line))
        return cls(out)

    def to_text(self) -> str:
        return "".join(format_rat(x) + "\n" for x in self._elems)

    @property
    def elements(self) -> tuple:
        return self._elems

    def __len__(self) -> int:
        return len(self._elems)

    def __iter__(self):
        return iter(self._elems)

    def __getitem__(self, i):
        return self._elems[i]

    def __contains__(self, x) -> bool:
        x = as_rat(x)
        i = bisect_left(self._elems, x)
        return i < len(self._elems) and self._elems[i] == x

    def __eq__(self, other) -> bool:
        if isinstance(other, RSet):
            return self._elems == other._elems
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._elems)
        return self._hash

    def __repr__(self) -> str:
        if len(self._elems) > 12:
            head = ", ".join(format_rat(x) for x in self._elems[:6])
            return f"RSet({{{head}, ...}} |{len(self._elems)}|)"
        return "RSet({" + ", ".join(format_rat(x) for x in self._elems) + "})"

    def min(self) -> Fraction:
        return self._elems[0]

    def max(self) -> Fraction:
        return self._elems[-1]

    def map(self, fn) -> "RSet":
        return RSet(fn(x) for x in self._elems)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self._elems)


# ---------------------------------------------------------------------------
# expression trees


class SetExpr:
    """Base class of expression nodes.  Nodes are frozen and hashable."""

    def __str__(self) -> str:
        return to_text(self)

    # operator sugar for building trees in code
    def __add__(self, o):
        return Add(self, _lift(o))

    def __radd__(self, o):
        return Add(_lift(o), self)

    def __sub__(self, o):
        return Sub(self, _lift(o))

    def __rsub__(self, o):
        return Sub(_lift(o), self)

    def __mul__(self, o):
        return Mul(self, _lift(o))

    def __rmul__(self, o):
        return Mul(_lift(o), self)

    def __truediv__(self, o):
        return Div(self, _lift(o))

    def __rtruediv__(self, o):
        return Div(_lift(o), self)

    def __neg__(self):
        return Neg(self)

    def __or__(self, o):
        return Union(self, _lift(o))


def _lift(x) -> SetExpr:
    if isinstance(x, SetExpr):
        return x
    if isinstance(x, str):
        return Var(x)
    return Const(as_rat(x))


@dataclass(frozen=True, eq=True)
class Var(SetExpr):
    name: str


@dataclass(frozen=True, eq=True)
class Const(SetExpr):
    value: Fraction


@dataclass(frozen=True, eq=True)
class Add(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, eq=True)
class Sub(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, eq=True)
class Mul(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, eq=True)
class Div(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, eq=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, eq=True)
class Neg(SetExpr):
    child: SetExpr


@dataclass(frozen=True, eq=True)
class KFold(SetExpr):
    """k-fold product set ``{x_1 ... x_k}`` with repetition allowed."""

    child: SetExpr
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k-fold exponent must be a positive integer, got {self.k!r}")


@dataclass(frozen=True, eq=True)
class Pow(SetExpr):
    """Elementwise power ``{x^k}``."""

    child: SetExpr
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"power must be a positive integer, got {self.k!r}")


@dataclass(frozen=True, eq=True)
class PolyMap(SetExpr):
    """Elementwise polynomial map ``{p(x)}``."""

    poly: Poly
    child: SetExpr


def ksum(k: int, e: SetExpr) -> SetExpr:
    """``E + ... + E`` (k copies), the k-fold sumset."""
    if k < 1:
        raise ValueError("k must be positive")
    out = e
    for _ in range(k - 1):
        out = Add(out, e)
    return out


def free_vars(e: SetExpr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Add, Sub, Mul, Div, Union)):
        return free_vars(e.left) | free_vars(e.right)
    return free_vars(e.child)


def depth(e: SetExpr) -> int:
    if isinstance(e, (Var, Const)):
        return 0
    if isinstance(e, (Add, Sub, Mul, Div, Union)):
        return 1 + max(depth(e.left), depth(e.right))
    return 1 + depth(e.child)


# ---------------------------------------------------------------------------
# printing

_BIN = {Union: ("|", 0), Add: ("+", 1), Sub: ("-", 1), Mul: ("*", 2), Div: ("/", 2)}


def _prec(e: SetExpr) -> int:
    if type(e) in _BIN:
        return _BIN[type(e)][1]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, (KFold, Pow)):
        return 4
    if isinstance(e, Const) and e.value < 0:
        return 3
    return 5


def _wrap(s: str, cond: bool) -> str:
    return f"({s})" if cond else s


def to_text(e: SetExpr) -> str:
    """Render ``e`` so that :func:`parse_expr` rebuilds an identical tree."""
    return _show(e, 0)


def _show(e: SetExpr, need: int) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        s = format_rat(e.value)
        return _wrap(s, e.value < 0)
    if type(e) in _BIN:
        sym, p = _BIN[type(e)]
        left = _show(e.left, p)
        right = _show(e.right, p + 1)
        if sym == "/" and right[0].isdigit():
            right = f"({right})"
        return _wrap(f"{left}{sym}{right}", p < need)
    if isinstance(e, Neg):
        inner = _show(e.child, 3)
        if inner[0].isdigit():
            inner = f"({inner})"
        return _wrap("-" + inner, 3 < need)
    if isinstance(e, KFold):
        return _wrap(f"{_show(e.child, 5)}^({e.k})", 4 < need)
    if isinstance(e, Pow):
        return _wrap(f"{_show(e.child, 5)}^{e.k}", 4 < need)
    if isinstance(e, PolyMap):
        cs = ",".join(format_rat(c) for c in e.poly.coeffs) or "0"
        return f"poly[{cs}]({_show(e.child, 0)})"
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^()|\[\],]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise ExprSyntaxError(f"unexpected character {text[j]!r}", j)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        t = self.take()
        if t[1] != value or t[0] == "end":
            raise ExprSyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def parse(self) -> SetExpr:
        e = self.union()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
        return e

    def union(self) -> SetExpr:
        e = self.expr()
        while self.peek()[1] == "|" and self.peek()[0] == "op":
            self.take()
            e = Union(e, self.expr())
        return e

    def expr(self) -> SetExpr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> SetExpr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            r = self.unary()
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def unary(self) -> SetExpr:
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            if self.peek()[0] == "num":
                return self.postfix(Const(-parse_rat(self.take()[1])))
            return Neg(self.unary())
        return self.postfix(self.atom())

    def _int_exponent(self) -> int:
        t = self.take()
        if t[0] != "num" or "/" in t[1] or int(t[1]) < 1:
            raise ExprSyntaxError(f"exponent must be a positive integer, found {t[1] or 'end'!r}", t[2])
        return int(t[1])

    def postfix(self, e: SetExpr) -> SetExpr:
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                self.take()
                k = self._int_exponent()
                self.expect(")")
                e = KFold(e, k)
            else:
                e = Pow(e, self._int_exponent())
        return e

    def atom(self) -> SetExpr:
        t = self.take()
        if t[0] == "num":
            return Const(parse_rat(t[1]))
        if t[0] == "name":
            if t[1] == "poly" and self.peek()[1] == "[":
                self.take()
                coeffs = []
                while True:
                    neg = False
                    if self.peek()[1] == "-":
                        self.take()
                        neg = True
                    c = self.take()
                    if c[0] != "num":
                        raise ExprSyntaxError("expected coefficient", c[2])
                    v = parse_rat(c[1])
                    coeffs.append(-v if neg else v)
                    if self.peek()[1] == ",":
                        self.take()
                        continue
                    self.expect("]")
                    break
                self.expect("(")
                inner = self.union()
                self.expect(")")
                return PolyMap(Poly(coeffs), inner)
            return Var(t[1])
        if t[0] == "op" and t[1] == "(":
            e = self.union()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {t[1] or 'end of input'!r}", t[2])


def parse_expr(text: str) -> SetExpr:
    """Parse the set-expression grammar.

    ``E + E``, ``E - E``, ``E * E``, ``E / E`` are sum, difference, product
    and ratio sets (left associative, usual precedence); ``E ^ (k)`` is the
    k-fold product set and ``E ^ k`` the elementwise power; ``E | E`` is the
    union; ``poly[c0,c1,...](E)`` applies a polynomial elementwise.
    Names are set or scalar variables, numbers are rational literals.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation engine


class _Vals:
    """Deduplicated values as numerator/denominator arrays (``den`` None if integral)."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: Optional[np.ndarray]):
        self.num = num
        self.den = den

    def __len__(self) -> int:
        return len(self.num)

    def bounds(self) -> tuple[int, int]:
        if len(self.num) == 0:
            return 0, 1
        bn = max(abs(int(self.num.max())), abs(int(self.num.min())))
        bd = 1 if self.den is None else int(self.den.max())
        return bn, bd

    def is_object(self) -> bool:
        return self.num.dtype == object


def _int_array(values: list[int]) -> np.ndarray:
    if values and max(abs(min(values)), abs(max(values))) >= _I64_SAFE:
        arr = np.empty(len(values), dtype=object)
        arr[:] = values
        return arr
    return np.array(values, dtype=np.int64)


def _vals_of(s: RSet) -> _Vals:
    if s._vals is None:
        nums = [x.numerator for x in s._elems]
        if all(x.denominator == 1 for x in s._elems):
            s._vals = _Vals(_int_array(nums), None)
        else:
            dens = [x.denominator for x in s._elems]
            num, den = _int_array(nums), _int_array(dens)
            if num.dtype != den.dtype:
                num, den = num.astype(object), den.astype(object)
            s._vals = _Vals(num, den)
    return s._vals


def _obj(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _dedupe(num: np.ndarray, den: Optional[np.ndarray]) -> _Vals:
    if den is not None and len(den) and (den == 1).all():
        den = None
    if den is None:
        return _Vals(np.unique(num), None)
    if num.dtype == object:
        pairs = sorted(set(zip(num.tolist(), den.tolist())))
        n = np.empty(len(pairs), dtype=object)
        d = np.empty(len(pairs), dtype=object)
        n[:] = [p[0] for p in pairs]
        d[:] = [p[1] for p in pairs]
        return _Vals(n, d)
    bn = int(np.abs(num).max()) if len(num) else 0
    bd = int(den.max()) if len(den) else 1
    if (2 * bn + 1) * (bd + 1) < _I64_SAFE:
        key = np.unique((num + bn) * (bd + 1) + den)
        d = key % (bd + 1)
        return _Vals(key // (bd + 1) - bn, d)
    order = np.lexsort((den, num))
    n, d = num[order], den[order]
    keep = np.ones(len(n), dtype=bool)
    keep[1:] = (n[1:] != n[:-1]) | (d[1:] != d[:-1])
    return _Vals(n[keep], d[keep])


def _concat(parts: list[_Vals]) -> tuple[np.ndarray, Optional[np.ndarray]]:
    obj = any(p.is_object() or (p.den is not None and p.den.dtype == object) for p in parts)
    rational = any(p.den is not None for p in parts)
    nums, dens = [], []
    for p in parts:
        n = _obj(p.num) if obj else p.num
        nums.append(n)
        if rational:
            if p.den is None:
                d = np.ones(len(p.num), dtype=object if obj else np.int64)
            else:
                d = _obj(p.den) if obj else p.den
            dens.append(d)
    num = np.concatenate(nums) if nums else np.empty(0, dtype=np.int64)
    den = np.concatenate(dens) if rational else None
    return num, den


def _union(parts: list[_Vals]) -> _Vals:
    num, den = _concat(parts)
    return _dedupe(num, den)


def _pair_bounds(op: str, x: _Vals, y: _Vals) -> tuple[int, int]:
    xn, xd = x.bounds()
    yn, yd = y.bounds()
    if op in "+-":
        return xn * yd + yn * xd, xd * yd
    if op == "*":
        return xn * yn, xd * yd
    return xn * yd, xd * yn


def _combine_block(op: str, xn, xd, yn, yd):
    """Apply ``op`` to every pair of a row block; returns reduced (num, den)."""
    a = xn[:, None]
    ad = None if xd is None else xd[:, None]
    if op in "+-":
        if ad is None and yd is None:
            num = a + yn if op == "+" else a - yn
            den = None
        else:
            ad_ = 1 if ad is None else ad
            yd_ = 1 if yd is None else yd
            left = a * yd_
            right = yn * ad_
            num = left + right if op == "+" else left - right
            den = ad_ * yd_
    elif op == "*":
        num = a * yn
        if ad is None and yd is None:
            den = None
        else:
            den = (1 if ad is None else ad) * (1 if yd is None else yd)
    else:
        num = a * (1 if yd is None else yd)
        den = (1 if ad is None else ad) * yn
    shape = (len(xn), len(yn))
    num = np.ascontiguousarray(np.broadcast_to(num, shape)).ravel()
    if den is not None:
        den = np.ascontiguousarray(np.broadcast_to(den, shape)).ravel()
        if op == "/":
            neg = den < 0
            if neg.any():
                num = np.where(neg, -num, num)
                den = np.where(neg, -den, den)
        g = np.gcd(num, den)
        num = num // g
        den = den // g
    return num, den


@dataclass
class EvalOptions:
    max_set_size: int = DEFAULT_MAX_SET_SIZE
    max_pairs: Optional[int] = None
    jobs: int = 1
    strategy: str = "auto"  # auto | hash | merge | dense


def _dense_plan(op: str, x: _Vals, y: _Vals, opts: EvalOptions):
    """Return a common denominator if the bitset route applies, else None."""
    if opts.strategy in ("hash", "merge") or op not in "+-":
        return None
    if x.is_object() or y.is_object() or not len(x) or not len(y):
        return None
    dx = 1 if x.den is None else int(np.lcm.reduce(x.den))
    dy = 1 if y.den is None else int(np.lcm.reduce(y.den))
    L = lcm(dx, dy)
    if L > 1 << 20:
        return None
    spanx = _scaled_span(x, L)
    spany = _scaled_span(y, L)
    span = spanx + spany + 1
    if span > _DENSE_MAX_SPAN:
        return None
    n, m = len(x), len(y)
    if opts.strategy == "dense":
        return L
    # one big-int shift-or per element of the smaller set, versus n*m pair work
    if span // 64 * min(n, m) < 16 * n * m:
        return L
    return None


def _scaled(v: _Vals, L: int) -> np.ndarray:
    if v.den is None:
        return v.num * L
    return v.num * (L // v.den)


def _scaled_span(v: _Vals, L: int) -> int:
    if v.den is None:
        return (int(v.num.max()) - int(v.num.min())) * L
    s = _scaled(v, L)
    return int(s.max()) - int(s.min())


def _bits_of(values: np.ndarray, base: int) -> int:
    mask = np.zeros(int(values.max()) - base + 1, dtype=bool)
    mask[values - base] = True
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _dense_combine(op: str, x: _Vals, y: _Vals, L: int, opts: EvalOptions) -> _Vals:
    sx = _scaled(x, L)
    sy = _scaled(y, L)
    if op == "-":
        sy = -sy
    if len(sx) < len(sy):
        sx, sy = sy, sx
    bx, by = int(sx.min()), int(sy.min())
    big = _bits_of(sx, bx)
    acc = 0
    for s in (sy - by).tolist():
        acc |= big << s
    count = acc.bit_count() if hasattr(acc, "bit_count") else bin(acc).count("1")
    if count > opts.max_set_size:
        raise SizeLimitError("intermediate set", count, opts.max_set_size)
    nbytes = (acc.bit_length() + 7) // 8
    bits = np.unpackbits(np.frombuffer(acc.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
    vals = np.flatnonzero(bits).astype(np.int64) + (bx + by)
    if L == 1:
        return _Vals(vals, None)
    g = np.gcd(vals, L)
    return _dedupe(vals // g, L // g)


def _pairs_combine(op: str, x: _Vals, y: _Vals, opts: EvalOptions) -> _Vals:
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        return _Vals(np.empty(0, dtype=np.int64), None)
    bnum, bden = _pair_bounds(op, x, y)
    wide = bnum >= _I64_SAFE or bden >= _I64_SAFE or x.is_object() or y.is_object()
    conv = _obj if wide else (lambda a: a)
    xn = conv(x.num)
    xd = None if x.den is None else conv(x.den)
    yn = conv(y.num)
    yd = None if y.den is None else conv(y.den)
    rows = max(1, _BLOCK // m)
    spans = [(s, min(s + rows, n)) for s in range(0, n, rows)]

    def work(span):
        s, e = span
        num, den = _combine_block(op, xn[s:e], None if xd is None else xd[s:e], yn, yd)
        return _dedupe(num, den)

    acc: list[_Vals] = []
    pending = 0
    threshold = _MERGE_AT

    def absorb(v: _Vals):
        nonlocal acc, pending, threshold
        acc.append(v)
        pending += len(v)
        if pending > threshold and len(acc) > 1:
            merged = _union(acc)
            if len(merged) > opts.max_set_size:
                raise SizeLimitError("intermediate set", len(merged), opts.max_set_size)
            acc = [merged]
            pending = len(merged)
            # geometric growth keeps the total merge work linear
            threshold = min(max(_MERGE_AT, 2 * pending), max(_MERGE_AT, opts.max_set_size))

    if opts.jobs > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=opts.jobs) as pool:
            for v in pool.map(work, spans):
                absorb(v)
    else:
        for span in spans:
            absorb(work(span))
    out = acc[0] if len(acc) == 1 else _union(acc)
    if len(out) > opts.max_set_size:
        raise SizeLimitError("intermediate set", len(out), opts.max_set_size)
    return out


def _merge_sumset(op: str, x: RSet, y: RSet) -> RSet:
    """Sorted k-way merge of the rows ``x_i + Y`` (or ``x_i - Y``)."""
    ys = y.elements if op == "+" else tuple(-v for v in reversed(y.elements))
    rows = [map(xi.__add__, ys) for xi in x.elements]
    out = []
    for v in heapq.merge(*rows):
        if not out or out[-1] != v:
            out.append(v)
    return RSet._trusted(tuple(out))


def _to_rset(v: _Vals) -> RSet:
    if v.den is None:
        vals = np.unique(v.num) if v.is_object() else np.sort(v.num)
        return RSet._trusted(tuple(Fraction(int(a)) for a in vals.tolist()))
    nums = v.num.tolist()
    dens = v.den.tolist()
    try:
        key = np.array([a / b for a, b in zip(nums, dens)], dtype=np.float64)
        order = np.argsort(key, kind="stable").tolist()
    except OverflowError:
        order = list(range(len(nums)))
    pairs = [(nums[i], dens[i]) for i in order]
    ok = all(a1 * b2 < a2 * b1 for (a1, b1), (a2, b2) in zip(pairs, pairs[1:]))
    if not ok:
        pairs.sort(key=lambda p: Fraction(p[0], p[1]))
    return RSet._trusted(tuple(_frac(a, b) for a, b in pairs))


class _Evaluator:
    def __init__(self, bindings: Mapping[str, object], opts: EvalOptions):
        self.opts = opts
        self.env: dict[str, RSet] = {}
        for name, val in bindings.items():
            if isinstance(val, RSet):
                self.env[name] = val
            elif isinstance(val, (int, Fraction, str)):
                self.env[name] = RSet([as_rat(val)])
            else:
                self.env[name] = RSet(val)
        self.memo: dict[SetExpr, object] = {}

    def check(self, v):
        if len(v) > self.opts.max_set_size:
            raise SizeLimitError("intermediate set", len(v), self.opts.max_set_size)
        return v

    def run(self, e: SetExpr):
        """Evaluate to ``_Vals`` (or an ``RSet`` when the merge strategy produced one)."""
        hit = self.memo.get(e)
        if hit is not None:
            return hit
        out = self.check(self._run(e))
        self.memo[e] = out
        return out

    def vals(self, e: SetExpr) -> _Vals:
        r = self.run(e)
        return _vals_of(r) if isinstance(r, RSet) else r

    def rset(self, e: SetExpr) -> RSet:
        r = self.run(e)
        return r if isinstance(r, RSet) else _to_rset(r)

    def _run(self, e: SetExpr):
        if isinstance(e, Var):
            try:
                return self.env[e.name]
            except KeyError:
                raise UnboundVariableError([e.name]) from None
        if isinstance(e, Const):
            return RSet([e.value])
        if isinstance(e, (Add, Sub)) and self.opts.strategy == "merge":
            x, y = self.rset(e.left), self.rset(e.right)
            self.check_pairs(len(x), len(y))
            return _merge_sumset("+" if isinstance(e, Add) else "-", x, y)
        if isinstance(e, (Add, Sub, Mul, Div)):
            op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
            x = self.vals(e.left)
            y = self.vals(e.right)
            return self.binop(op, x, y)
        if isinstance(e, Union):
            return _union([self.vals(e.left), self.vals(e.right)])
        if isinstance(e, Neg):
            v = self.vals(e.child)
            return _Vals(-v.num, v.den)
        if isinstance(e, KFold):
            base = self.vals(e.child)
            acc = base
            for _ in range(e.k - 1):
                acc = self.check(self.binop("*", acc, base))
            return acc
        if isinstance(e, Pow):
            v = self.vals(e.child)
            bn, bd = v.bounds()
            wide = bn**e.k >= _I64_SAFE or bd**e.k >= _I64_SAFE or v.is_object()
            num = _obj(v.num) ** e.k if wide else v.num ** e.k
            den = None if v.den is None else (_obj(v.den) ** e.k if wide else v.den ** e.k)
            return _dedupe(num, den)
        if isinstance(e, PolyMap):
            src = self.rset(e.child)
            return RSet(e.poly(x) for x in src)
        raise TypeError(f"unknown node {e!r}")

    def check_pairs(self, n: int, m: int) -> None:
        if self.opts.max_pairs is not None and n * m > self.opts.max_pairs:
            raise SizeLimitError("pair enumeration", n * m, self.opts.max_pairs)

    def binop(self, op: str, x: _Vals, y: _Vals) -> _Vals:
        if op == "/" and len(y) and (y.num == 0).any():
            raise ZeroDivisorError("divisor set contains 0")
        self.check_pairs(len(x), len(y))
        L = _dense_plan(op, x, y, self.opts)
        if L is not None:
            return _dense_combine(op, x, y, L, self.opts)
        return _pairs_combine(op, x, y, self.opts)


def _options(max_set_size, max_pairs, jobs, strategy) -> EvalOptions:
    if strategy not in ("auto", "hash", "merge", "dense"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return EvalOptions(
        max_set_size=DEFAULT_MAX_SET_SIZE if max_set_size is None else max_set_size,
        max_pairs=max_pairs,
        jobs=max(1, int(jobs)),
        strategy=strategy,
    )


Bindings = Mapping[str, object]


def bind_check(e: SetExpr, bindings: Bindings) -> None:
    missing = free_vars(e) - set(bindings)
    if missing:
        raise UnboundVariableError(missing)


def evaluate(
    expr: SetExpr | str,
    bindings: Bindings,
    *,
    max_set_size: Optional[int] = None,
    max_pairs: Optional[int] = None,
    jobs: int = 1,
    strategy: str = "auto",
) -> RSet:
    """Evaluate a set expression exactly.

    Raises :class:`UnboundVariableError`, :class:`ZeroDivisorError` (a ratio
    set whose divisor contains 0) or :class:`SizeLimitError` (an
    intermediate set above ``max_set_size`` or a pair enumeration above
    ``max_pairs``).  The result does not depend on ``jobs`` or ``strategy``.
    """
    if isinstance(expr, str):
        expr = parse_expr(expr)
    bind_check(expr, bindings)
    ev = _Evaluator(bindings, _options(max_set_size, max_pairs, jobs, strategy))
    return ev.rset(expr)


def evaluate_size(
    expr: SetExpr | str,
    bindings: Bindings,
    *,
    max_set_size: Optional[int] = None,
    max_pairs: Optional[int] = None,
    jobs: int = 1,
    strategy: str = "auto",
) -> int:
    """``len(evaluate(...))`` without materialising the sorted result."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    bind_check(expr, bindings)
    ev = _Evaluator(bindings, _options(max_set_size, max_pairs, jobs, strategy))
    return len(ev.run(expr))


class SetView:
    """Size and membership of an evaluated set without building its sorted elements."""

    __slots__ = ("_raw", "_keys")

    def __init__(self, raw):
        self._raw = raw
        self._keys = None

    def __len__(self) -> int:
        return len(self._raw)

    def __contains__(self, x) -> bool:
        if isinstance(self._raw, RSet):
            return x in self._raw
        if self._keys is None:
            v = self._raw
            nums = v.num.tolist()
            self._keys = set(zip(nums, v.den.tolist())) if v.den is not None else set(nums)
        x = as_rat(x)
        if self._raw.den is None:
            return x.denominator == 1 and x.numerator in self._keys
        return (x.numerator, x.denominator) in self._keys

    def to_rset(self) -> RSet:
        return self._raw if isinstance(self._raw, RSet) else _to_rset(self._raw)


def evaluate_view(
    expr: SetExpr | str,
    bindings: Bindings,
    *,
    max_set_size: Optional[int] = None,
    max_pairs: Optional[int] = None,
    jobs: int = 1,
    strategy: str = "auto",
) -> SetView:
    """Like :func:`evaluate`, but returns a :class:`SetView` for size and membership queries."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    bind_check(expr, bindings)
    ev = _Evaluator(bindings, _options(max_set_size, max_pairs, jobs, strategy))
    return SetView(ev.run(expr))


# ---------------------------------------------------------------------------
# convenience operations on sets


def sumset(x: RSet, y: RSet) -> RSet:
    return evaluate(Add(Var("x"), Var("y")), {"x": x, "y": y})


def difference_set(x: RSet, y: RSet) -> RSet:
    return evaluate(Sub(Var("x"), Var("y")), {"x": x, "y": y})


def product_set(x: RSet, y: RSet) -> RSet:
    return evaluate(Mul(Var("x"), Var("y")), {"x": x, "y": y})


def ratio_set(x: RSet, y: RSet) -> RSet:
    return evaluate(Div(Var("x"), Var("y")), {"x": x, "y": y})


def dilate(c, x: RSet) -> RSet:
    c = as_rat(c)
    return RSet._trusted(tuple(sorted(c * v for v in x))) if c else RSet([0] if len(x) else [])


def shift(x: RSet, c) -> RSet:
    c = as_rat(c)
    return RSet._trusted(tuple(v + c for v in x))


def mult_energy(x: RSet, y: RSet) -> int:
    """Number of quadruples ``(x1, y1, x2, y2)`` with ``x1*y1 == x2*y2``.

    Computed as the sum of squared representation counts of the products.
    """
    if not len(x) or not len(y):
        return 0
    vx, vy = _vals_of(x), _vals_of(y)
    bnum, bden = _pair_bounds("*", vx, vy)
    if bnum < _I64_SAFE and bden < _I64_SAFE and not (vx.is_object() or vy.is_object()):
        num, den = _combine_block("*", vx.num, vx.den, vy.num, vy.den)
        if den is None:
            _, counts = np.unique(num, return_counts=True)
        else:
            _, counts = np.unique(np.stack([num, den], axis=1), axis=0, return_counts=True)
        return int((counts.astype(np.int64) ** 2).sum())
    counts: dict = {}
    for a in x:
        for b in y:
            p = a * b
            counts[p] = counts.get(p, 0) + 1
    return sum(c * c for c in counts.values())
