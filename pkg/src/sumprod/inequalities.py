"""Exact instance checks for the sumset inequalities used as tools.

Each checker evaluates both sides exactly and returns an
:class:`IneqInstance`.  The inequalities are theorems, so ``holds=False``
means the set engine is wrong.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exactnum import as_rat, format_rat
from .setops import (
    Add,
    Const,
    Div,
    Mul,
    Neg,
    RSet,
    SetExpr,
    Sub,
    Var,
    evaluate_size,
    mult_energy,
)

GROUPS = ("additive", "multiplicative")


@dataclass(frozen=True)
class IneqInstance:
    name: str
    operands: tuple
    lhs: int
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def operands_hash(self) -> str:
        text = ";".join(x.to_text() for x in self.operands)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "operands-hash": self.operands_hash(),
            "lhs": self.lhs,
            "rhs": format_rat(self.rhs),
            "holds": self.holds,
        }


def _check_group(group: str) -> bool:
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}")
    return group == "multiplicative"


def _no_zero(*sets: RSet) -> None:
    for s in sets:
        if 0 in s:
            raise ValueError("multiplicative form needs sets without 0")


def _op(mult: bool, x: SetExpr, y: SetExpr) -> SetExpr:
    return Mul(x, y) if mult else Add(x, y)


def _inv_op(mult: bool, x: SetExpr, y: SetExpr) -> SetExpr:
    return Div(x, y) if mult else Sub(x, y)


def fold_expr(k: int, l: int, mult: bool = False, name: str = "X") -> SetExpr:
    """``kX - lX`` (or ``X^(k) / X^(l)``) as a left-to-right chain."""
    if k < 0 or l < 0 or k + l < 1:
        raise ValueError("need k, l >= 0 and k + l >= 1")
    x = Var(name)
    if k:
        e: SetExpr = x
        for _ in range(k - 1):
            e = _op(mult, e, x)
        rest = l
    else:
        e = Div(Const(Fraction(1)), x) if mult else Neg(x)
        rest = l - 1
    for _ in range(rest):
        e = _inv_op(mult, e, x)
    return e


def check_plunnecke(X: RSet, k: int, l: int, group: str = "additive", *, max_set_size=None) -> IneqInstance:
    """``|kX - lX| <= |X+X|^(k+l) / |X|^(k+l-1)``."""
    mult = _check_group(group)
    if mult:
        _no_zero(X)
    if not len(X):
        raise ValueError("X must be nonempty")
    lhs = evaluate_size(fold_expr(k, l, mult), {"X": X}, max_set_size=max_set_size)
    doubling = evaluate_size(_op(mult, Var("X"), Var("X")), {"X": X}, max_set_size=max_set_size)
    rhs = Fraction(doubling ** (k + l), len(X) ** (k + l - 1))
    return IneqInstance(f"plunnecke[{k},{l},{group}]", (X,), lhs, rhs)


def check_ruzsa_triangle(
    X: RSet, Y: RSet, Z: RSet, variant: str = "difference", group: str = "additive", *, max_set_size=None
) -> IneqInstance:
    """``|Y-Z| <= |X-Y||X-Z| / |X|``; the sum form uses ``|X+Y||X+Z|``."""
    mult = _check_group(group)
    if variant not in ("difference", "sum-form"):
        raise ValueError(f"unknown variant {variant!r}")
    if not len(X):
        raise ValueError("X must be nonempty")
    if mult:
        _no_zero(X, Y, Z)
    b = {"X": X, "Y": Y, "Z": Z}
    combine = _op if variant == "sum-form" else _inv_op
    lhs = evaluate_size(_inv_op(mult, Var("Y"), Var("Z")), b, max_set_size=max_set_size)
    r1 = evaluate_size(combine(mult, Var("X"), Var("Y")), b, max_set_size=max_set_size)
    r2 = evaluate_size(combine(mult, Var("X"), Var("Z")), b, max_set_size=max_set_size)
    return IneqInstance(f"ruzsa[{variant},{group}]", (X, Y, Z), lhs, Fraction(r1 * r2, len(X)))


def check_garaev_sum(Xs: Sequence[RSet], Y: RSet, group: str = "additive", *, max_set_size=None) -> IneqInstance:
    """``|X_1 + ... + X_k| <= |X_1+Y| ... |X_k+Y| / |Y|^(k-1)``."""
    mult = _check_group(group)
    if not len(Y):
        raise ValueError("Y must be nonempty")
    if not Xs:
        raise ValueError("need at least one summand")
    if mult:
        _no_zero(Y, *Xs)
    names = [f"X{i}" for i in range(len(Xs))]
    b = {n: x for n, x in zip(names, Xs)}
    b["Y"] = Y
    total: SetExpr = Var(names[0])
    for n in names[1:]:
        total = _op(mult, total, Var(n))
    lhs = evaluate_size(total, b, max_set_size=max_set_size)
    num = 1
    for n in names:
        num *= evaluate_size(_op(mult, Var(n), Var("Y")), b, max_set_size=max_set_size)
    rhs = Fraction(num, len(Y) ** (len(Xs) - 1))
    return IneqInstance(f"garaev-sum[{len(Xs)},{group}]", (*Xs, Y), lhs, rhs)


@dataclass(frozen=True)
class ProbeReport:
    size: int
    base: int
    ratio: float

    def to_json(self) -> dict:
        return {"size": self.size, "base": self.base, "ratio": self.ratio}


def shift_product_probe(A: RSet, lam=1) -> ProbeReport:
    """``|A(A+lam)|`` and its ratio to ``|A|^(5/4)``; nothing is asserted."""
    lam = as_rat(lam)
    if lam == 0:
        raise ValueError("shift must be nonzero")
    size = evaluate_size("A*(A+l)", {"A": A, "l": lam})
    n = len(A)
    return ProbeReport(size, n, size / n**1.25 if n else 0.0)


@dataclass(frozen=True)
class EnergyPair:
    a: Fraction
    a_prime: Fraction
    energy: int
    bound: Fraction
    product_size: int

    @property
    def verified(self) -> bool:
        return self.bound <= self.product_size

    def to_json(self) -> dict:
        return {
            "a": format_rat(self.a),
            "a'": format_rat(self.a_prime),
            "energy": self.energy,
            "bound": format_rat(self.bound),
            "product_size": self.product_size,
            "verified": self.verified,
        }


def best_energy_pair(A: RSet) -> EnergyPair:
    """Pair ``(a, a')`` minimising ``E*(aA+1, a'A+1)`` with its Cauchy-Schwarz bound.

    ``|XY| >= |X|^2 |Y|^2 / E*(X, Y)``; for nonzero ``a, a'`` the numerator
    is ``|A|^4``.  Ties go to the lexicographically smallest pair.
    """
    if len(A) < 2:
        raise ValueError("need at least 2 elements")
    shifted = {a: RSet(a * x + 1 for x in A) for a in A}
    best = None
    for a in A:
        for ap in A:
            e = mult_energy(shifted[a], shifted[ap])
            if best is None or e < best[0]:
                best = (e, a, ap)
    e, a, ap = best
    X, Y = shifted[a], shifted[ap]
    bound = Fraction(len(X) ** 2 * len(Y) ** 2, e)
    size = evaluate_size("X*Y", {"X": X, "Y": Y})
    return EnergyPair(a, ap, e, bound, size)


# ---------------------------------------------------------------------------
# randomized suites


def random_set(rng: random.Random, *, max_size: int = 6, lo: int = -12, hi: int = 12, nonzero: bool = False,
               rational: bool = False) -> RSet:
    n = rng.randint(1, max_size)
    out = set()
    while len(out) < n:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, 4) if rational else 1)
        if nonzero and v == 0:
            continue
        out.add(v)
    return RSet(out)


def _suite_plunnecke(rng: random.Random) -> IneqInstance:
    group = rng.choice(GROUPS)
    mult = group == "multiplicative"
    k = rng.randint(0, 3)
    l = rng.randint(0 if k else 1, 3 - k if k < 3 else 1)
    X = random_set(rng, max_size=5, nonzero=mult, rational=rng.random() < 0.3)
    return check_plunnecke(X, k, l, group)


def _suite_ruzsa(rng: random.Random, variant: str) -> IneqInstance:
    group = rng.choice(GROUPS)
    mult = group == "multiplicative"
    sets = [random_set(rng, max_size=6, nonzero=mult, rational=rng.random() < 0.3) for _ in range(3)]
    return check_ruzsa_triangle(*sets, variant=variant, group=group)


def _suite_garaev(rng: random.Random) -> IneqInstance:
    group = rng.choice(GROUPS)
    mult = group == "multiplicative"
    k = rng.randint(1, 4)
    Xs = [random_set(rng, max_size=4, nonzero=mult) for _ in range(k)]
    Y = random_set(rng, max_size=4, nonzero=mult)
    return check_garaev_sum(Xs, Y, group)


SUITES = {
    "plunnecke": _suite_plunnecke,
    "ruzsa-difference": lambda rng: _suite_ruzsa(rng, "difference"),
    "ruzsa-sum": lambda rng: _suite_ruzsa(rng, "sum-form"),
    "garaev-sum": _suite_garaev,
}


def run_suite(name: str, trials: int, rng: random.Random) -> Iterator[IneqInstance]:
    """``trials`` random instances of one checker, drawn from ``rng``."""
    make = SUITES[name]
    for _ in range(trials):
        yield make(rng)


def to_json_lines(instances) -> str:
    return "".join(json.dumps(i.to_json(), sort_keys=True) + "\n" for i in instances)
