"""Independent reference implementations used as test oracles.

Everything here is plain nested loops over Python ``Fraction`` sets; none
of it touches the numpy engine.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from sumprod.exactnum import Poly
from sumprod.setops import Add, Const, Div, KFold, Mul, Neg, PolyMap, Pow, Sub, Union, Var


class NaiveZeroDivision(Exception):
    pass


def naive_eval(e, env: dict) -> set:
    if isinstance(e, Var):
        v = env[e.name]
        return {Fraction(x) for x in (v if not isinstance(v, (int, Fraction)) else [v])}
    if isinstance(e, Const):
        return {Fraction(e.value)}
    if isinstance(e, Neg):
        return {-x for x in naive_eval(e.child, env)}
    if isinstance(e, Pow):
        return {x**e.k for x in naive_eval(e.child, env)}
    if isinstance(e, PolyMap):
        return {e.poly(x) for x in naive_eval(e.child, env)}
    if isinstance(e, KFold):
        base = naive_eval(e.child, env)
        out = set()
        for combo in itertools.product(base, repeat=e.k):
            p = Fraction(1)
            for x in combo:
                p *= x
            out.add(p)
        return out
    left, right = naive_eval(e.left, env), naive_eval(e.right, env)
    if isinstance(e, Union):
        return left | right
    if isinstance(e, Add):
        return {a + b for a in left for b in right}
    if isinstance(e, Sub):
        return {a - b for a in left for b in right}
    if isinstance(e, Mul):
        return {a * b for a in left for b in right}
    if isinstance(e, Div):
        if not left:
            return set()
        if 0 in right:
            raise NaiveZeroDivision
        return {a / b for a in left for b in right}
    raise TypeError(type(e))


def random_rset(rng: random.Random, max_size: int = 8, lo: int = -9, hi: int = 9, rational: bool = True) -> set:
    n = rng.randint(1, max_size)
    out = set()
    while len(out) < n:
        out.add(Fraction(rng.randint(lo, hi), rng.choice((1, 1, 2, 3)) if rational else 1))
    return out


def random_expr(rng: random.Random, depth: int, names=("X", "Y")):
    """Random tree of height at most ``depth``; binary nodes keep both sides shallow."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.8:
            return Var(rng.choice(names))
        return Const(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    kind = rng.choice(("add", "sub", "mul", "div", "union", "neg", "kfold", "pow", "poly"))
    if kind in ("neg", "kfold", "pow", "poly"):
        child = random_expr(rng, depth - 1, names)
        if kind == "neg":
            return Neg(child)
        if kind == "kfold":
            return KFold(child, rng.randint(1, 2))
        if kind == "pow":
            return Pow(child, rng.randint(1, 3))
        return PolyMap(Poly([rng.randint(-2, 2) for _ in range(rng.randint(1, 3))]), child)
    left = random_expr(rng, depth - 1, names)
    right = random_expr(rng, depth - 1, names)
    return {"add": Add, "sub": Sub, "mul": Mul, "div": Div, "union": Union}[kind](left, right)
