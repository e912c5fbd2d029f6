"""Set families, growth-exponent sweeps and a search for slowly growing sets.

Floating point appears only in fitted exponents and search objectives;
every set size is exact.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .convexity import parse_convex_map
from .dotprod import PointSet
from .expanders import NAMED, PRODSHIFT_52, logshift_instance, named_expanders
from .setops import RSet, SizeLimitError, evaluate_size, parse_expr


def rng_for(seed: int, *path: str) -> random.Random:
    """Independent generator for one subtask: seeded by sha256 of ``seed`` and the path."""
    key = "/".join([str(seed), *path]).encode()
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))


# ---------------------------------------------------------------------------
# families

SET_KINDS = ("interval", "geometric", "squares", "random-int", "random-rat", "convex")
POINT_KINDS = ("grid", "lines")


@dataclass(frozen=True)
class Family:
    """A parametrised family; ``n`` is the size parameter swept over.

    ``interval``: ``{1..n}``.  ``geometric``: ``base^i`` for ``i = 1..n``.
    ``squares``: ``i^2``.  ``random-int``: ``n`` distinct integers from
    ``[1, U]``.  ``random-rat``: ``n`` distinct ``p/q`` with ``p <= U``,
    ``q <= Q``.  ``convex``: ``f(i)`` for a convex map spec ``map``.
    ``grid``: ``[n] x [n]``.  ``lines``: ``k`` points ``(x, s x)``,
    ``x = 1..k``, on each of the slopes ``s = 1..n``.
    """

    kind: str
    n: int
    params: tuple = ()
    seed: int = 0

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "params": dict(self.params), "seed": self.seed}


def family(kind: str, n: int, seed: int = 0, **params) -> Family:
    return Family(kind, n, tuple(sorted(params.items())), seed)


def generate(fam: Family):
    """The set (or point set) described by ``fam``; deterministic in its fields."""
    n = fam.n
    if n < 1:
        raise ValueError("n must be at least 1")
    kind = fam.kind
    if kind == "interval":
        return RSet(range(1, n + 1))
    if kind == "geometric":
        base = Fraction(fam.param("base", 2))
        if base <= 0 or base == 1:
            raise ValueError("base must be positive and not 1")
        return RSet(base**i for i in range(1, n + 1))
    if kind == "squares":
        return RSet(i * i for i in range(1, n + 1))
    if kind == "random-int":
        U = int(fam.param("U", 10 * n))
        if U < n:
            raise ValueError("U must be at least n")
        rng = rng_for(fam.seed, "family", kind, str(n), str(U))
        return RSet(rng.sample(range(1, U + 1), n))
    if kind == "random-rat":
        U = int(fam.param("U", 10 * n))
        Q = int(fam.param("Q", 4))
        rng = rng_for(fam.seed, "family", kind, str(n), str(U), str(Q))
        out: set = set()
        if len({Fraction(p, q) for p in range(1, U + 1) for q in range(1, Q + 1)}) < n:
            raise ValueError("not enough distinct rationals for n")
        while len(out) < n:
            out.add(Fraction(rng.randint(1, U), rng.randint(1, Q)))
        return RSet(out)
    if kind == "convex":
        f = parse_convex_map(str(fam.param("map", "pow:2")))
        return RSet(f(i) for i in range(1, n + 1))
    if kind == "grid":
        return PointSet((x, y) for x in range(1, n + 1) for y in range(1, n + 1))
    if kind == "lines":
        k = int(fam.param("k", n))
        return PointSet((x, s * x) for s in range(1, n + 1) for x in range(1, k + 1))
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# quantities


def _named(name: str):
    def size(A: RSet, **kw) -> int:
        entry = named_expanders(A, names=[name], **kw)[name]
        if entry["status"] == "size-limit":
            raise SizeLimitError("named quantity", 0, kw.get("max_set_size") or 0)
        if entry["status"] != "ok":
            raise ValueError(f"{name}: {entry.get('error', entry['status'])}")
        return entry["size"]

    return size


def _prodshift_thinned(A: RSet, **kw) -> int:
    X, (z, zp, _, _) = logshift_instance(A)
    # scaling every factor by q dilates the set by q, so the size is unchanged
    # and the operands become integers that stay on the int64 path
    q = math.lcm(z.denominator, zp.denominator, *(x.denominator for x in X))
    P = RSet(q * (z * x + 1) for x in X)
    Q = RSet(q * (zp * x + 1) for x in X)
    return evaluate_size(_PRODSHIFT_SCALED, {"P": P, "Q": Q}, **kw)


_PRODSHIFT_SCALED = parse_expr("P^(2)*Q^(2)/(P^(2)*Q)")


def _shift_product(A: RSet, **kw) -> int:
    return evaluate_size("A*(A+1)", {"A": A}, **kw)


QUANTITIES: dict[str, Callable] = {
    "quad-expander": _named("quad"),
    "prodshift-5/2-thinned": _prodshift_thinned,
    "shift-product": _shift_product,
    **{name: _named(name) for name in NAMED},
}


def quantity(spec: str) -> tuple[str, Callable]:
    """A named quantity, or a raw expression in the variable ``X``."""
    if spec in QUANTITIES:
        return spec, QUANTITIES[spec]
    expr = parse_expr(spec)

    def size(A: RSet, **kw) -> int:
        return evaluate_size(expr, {"X": A}, **kw)

    return spec, size


# ---------------------------------------------------------------------------
# sweeps


def fit_exponent(rows: Sequence[tuple[int, int]]) -> tuple[float, float, list[float]]:
    """OLS slope and intercept of ``log2 size`` against ``log2 N``, with residuals."""
    if len(rows) < 2:
        raise ValueError("need at least 2 completed rows to fit")
    x = np.log2(np.array([r[0] for r in rows], dtype=float))
    y = np.log2(np.array([r[1] for r in rows], dtype=float))
    xm, ym = x.mean(), y.mean()
    slope = float(((x - xm) * (y - ym)).sum() / ((x - xm) ** 2).sum())
    intercept = float(ym - slope * xm)
    return slope, intercept, [float(v) for v in y - (slope * x + intercept)]


@dataclass
class GrowthReport:
    family: dict
    quantity: str
    rows: list = field(default_factory=list)
    exponent: Optional[float] = None
    intercept: Optional[float] = None
    residuals: list = field(default_factory=list)

    def completed(self) -> list[tuple[int, int]]:
        return [(r["N"], r["size"]) for r in self.rows if r["status"] == "ok"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "size", "log2N", "log2size"])
        for r in self.rows:
            if r["status"] == "ok":
                w.writerow([r["N"], r["size"], repr(math.log2(r["N"])), repr(math.log2(r["size"]))])
            else:
                w.writerow([r["N"], "", repr(math.log2(r["N"])), ""])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "quantity": self.quantity,
            "rows": self.rows,
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residuals": self.residuals,
        }


def sweep(
    spec: str,
    fam: Family,
    ns: Sequence[int],
    *,
    max_set_size: Optional[int] = None,
    max_pairs: Optional[int] = None,
) -> GrowthReport:
    """Exact sizes of a quantity over ``fam`` for each ``N`` in ``ns`` and the fitted exponent.

    A row whose evaluation exceeds the size or pair budget is recorded as
    aborted and left out of the fit.
    """
    name, size_of = quantity(spec)
    rep = GrowthReport(fam.describe() | {"n": list(ns)}, name)
    for N in ns:
        A = generate(replace(fam, n=N))
        try:
            size = size_of(A, max_set_size=max_set_size, max_pairs=max_pairs)
            rep.rows.append({"N": N, "size": size, "status": "ok"})
        except SizeLimitError as exc:
            rep.rows.append({"N": N, "size": None, "status": "size-limit", "error": str(exc)})
    done = rep.completed()
    if len(done) >= 2:
        rep.exponent, rep.intercept, rep.residuals = fit_exponent(done)
    return rep


def parse_range(text: str) -> list[int]:
    """``"16..256"`` (powers of two when both ends are), ``"8..48:4"``, or ``"4,8,16"``."""
    if ".." not in text:
        return [int(v) for v in text.split(",") if v.strip()]
    body, _, step = text.partition(":")
    lo, hi = (int(v) for v in body.split(".."))
    if lo > hi:
        raise ValueError("empty range")
    if step:
        return list(range(lo, hi + 1, int(step)))
    if lo > 0 and lo & (lo - 1) == 0 and hi & (hi - 1) == 0:
        out, v = [], lo
        while v <= hi:
            out.append(v)
            v *= 2
        return out
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------------------
# extremal search


@dataclass
class SearchResult:
    quantity: str
    N: int
    U: int
    seed: int
    best: RSet
    best_objective: float
    start_objective: float
    trace: list
    accepted: int

    def to_json(self) -> dict:
        return {
            "quantity": self.quantity,
            "N": self.N,
            "U": self.U,
            "seed": self.seed,
            "best": [str(v) for v in self.best],
            "best_objective": self.best_objective,
            "start_objective": self.start_objective,
            "trace": self.trace,
            "accepted": self.accepted,
        }


def extremal_search(
    spec: str,
    N: int,
    U: int,
    *,
    seed: int = 0,
    steps: int = 500,
    t0: float = 0.05,
    ratio: float = 0.95,
    every: int = 100,
    restarts: int = 1,
    max_set_size: Optional[int] = None,
) -> SearchResult:
    """Simulated annealing over ``N``-subsets of ``[1, U]`` minimising ``log|E(X)| / log N``.

    A move replaces one element by an unused one.  The temperature starts
    at ``t0`` and is multiplied by ``ratio`` every ``every`` proposals.
    Each restart runs its own chain from ``rng_for(seed, "search", r)``;
    the best chain wins and ``trace`` is its best-so-far sequence.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if U < N:
        raise ValueError("infeasible: N exceeds U")
    name, size_of = quantity(spec)
    cache: dict = {}
    log_n = math.log(N)

    def objective(xs: tuple) -> float:
        hit = cache.get(xs)
        if hit is None:
            hit = math.log(size_of(RSet(xs), max_set_size=max_set_size)) / log_n
            cache[xs] = hit
        return hit

    best_run = None
    for r in range(restarts):
        rng = rng_for(seed, "search", str(r))
        cur = tuple(sorted(rng.sample(range(1, U + 1), N)))
        cur_obj = start = objective(cur)
        best, best_obj = cur, cur_obj
        trace = [best_obj]
        accepted = 0
        for step in range(steps if U > N else 0):
            temp = t0 * ratio ** (step // every)
            members = set(cur)
            i = rng.randrange(N)
            v = rng.randint(1, U)
            while v in members:
                v = rng.randint(1, U)
            cand = tuple(sorted(members - {cur[i]} | {v}))
            obj = objective(cand)
            if obj <= cur_obj or (temp > 0 and rng.random() < math.exp((cur_obj - obj) / temp)):
                cur, cur_obj = cand, obj
                accepted += 1
                if obj < best_obj:
                    best, best_obj = cand, obj
            trace.append(best_obj)
        run = SearchResult(name, N, U, seed, RSet(best), best_obj, start, trace, accepted)
        if best_run is None or run.best_objective < best_run.best_objective:
            best_run = run
    return best_run
