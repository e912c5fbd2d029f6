"""Command-line frontend: ``sumprod {eval,witness,dotprod,sweep,search,check}``.

Exit codes: 0 success, 1 failed verification or a violated inequality,
2 usage, 3 parse or binding error, 4 failed precondition, 5 size limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .convexity import ConvexityError, parse_convex_map
from .dotprod import PointSet, dot_product_set, pipeline_run
from .exactnum import format_rat, parse_rat
from .expanders import (
    HypothesisError,
    ShiftPair,
    box_witnesses,
    every_second,
    expansion2_witnesses,
    garaev_equality,
    main_expander_run,
    select_pairs,
    squeeze_witnesses,
)
from .inequalities import SUITES, random_set, run_suite
from .lab import Family, POINT_KINDS, SET_KINDS, extremal_search, generate, parse_range, rng_for, sweep
from .setops import (
    ExprSyntaxError,
    RSet,
    SizeLimitError,
    UnboundVariableError,
    ZeroDivisorError,
    evaluate,
    evaluate_size,
    parse_expr,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION, EXIT_SIZE = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _family_spec(text: str, seed: int) -> Optional[Family]:
    """``kind:n[:key=val,...]`` for a generated family, else None."""
    head, _, rest = text.partition(":")
    if head not in SET_KINDS + POINT_KINDS or not rest:
        return None
    n_text, _, params = rest.partition(":")
    kv = []
    for item in filter(None, params.split(",")):
        k, _, v = item.partition("=")
        kv.append((k, v))
    return Family(head, int(n_text), tuple(sorted(kv)), seed)


def load_set(text: str, seed: int = 0) -> RSet:
    """A set from a file path, a family spec like ``interval:12``, or a literal ``{1,2,3}``."""
    if os.path.exists(text):
        with open(text) as fh:
            return RSet.from_text(fh.read())
    fam = _family_spec(text, seed)
    if fam is not None:
        out = generate(fam)
        if not isinstance(out, RSet):
            raise UsageError(f"{text!r} describes a point set")
        return out
    body = text.strip().strip("{}")
    try:
        return RSet(parse_rat(v) for v in body.replace(",", " ").split())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read a set from {text!r}") from None


def load_points(text: str, seed: int = 0) -> PointSet:
    if os.path.exists(text):
        with open(text) as fh:
            return PointSet.from_text(fh.read())
    fam = _family_spec(text, seed)
    if fam is not None and fam.kind in POINT_KINDS:
        return generate(fam)
    raise UsageError(f"cannot read a point set from {text!r}")


def _bindings(items: Sequence[str], seed: int) -> dict:
    out = {}
    for item in items:
        name, eq, value = item.partition("=")
        if not eq or not name:
            raise UsageError(f"binding {item!r} is not NAME=VALUE")
        out[name.strip()] = load_set(value.strip(), seed)
    return out


def _rats(text: str) -> list:
    return [parse_rat(v) for v in text.replace("(", "").replace(")", "").split(",")]


def _emit(args, payload, plain: Optional[str] = None) -> None:
    if args.format == "plain" and plain is not None:
        sys.stdout.write(plain if plain.endswith("\n") else plain + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    expr = parse_expr(args.expr)
    b = _bindings(args.bind, args.seed)
    kw = dict(max_set_size=args.max_set_size, max_pairs=args.max_pairs, jobs=args.jobs, strategy=args.strategy)
    if args.size:
        n = evaluate_size(expr, b, **kw)
        _emit(args, {"expr": args.expr, "size": n}, str(n))
        return EXIT_OK
    s = evaluate(expr, b, **kw)
    _emit(args, {"expr": args.expr, "size": len(s), "set": [format_rat(v) for v in s]}, s.to_text() or "\n")
    return EXIT_OK


def _shift_quad(args, A: RSet, flavor: str) -> tuple:
    if args.shift:
        h = _rats(args.shift)
        if len(h) != 4:
            raise UsageError("--shift needs h1,h1',h2,h2'")
        return tuple(h)
    near, second = select_pairs(A, flavor)
    return near.lo, near.hi, second.lo, second.hi


def cmd_witness(args) -> int:
    A = load_set(args.set, args.seed)
    if args.thin:
        A = every_second(A)
    f1 = parse_convex_map(args.map)
    f2 = parse_convex_map(args.map2 or args.map)
    flavor = "multiplicative" if f1.is_multiplicative else "additive"
    kw = dict(max_set_size=args.max_set_size)
    kind = args.construction
    if kind == "squeeze":
        if args.shift:
            lo, hi = _rats(args.shift)
        else:
            near, _ = select_pairs(A, flavor)
            lo, hi = near.lo, near.hi
        cert = squeeze_witnesses(A, f1, ShiftPair(lo, hi, flavor), **kw)
        out, ok = cert.to_json(), cert.verified
    elif kind == "expansion2":
        c1, c2 = expansion2_witnesses(A, f1, **kw)
        out, ok = {"first": c1.to_json(), "second": c2.to_json()}, c1.verified and c2.verified
    elif kind == "boxes":
        rep = box_witnesses(A, f1, f2, _shift_quad(args, A, flavor), check_spacing=not args.no_spacing_check, **kw)
        out, ok = rep.to_json(), rep.verified
    else:
        rep = main_expander_run(A, f1, f2, _shift_quad(args, A, flavor), jobs=args.jobs, **kw)
        out, ok = rep.to_json(witnesses=args.witnesses), rep.verified
    if not args.witnesses and kind in ("squeeze", "expansion2"):
        for c in (out, *out.values()):
            if isinstance(c, dict):
                c.pop("witnesses", None)
    out["construction"] = kind
    _emit(args, out, f"{kind}: verified={ok}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dotprod(args) -> int:
    P = load_points(args.points, args.seed)
    lam = dot_product_set(P)
    rep = pipeline_run(P, parse_rat(args.c))
    out = {"points": len(P), "lambda_size": len(lam), "pipeline": rep.to_json()}
    if args.show_set:
        out["lambda"] = [format_rat(v) for v in lam]
    _emit(args, out, f"|P|={len(P)} |Lambda(P)|={len(lam)} pipeline={'verified' if rep.verified else rep.reason or 'failed'}")
    return EXIT_OK if (rep.verified or not rep.applicable) else EXIT_FAIL


def cmd_sweep(args) -> int:
    kv = []
    for item in args.param:
        k, _, v = item.partition("=")
        kv.append((k, v))
    fam = Family(args.family, 1, tuple(sorted(kv)), args.seed)
    rep = sweep(args.quantity, fam, parse_range(args.n), max_set_size=args.max_set_size, max_pairs=args.max_pairs)
    if args.format == "csv":
        sys.stdout.write(rep.to_csv())
    else:
        _emit(args, rep.to_json(), rep.to_csv() + f"exponent,{rep.exponent}\n")
    return EXIT_OK


def cmd_search(args) -> int:
    res = extremal_search(
        args.quantity,
        args.n,
        args.universe,
        seed=args.seed,
        steps=args.steps,
        t0=args.t0,
        ratio=args.ratio,
        every=args.every,
        restarts=args.restarts,
        max_set_size=args.max_set_size,
    )
    _emit(args, res.to_json(), f"best={res.best_objective!r} set={[str(v) for v in res.best]}")
    return EXIT_OK


def _garaev_equality_suite(trials: int, rng):
    for _ in range(trials):
        B = random_set(rng, max_size=10, lo=1, hi=60)
        while len(B) < 2:
            B = random_set(rng, max_size=10, lo=1, hi=60)
        size, want = garaev_equality(B)
        yield {"name": "garaev-equality", "operands": B.to_text().split(), "lhs": size, "rhs": want, "holds": size == want}


def cmd_check(args) -> int:
    names = {"all": [*SUITES, "garaev-equality"], "ruzsa": ["ruzsa-difference", "ruzsa-sum"]}.get(
        args.suite, [args.suite]
    )
    violations = total = 0
    for name in names:
        rng = rng_for(args.seed, "check", name)
        if name == "garaev-equality":
            rows = _garaev_equality_suite(args.trials, rng)
        else:
            rows = (i.to_json() for i in run_suite(name, args.trials, rng))
        for row in rows:
            total += 1
            violations += not row["holds"]
            if args.format != "plain":
                sys.stdout.write(json.dumps(row, sort_keys=True) + "\n")
    summary = f"{total} instances, {violations} violations"
    if args.format == "plain":
        sys.stdout.write(summary + "\n")
    else:
        sys.stderr.write(summary + "\n")
    return EXIT_OK if violations == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sumprod", description="Exact sum-product expander toolkit.")
    p.add_argument("--seed", type=int, default=None, help="seed for every randomized step")
    p.add_argument("--max-set-size", type=int, default=None, help="abort when an intermediate set exceeds this")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a set expression")
    e.add_argument("expr")
    e.add_argument("-b", "--bind", action="append", default=[], metavar="NAME=SET",
                   help="SET is a file, a family like interval:8, or a literal {1,2,3}")
    e.add_argument("--size", action="store_true", help="print only the size")
    e.add_argument("--max-pairs", type=int, default=None)
    e.add_argument("--strategy", choices=("auto", "hash", "merge", "dense"), default="auto")
    e.set_defaults(run=cmd_eval)

    w = sub.add_parser("witness", help="run a witness construction")
    w.add_argument("construction", choices=("squeeze", "expansion2", "boxes", "main"))
    w.add_argument("--set", required=True, help="file, family spec or literal")
    w.add_argument("--map", default="pow:2", help="pow:k, cube-shift:h, poly:[c0,..]@(lo,hi) or logshift:z")
    w.add_argument("--map2", default=None, help="second map (defaults to --map)")
    w.add_argument("--shift", default=None, help="lo,hi for squeeze; h1,h1',h2,h2' otherwise")
    w.add_argument("--thin", action="store_true", help="keep every second element first")
    w.add_argument("--no-spacing-check", action="store_true", help="boxes only: skip the spacing precondition")
    w.add_argument("--witnesses", action="store_true", help="include the witness lists")
    w.set_defaults(run=cmd_witness)

    d = sub.add_parser("dotprod", help="dot-product set and pipeline report")
    d.add_argument("points", help="file of 'x y' lines, or grid:N / lines:n:k=K")
    d.add_argument("--c", default="1/3057")
    d.add_argument("--show-set", action="store_true")
    d.set_defaults(run=cmd_dotprod)

    s = sub.add_parser("sweep", help="exact sizes over a family and the fitted exponent")
    s.add_argument("quantity", help="named quantity or an expression in X")
    s.add_argument("--family", default="interval", choices=SET_KINDS)
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--n", required=True, help="16..256, 8..48:4 or 4,8,16")
    s.add_argument("--max-pairs", type=int, default=None)
    s.set_defaults(run=cmd_sweep, randomized=True)

    q = sub.add_parser("search", help="simulated annealing for slowly growing sets")
    q.add_argument("quantity")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--universe", type=int, required=True)
    q.add_argument("--steps", type=int, default=500)
    q.add_argument("--t0", type=float, default=0.05)
    q.add_argument("--ratio", type=float, default=0.95)
    q.add_argument("--every", type=int, default=100)
    q.add_argument("--restarts", type=int, default=1)
    q.set_defaults(run=cmd_search, randomized=True)

    c = sub.add_parser("check", help="randomized inequality suites")
    c.add_argument("suite", choices=("all", "ruzsa", "garaev-equality", *SUITES))
    c.add_argument("--trials", type=int, default=1000)
    c.set_defaults(run=cmd_check, randomized=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "randomized", False) and args.seed is None:
        if args.command != "sweep" or args.family in ("random-int", "random-rat"):
            parser.error(f"{args.command} needs --seed")
    if args.seed is None:
        args.seed = 0
    try:
        return args.run(args)
    except (ExprSyntaxError, UnboundVariableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except HypothesisError as exc:
        print(f"error: hypothesis failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ZeroDivisorError, ConvexityError, ValueError) as exc:
        print(f"error: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
