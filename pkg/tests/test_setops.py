import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from naive import NaiveZeroDivision, naive_eval, random_expr, random_rset
from sumprod.setops import (
    ExprSyntaxError,
    RSet,
    SizeLimitError,
    UnboundVariableError,
    ZeroDivisorError,
    depth,
    evaluate,
    evaluate_size,
    evaluate_view,
    free_vars,
    mult_energy,
    parse_expr,
    to_text,
)

small_sets = st.sets(st.fractions(min_value=-20, max_value=20, max_denominator=5), min_size=1, max_size=8)


def engine_or_error(expr, env, **kw):
    try:
        return set(evaluate(expr, env, **kw))
    except ZeroDivisorError:
        return "zero"


def oracle_or_error(expr, env):
    try:
        return naive_eval(expr, env)
    except NaiveZeroDivision:
        return "zero"


def test_basic_sumset_and_ratio_set():
    A = RSet([1, 2, 3])
    assert evaluate("A+A", {"A": A}) == RSet(range(2, 7))
    assert evaluate("A/A", {"A": A}) == RSet([Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), 1, Fraction(3, 2), 2, 3])
    assert evaluate("A^(2)", {"A": A}) == RSet([1, 2, 3, 4, 6, 9])
    assert evaluate("A^2", {"A": A}) == RSet([1, 4, 9])


def test_text_io_round_trip():
    A = RSet.from_text("# header\n1/2\n\n-3\n2/4\n")
    assert A == RSet([Fraction(1, 2), -3])
    assert RSet.from_text(A.to_text()) == A


@pytest.mark.parametrize(
    "text",
    ["X+Y-X", "(z*X+1)^(2)*(w*X+1)/(z*X+1)", "-(X|Y)*3/2", "(X+1)^3-X^(3)", "X-(Y-X)", "X/(Y/X)"],
)
def test_print_parse_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(to_text(e)) == e


def test_parse_errors_carry_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("X + $")
    assert info.value.pos == 4
    with pytest.raises(ExprSyntaxError):
        parse_expr("(X+Y")


def test_unbound_and_zero_divisor():
    with pytest.raises(UnboundVariableError) as info:
        evaluate("X+Q", {"X": RSet([1])})
    assert info.value.names == ["Q"]
    with pytest.raises(ZeroDivisorError):
        evaluate("X/X", {"X": RSet([0, 1])})


def test_size_limit_is_enforced_on_intermediates():
    A = RSet(range(100))
    with pytest.raises(SizeLimitError):
        evaluate("A*A", {"A": A}, max_set_size=1000)
    assert evaluate_size("A*A-A*A", {"A": RSet(range(5))}, max_set_size=1000) > 0
    with pytest.raises(SizeLimitError):
        evaluate("A+A", {"A": A}, max_pairs=50)


def test_free_vars_and_depth():
    e = parse_expr("(X+Y)*Z-1")
    assert free_vars(e) == {"X", "Y", "Z"}
    assert depth(e) == 3


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2**32), small_sets, small_sets)
def test_matches_nested_loop_oracle(seed, xs, ys):
    rng = random.Random(seed)
    expr = random_expr(rng, rng.randint(1, 3))
    env = {"X": RSet(xs), "Y": RSet(ys)}
    assert engine_or_error(expr, env) == oracle_or_error(expr, {"X": xs, "Y": ys})


@pytest.mark.parametrize("strategy", ["hash", "merge", "dense"])
def test_strategies_agree(strategy):
    rng = random.Random(7)
    for _ in range(60):
        expr = random_expr(rng, 3)
        env = {"X": RSet(random_rset(rng, rational=False)), "Y": RSet(random_rset(rng, rational=False))}
        assert engine_or_error(expr, env, strategy=strategy) == engine_or_error(expr, env)


def test_jobs_do_not_change_result():
    A = RSet(random_rset(random.Random(1), max_size=40, lo=-10**6, hi=10**6))
    one = evaluate("A*A+A-A", {"A": A}, jobs=1)
    assert evaluate("A*A+A-A", {"A": A}, jobs=3) == one


def test_huge_values_fall_back_to_exact_objects():
    A = RSet([10**30, 10**30 + 1, Fraction(1, 10**25)])
    got = set(evaluate("A*A-A", {"A": A}))
    assert got == naive_eval(parse_expr("A*A-A"), {"A": set(A)})


def test_blocked_enumeration_matches_direct():
    # |A|^2 > one enumeration block, so several blocks and merges run
    A = RSet(range(0, 4800, 3))
    B = RSet(x * x for x in range(1600))
    size = evaluate_size("A+B", {"A": A, "B": B})
    assert size == len({a + b for a in A for b in B})


def test_view_answers_membership_without_materialising():
    A = RSet([Fraction(1, 2), 2, 3])
    view = evaluate_view("A*A+1", {"A": A})
    full = evaluate("A*A+1", {"A": A})
    assert len(view) == len(full)
    assert all(x in view for x in full)
    assert Fraction(7, 3) not in view
    assert view.to_rset() == full


@given(small_sets, small_sets)
def test_mult_energy_matches_quadruple_count(xs, ys):
    naive = sum(1 for a in xs for b in ys for c in xs for d in ys if a * b == c * d)
    assert mult_energy(RSet(xs), RSet(ys)) == naive
