from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumprod.exactnum import (
    Cut,
    Poly,
    as_rat,
    count_sign_changes,
    format_rat,
    isolate_real_roots,
    parse_rat,
    sign_on,
    squarefree_part,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def from_roots(roots_with_mult):
    p = Poly.const(1)
    for r, m in roots_with_mult:
        p = p * Poly((-Fraction(r), 1)) ** m
    return p


def test_parse_and_format_round_trip():
    assert parse_rat("-3/7") == Fraction(-3, 7)
    assert parse_rat(" 42 ") == 42
    assert format_rat(Fraction(6, 4)) == "3/2"
    assert format_rat(Fraction(-5)) == "-5"
    with pytest.raises(ValueError):
        parse_rat("1.5")
    with pytest.raises(ZeroDivisionError):
        parse_rat("1/0")


@given(rats)
def test_format_parse_inverse(r):
    assert parse_rat(format_rat(r)) == r


def test_as_rat_rejects_floats():
    with pytest.raises(TypeError):
        as_rat(0.5)
    assert as_rat("2/4") == Fraction(1, 2)


def test_poly_arithmetic():
    t = Poly.t()
    p = (t + 1) ** 3
    assert p.coeffs == (1, 3, 3, 1)
    assert p.derivative() == Poly((3, 6, 3))
    assert p(Fraction(1, 2)) == Fraction(27, 8)
    assert p.shift(-1) == t**3
    q, r = p.divmod(t + 1)
    assert r.is_zero() and q == (t + 1) ** 2
    assert (t * t - 1).compose(t + 1) == Poly((0, 2, 1))


@given(st.lists(rats, min_size=1, max_size=5), st.lists(rats, min_size=1, max_size=5), rats)
def test_poly_ring_homomorphism(a, b, x):
    p, q = Poly(a), Poly(b)
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


def test_squarefree_part_drops_multiplicity():
    p = from_roots([(1, 3), (2, 2), (-1, 1)])
    assert squarefree_part(p).monic() == from_roots([(1, 1), (2, 1), (-1, 1)])


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(1, 3)), min_size=1, max_size=5, unique_by=lambda x: x[0]))
def test_isolation_matches_known_roots(roots):
    p = from_roots(roots)
    intervals = isolate_real_roots(p)
    expected = sorted(r for r, _ in roots)
    assert len(intervals) == len(expected)
    for (a, b), r in zip(intervals, expected):
        assert a < r < b
        assert p(a) != 0 and p(b) != 0
    for (a1, b1), (a2, b2) in zip(intervals, intervals[1:]):
        assert b1 <= a2


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(1, 4)), min_size=1, max_size=5, unique_by=lambda x: x[0]))
def test_sign_changes_only_at_odd_multiplicity(roots):
    p = from_roots(roots)
    n, crossings = count_sign_changes(p)
    odd = sorted(r for r, m in roots if m % 2)
    assert n == len(odd)
    for (a, b), r in zip(crossings, odd):
        assert a < r < b


def test_window_is_open():
    p = from_roots([(0, 1), (3, 1), (5, 1)])
    got = isolate_real_roots(p, Fraction(0), Fraction(5))
    assert len(got) == 1 and got[0][0] < 3 < got[0][1]


def test_irrational_roots_and_cut():
    p = Poly((-2, 0, 1))  # t^2 - 2
    (a1, b1), (a2, b2) = isolate_real_roots(p)
    cut = Cut(p, a2, b2)
    assert cut.compare(Fraction(141, 100)) == -1
    assert cut.compare(Fraction(142, 100)) == 1
    assert abs(float(Fraction(cut.approx(9))) - 2**0.5) < 1e-8
    assert Cut.rational(3).compare(3) == 0


def test_sign_on_and_zero_poly():
    p = from_roots([(0, 2)])
    assert sign_on(p, Fraction(-1), Fraction(1)) == 1
    with pytest.raises(ValueError):
        count_sign_changes(Poly())
