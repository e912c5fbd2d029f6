import json
import random
from fractions import Fraction

import pytest

from naive import naive_eval
from sumprod.inequalities import (
    SUITES,
    best_energy_pair,
    check_garaev_sum,
    check_plunnecke,
    check_ruzsa_triangle,
    fold_expr,
    run_suite,
    shift_product_probe,
    to_json_lines,
)
from sumprod.setops import RSet, parse_expr


def test_plunnecke_examples():
    inst = check_plunnecke(RSet([0, 1]), 1, 1)
    assert (inst.lhs, inst.rhs, inst.holds) == (3, Fraction(9, 2), True)
    inst = check_plunnecke(RSet([0]), 1, 0)
    assert (inst.lhs, inst.rhs) == (1, 1)
    X = {Fraction(v) for v in (0, 1, 3)}
    inst = check_plunnecke(RSet(X), 2, 1)
    assert inst.lhs == len(naive_eval(parse_expr("X+X-X"), {"X": X}))
    assert inst.rhs == Fraction(len(naive_eval(parse_expr("X+X"), {"X": X})) ** 3, 9)


def test_fold_expression_shapes():
    assert str(fold_expr(2, 1)) == "X+X-X"
    assert str(fold_expr(0, 2)) == "-X-X"
    assert str(fold_expr(2, 1, mult=True)) == "X*X/X"
    with pytest.raises(ValueError):
        fold_expr(0, 0)


def test_multiplicative_forms_reject_zero():
    with pytest.raises(ValueError):
        check_plunnecke(RSet([0, 1]), 1, 1, "multiplicative")


def test_ruzsa_examples():
    X = RSet([0, 1])
    inst = check_ruzsa_triangle(X, X, X)
    assert (inst.lhs, inst.rhs) == (3, Fraction(9, 2))
    inst = check_ruzsa_triangle(RSet([1, 5, 7]), RSet([2]), RSet([2]), variant="sum-form")
    assert inst.lhs == 1 and inst.holds


def test_garaev_examples():
    X = RSet([0, 1])
    inst = check_garaev_sum([X, X], X)
    assert (inst.lhs, inst.rhs) == (3, Fraction(9, 2))
    single = check_garaev_sum([RSet([1, 4, 9])], RSet([0, 2]))
    assert single.lhs == 3 and single.rhs == 6
    sets = [RSet([1, 2, 3]), RSet([2, 4]), RSet([1, 3, 9])] * 2 + [RSet([5, 6])] * 2
    inst = check_garaev_sum(sets, RSet([1, 2]), "multiplicative")
    assert inst.holds


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_find_no_violation(name):
    assert all(i.holds for i in run_suite(name, 150, random.Random(9)))


def test_suite_output_is_reproducible():
    a = to_json_lines(run_suite("plunnecke", 30, random.Random(4)))
    b = to_json_lines(run_suite("plunnecke", 30, random.Random(4)))
    assert a == b
    row = json.loads(a.splitlines()[0])
    assert set(row) == {"name", "operands-hash", "lhs", "rhs", "holds"}


def test_shift_product_probe():
    assert shift_product_probe(RSet([1])).size == 1
    rep = shift_product_probe(RSet(range(1, 17)))
    A = set(range(1, 17))
    assert rep.size == len({a * (b + 1) for a in A for b in A})
    with pytest.raises(ValueError):
        shift_product_probe(RSet([1, 2]), 0)


def test_best_energy_pair():
    rep = best_energy_pair(RSet([1, 2]))
    assert rep.verified and rep.bound <= rep.product_size
    A = RSet(range(1, 11))
    rep = best_energy_pair(A)
    assert rep.verified
    # the minimum can be no larger than the average energy over all pairs
    from sumprod.setops import mult_energy

    energies = [mult_energy(RSet(a * x + 1 for x in A), RSet(b * x + 1 for x in A)) for a in A for b in A]
    assert rep.energy == min(energies)
    assert rep.energy * len(energies) <= sum(energies)
    with pytest.raises(ValueError):
        best_energy_pair(RSet([4]))
