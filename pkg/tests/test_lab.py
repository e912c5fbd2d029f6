import math

import numpy as np
import pytest

from sumprod.dotprod import PointSet
from sumprod.lab import (
    extremal_search,
    family,
    fit_exponent,
    generate,
    parse_range,
    quantity,
    rng_for,
    sweep,
)
from sumprod.setops import RSet


def test_family_examples():
    assert generate(family("interval", 4)) == RSet([1, 2, 3, 4])
    assert generate(family("geometric", 3, base=2)) == RSet([2, 4, 8])
    pts = generate(family("lines", 2, k=3))
    assert isinstance(pts, PointSet) and len(pts) == 6
    assert (3, 6) in pts
    assert len(generate(family("grid", 3))) == 9
    assert generate(family("convex", 3, map="pow:3")) == RSet([1, 8, 27])


def test_random_families_are_seeded():
    a = generate(family("random-int", 20, seed=5, U=100))
    assert a == generate(family("random-int", 20, seed=5, U=100))
    assert a != generate(family("random-int", 20, seed=6, U=100))
    assert len(generate(family("random-rat", 15, seed=1, U=10, Q=3))) == 15
    with pytest.raises(ValueError):
        generate(family("random-int", 20, U=10))
    with pytest.raises(ValueError):
        generate(family("nothing", 3))


def test_rng_streams_are_independent_and_stable():
    assert rng_for(7, "a").random() == rng_for(7, "a").random()
    assert rng_for(7, "a").random() != rng_for(7, "b").random()


def test_parse_range():
    assert parse_range("16..256") == [16, 32, 64, 128, 256]
    assert parse_range("8..20:4") == [8, 12, 16, 20]
    assert parse_range("3..5") == [3, 4, 5]
    assert parse_range("4,8") == [4, 8]


def test_fit_reproducible_from_table():
    rep = sweep("X+X", family("geometric", 0, base=2), [4, 8, 16, 32])
    rows = rep.completed()
    x = np.log2([n for n, _ in rows])
    y = np.log2([s for _, s in rows])
    slope = np.polyfit(x, y, 1)[0]
    assert abs(slope - rep.exponent) < 1e-9
    # |X+X| = n(n+1)/2 for a geometric progression
    assert [s for _, s in rows] == [n * (n + 1) // 2 for n, _ in rows]


def test_fit_exponent_exact_power():
    slope, intercept, res = fit_exponent([(n, 3 * n * n) for n in (2, 4, 8)])
    assert abs(slope - 2) < 1e-12 and abs(intercept - math.log2(3)) < 1e-12
    with pytest.raises(ValueError):
        fit_exponent([(2, 4)])


def test_sweep_records_aborted_rows():
    rep = sweep("X*X*X", family("interval", 0), [4, 8, 64], max_set_size=1000)
    assert [r["status"] for r in rep.rows] == ["ok", "ok", "size-limit"]
    assert rep.exponent is not None
    csv_lines = rep.to_csv().splitlines()
    assert csv_lines[0] == "N,size,log2N,log2size"
    assert csv_lines[3].startswith("64,,")


def test_counterexample_sweep_stays_quadratic():
    rep = sweep("counterexample", family("interval", 0), [8, 16, 32])
    assert rep.exponent <= 2.05


def test_quantity_lookup():
    name, size = quantity("quad-expander")
    assert name == "quad-expander" and size(RSet(range(1, 6))) > 0
    _, size = quantity("X-X")
    assert size(RSet([1, 2, 4])) == 7


def test_search_forced_universe():
    res = extremal_search("X+X", 8, 8, seed=1, steps=20)
    assert res.best == RSet(range(1, 9))
    assert abs(res.best_objective - math.log(15) / math.log(8)) < 1e-12


def test_search_trace_and_determinism():
    a = extremal_search("X+X", 8, 64, seed=3, steps=300, restarts=2)
    b = extremal_search("X+X", 8, 64, seed=3, steps=300, restarts=2)
    assert a.to_json() == b.to_json()
    assert a.best_objective <= a.start_objective
    assert all(u >= v for u, v in zip(a.trace, a.trace[1:]))
    with pytest.raises(ValueError):
        extremal_search("X+X", 9, 8)


def test_short_search_stays_above_interval_value():
    res = extremal_search("prodshift-5/2-thinned", 10, 200, seed=2, steps=60)
    _, size = quantity("prodshift-5/2-thinned")
    interval = math.log(size(RSet(range(1, 11)))) / math.log(10)
    assert res.best_objective >= interval
