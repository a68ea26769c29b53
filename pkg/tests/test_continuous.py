import random
from fractions import Fraction

import pytest

from sumset_lab.continuous import (
    IntervalUnion,
    as_fraction,
    check_continuous_translates,
    discretize,
    grid_cells,
    measure_union,
    sum_with_points,
)
from sumset_lab.core import ZSet
from sumset_lab.errors import InvalidInputError

I = IntervalUnion.of


def test_measure_examples():
    assert measure_union(I([(0, 1)])) == 1
    assert measure_union(I([(0, 1), (2, 3)])) == 2
    assert measure_union(I([("0.9", "1"), ("0", "0.2")], "circle")) == Fraction(3, 10)


def test_circle_normal_form_is_unique():
    a = I([("0.9", "1.2")], "circle")
    b = I([("0", "0.2"), ("-0.1", "0")], "circle")
    assert a == b
    assert a.intervals == ((0, Fraction(1, 5)), (Fraction(9, 10), 1))
    assert I([(0, 5)], "circle") == I([("0.3", "1.3")], "circle")


def test_merging_touching_intervals():
    assert I([(0, 1), (1, 2), ("1/2", "3/2")]).intervals == ((0, 2),)


def test_sum_with_points_examples():
    U = I([(0, 1), (2, 3)])
    S = sum_with_points(U, [0, 1])
    assert S == I([(0, 4)]) and S.measure == 4
    assert sum_with_points(U, [0]) == U
    C = sum_with_points(I([(0, "0.6")], "circle"), [0, "0.5"])
    assert C.measure == 1


def test_discretize_examples():
    assert discretize(I([(0, 1)]), 4) == ZSet(range(5))
    assert discretize(I([(0, 1), (2, 3)]), 1) == ZSet(range(4))
    assert discretize(I([("1/3", "1/3")]), 3) == ZSet([1])
    assert discretize(I([("1/3", "1/3")]), 2) == ZSet()


def test_endpoints_must_be_exact():
    with pytest.raises(InvalidInputError):
        as_fraction(0.1)
    with pytest.raises(InvalidInputError):
        I([("pi", 4)])
    with pytest.raises(InvalidInputError):
        I([(2, 1)])
    assert as_fraction("3/7") == Fraction(3, 7) and as_fraction("0.125") == Fraction(1, 8)


def _random_union(rng, ambient="line"):
    ivs = []
    for _ in range(rng.randint(1, 4)):
        l = Fraction(rng.randint(-20, 20), rng.randint(1, 12))
        ivs.append((l, l + Fraction(rng.randint(0, 10), rng.randint(1, 12))))
    return I(ivs, ambient)


def test_sum_with_points_never_shrinks():
    rng = random.Random(31)
    for _ in range(500):
        U = _random_union(rng, rng.choice(["line", "circle"]))
        T = [Fraction(rng.randint(-10, 10), rng.randint(1, 6)) for _ in range(rng.randint(1, 4))]
        assert sum_with_points(U, T).measure >= U.measure


def test_discretization_sandwich():
    rng = random.Random(32)
    for _ in range(1000):
        U = _random_union(rng)
        n = rng.randint(1, 200)
        k = len(U)
        got = Fraction(len(discretize(U, n)), n)
        assert U.measure - Fraction(k, n) <= got <= U.measure + Fraction(k, n)
        assert Fraction(len(grid_cells(U, n)), n) <= U.measure


@pytest.mark.parametrize(
    "A,B",
    [
        (I([(0, 1), (2, 3)]), I([(0, 1)])),
        (I([(0, 1)]), I([(0, 1)])),
        (I([(0, "0.3")], "circle"), I([(0, "0.3")], "circle")),
    ],
)
def test_translates_certify_exactly(A, B):
    r = check_continuous_translates(A, B)
    assert r.verdict == "holds"
    assert r.metrics["exact"] is True
    pts = [Fraction(t) for t in r.witness["points"]]
    assert len(pts) <= 3
    assert sum_with_points(A, pts).measure >= A.measure + B.measure


def test_translates_interval_pair_reaches_two():
    r = check_continuous_translates(I([(0, 1)]), I([(0, 1)]))
    assert Fraction(r.metrics["achieved"]) == 2


def test_unaligned_grid_refines():
    A, B = I([(0, "1/3")]), I([(0, "1/3")])
    r = check_continuous_translates(A, B, n0=2)
    assert r.verdict == "holds"
    # grid 2 has no cell inside [0, 1/3], so the first recorded level is 4
    assert [lv["grid"] for lv in r.metrics["levels"]][0] == 4
    assert r.metrics["exact"] is False


def test_hypotheses():
    assert check_continuous_translates(I([(0, 1)]), I([(0, 2)])).verdict == "hypothesis-not-met"
    big = I([(0, "0.6")], "circle")
    assert check_continuous_translates(big, big).verdict == "hypothesis-not-met"
    with pytest.raises(InvalidInputError):
        check_continuous_translates(I([(0, 1)]), I([(0, "0.5")], "circle"))


def test_circle_monotone_in_budget():
    rng = random.Random(33)
    for _ in range(40):
        A = I([(0, Fraction(rng.randint(1, 5), 20))], "circle")
        s = Fraction(rng.randint(0, 19), 20)
        B = I([(s, s + Fraction(rng.randint(1, 4), 20))], "circle")
        prev = Fraction(0)
        for c in (1, 2, 3, 4):
            r = check_continuous_translates(A, B, c=c)
            got = Fraction(r.metrics["achieved"])
            assert got >= prev
            prev = got


def test_circle_random_interval_pairs():
    rng = random.Random(34)
    for _ in range(40):
        q = rng.choice([10, 12, 15])
        a = rng.randint(1, q // 2 - 1)
        b = rng.randint(1, min(a, q - 1 - a))
        A = I([(0, Fraction(a, q))], "circle")
        s = Fraction(rng.randint(0, q - 1), q)
        B = I([(s, s + Fraction(b, q))], "circle")
        r = check_continuous_translates(A, B)
        assert r.verdict == "holds" and r.metrics["exact"]
