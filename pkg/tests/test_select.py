import random
from fractions import Fraction
from itertools import product
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sumset_lab.core import ZpSet, ZSet, projection_size, sumset
from sumset_lab.errors import BudgetExceededError, InvalidInputError
from sumset_lab.select import (
    SelectionResult,
    achieved_size,
    best_pair,
    best_subset_exhaustive,
    endpoint_plus_scan,
    expected_union_exact,
    fibre_strategy,
    greedy_select,
    popularity_split,
    representation_counts,
    scan_lower_bound,
    scan_profile,
)

small = st.lists(st.integers(0, 25), min_size=1, max_size=8).map(ZSet)


# -- exhaustive ------------------------------------------------------------------


def test_exhaustive_examples(backend):
    r = best_subset_exhaustive(ZSet([1, 2, 3, 4]), ZSet([0, 1, 2, 3]), 3)
    assert (r.achieved, r.chosen) == (7, (0, 1, 3))
    A, B = ZSet([0, 4, 5]), ZSet([0, 2, 9])
    assert best_subset_exhaustive(A, B, 5).achieved == len(sumset(A, B))
    assert best_subset_exhaustive(ZpSet(7, [0, 1]), ZpSet(7, [0, 1]), 2).achieved == 3


@settings(max_examples=150)
@given(small, small, st.integers(1, 4))
def test_exhaustive_matches_oracle(A, B, c):
    r = best_subset_exhaustive(A, B, c)
    assert (r.achieved, r.chosen) == oracles.best_subset(A.elements, B.elements, c)
    assert achieved_size(A, r.chosen) == r.achieved
    assert len(r.chosen) <= c


def test_exhaustive_budget_guard():
    B = ZSet(range(2000))
    with pytest.raises(BudgetExceededError):
        best_subset_exhaustive(ZSet([0]), B, 4)
    with pytest.raises(InvalidInputError):
        best_subset_exhaustive(ZSet([0]), B, 0)


def test_selection_result_json_field_order():
    r = SelectionResult("fibre", (0, 2), 5, 6, 2, seed=9)
    d = r.to_dict()
    assert list(d) == ["strategy", "chosen", "achieved", "bound", "gap", "c", "seed"]
    assert d["gap"] == -1


# -- endpoint scan ------------------------------------------------------------------


def test_endpoint_scan_examples(backend):
    r = endpoint_plus_scan(ZSet([1, 2, 3, 4]), ZSet([0, 1, 2, 3]))
    assert (r.achieved, r.average) == (7, 7)
    n = 6
    iv = ZSet(range(n))
    assert endpoint_plus_scan(iv, iv).achieved == 2 * n - 1
    r = endpoint_plus_scan(ZSet([0, 1, 2, 4]), ZSet([0, 1, 2, 4]))
    assert (r.achieved, r.average) == (8, Fraction(23, 3))
    assert scan_profile(ZSet([0, 1, 2, 4]), ZSet([0, 1, 2, 4])).values == (7, 8, 8)


def test_endpoint_scan_singleton_b():
    r = endpoint_plus_scan(ZSet([3, 5]), ZSet([10]))
    assert (r.chosen, r.achieved) == ((10,), 2)


@settings(max_examples=200)
@given(small, small)
def test_endpoint_scan_matches_oracle(A, B):
    if len(B) < 2:
        return
    vals = oracles.scan_values(A.elements, B.elements)
    r = endpoint_plus_scan(A, B)
    assert r.achieved == max(vals)
    assert r.average == Fraction(sum(vals), len(vals))
    assert achieved_size(A, r.chosen) == r.achieved


def test_scan_lower_bound_examples():
    A = ZSet([0, 1, 2, 4])
    assert scan_lower_bound(A, A) == Fraction(22, 3)
    iv = ZSet(range(7))
    assert scan_lower_bound(iv, iv) == 13
    with pytest.raises(InvalidInputError):
        scan_lower_bound(A, ZSet([0]))


def test_three_translates_chain_random(backend):
    rng = random.Random(11)
    for _ in range(1500):
        nb = rng.randint(2, 8)
        B = ZSet([0] + rng.sample(range(1, 40), nb - 1))
        A = ZSet(rng.sample(range(60), rng.randint(nb, 20)))
        r = endpoint_plus_scan(A, B)
        ex = best_subset_exhaustive(A, B, 3).achieved
        lb = scan_lower_bound(A, B)
        assert ex >= r.achieved >= r.average >= lb >= len(A) + len(B) - 1


def test_scan_lower_bound_dominates_when_a_is_one_smaller():
    rng = random.Random(12)
    for _ in range(500):
        nb = rng.randint(2, 9)
        B = ZSet([0] + rng.sample(range(1, 30), nb - 1))
        A = ZSet(rng.sample(range(40), nb - 1 if nb > 2 else 1))
        if len(A) >= len(B) - 1:
            assert scan_lower_bound(A, B) >= len(A) + len(B) - 1
            assert endpoint_plus_scan(A, B).average >= scan_lower_bound(A, B)


def test_new_coverage_average_bound():
    rng = random.Random(13)
    for _ in range(1000):
        B = ZSet([0] + rng.sample(range(1, 50), rng.randint(1, 10)))
        A = ZSet(rng.sample(range(-30, 80), rng.randint(1, 15)))
        A1 = ZSet(rng.sample(range(-30, 80), rng.randint(1, 15)))
        prof = scan_profile(A, B, A1)
        assert prof.proj_b == len(B) - 1
        bound = len(A1) * max(Fraction(0), Fraction(prof.proj_b - prof.proj_a, prof.proj_b))
        assert prof.average_new_coverage >= bound


def _two_translate_instance(rng):
    m = rng.randint(30, 80)
    t = rng.randint(1, 3)
    nb = rng.randint(8 * t, min(m - 1, 8 * t + 10)) + 1
    B = ZSet([0, m] + rng.sample(range(1, m), nb - 2))
    residues = rng.sample(range(m), t)
    A = ZSet({r + m * rng.randint(-4, 4) for r in residues for _ in range(rng.randint(1, 6))})
    return A, B


def test_two_random_translates_give_two_and_a_half_sizes():
    rng = random.Random(14)
    checked = 0
    for _ in range(300):
        A, B = _two_translate_instance(rng)
        m = B.max
        if not len(B) - 1 == projection_size(B, m) >= 8 * projection_size(A, m):
            continue
        inner = B.elements[:-1]
        total = sum(len(sumset(A, ZSet({0, b2, b3}))) for b2, b3 in product(inner, repeat=2))
        assert Fraction(total, len(inner) ** 2) >= Fraction(5, 2) * len(A)
        checked += 1
    assert checked >= 200


# -- pairs ------------------------------------------------------------------------------


def test_best_pair_examples():
    assert best_pair(ZSet([1, 2, 3, 4]), ZSet([0, 1, 2, 3])).achieved == 7
    A, B = ZSet([1, 2, 3, 4, 6, 7, 8]), ZSet(range(7))
    r = best_pair(A, B)
    assert r.achieved == 12 <= len(A) + len(B) - 2
    for k in (1, 5, -9):
        assert best_pair(ZSet([0, k]), ZSet([0, k])).achieved == 3
    with pytest.raises(InvalidInputError):
        best_pair(A, ZSet([0]))


@settings(max_examples=150)
@given(small, small)
def test_best_pair_matches_oracle(A, B):
    if len(B) < 2:
        return
    r = best_pair(A, B)
    assert r.achieved == oracles.best_pair_value(A.elements, B.elements)
    assert achieved_size(A, r.chosen) == r.achieved


@given(st.sampled_from([7, 11, 13]), st.data())
def test_best_pair_zp_matches_oracle(p, data):
    A = ZpSet(p, data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=p)))
    B = ZpSet(p, data.draw(st.lists(st.integers(0, p - 1), min_size=2, max_size=p, unique=True)))
    r = best_pair(A, B)
    assert r.achieved == oracles.best_pair_value(A.elements, B.elements, p)
    assert achieved_size(A, r.chosen) == r.achieved


# -- expectation -------------------------------------------------------------------------


def test_expected_union_examples():
    assert expected_union_exact(ZSet([0]), ZSet([0, 1]), 1) == 1
    assert expected_union_exact(ZSet([0]), ZSet([0, 1]), 2) == 2
    # oracle: mean of |A+B'| over the six pairs is 34/6
    assert expected_union_exact(ZSet([1, 2, 3, 4]), ZSet([0, 1, 2, 3]), 2) == Fraction(17, 3)


def test_expected_union_matches_brute_force():
    rng = random.Random(15)
    for _ in range(300):
        A = rng.sample(range(30), rng.randint(1, 8))
        B = rng.sample(range(30), rng.randint(1, 8))
        c = rng.randint(1, 4)
        got = expected_union_exact(ZSet(A), ZSet(B), c)
        assert got == oracles.average_union(A, B, c) == oracles.expected_union_formula(A, B, c)


def test_sampling_comparison_spot_check():
    """E_{B'∈B^(8)} |A+(B'∩C)| >= 0.9 E_{C'∈C^(4)} |A+C'| for |C| >= 2|B|/3.

    Both sides are evaluated exactly: x is hit by B'∩C unless B' avoids the
    r_C(x) elements of C that reach x.
    """
    rng = random.Random(16)
    mu, c = Fraction(1, 10), 8
    for _ in range(1000):
        nb = rng.randint(3, 16)
        B = rng.sample(range(60), nb)
        C = rng.sample(B, rng.randint(-(-2 * nb // 3), nb))
        A = ZSet(rng.sample(range(60), rng.randint(1, 12)))
        k, cc = nb, min(c, nb)
        rC = representation_counts(A, ZSet(C))
        lhs = sum(1 - Fraction(comb(k - v, cc), comb(k, cc)) for v in rC.values())
        rhs = expected_union_exact(A, ZSet(C), c // 2)
        assert lhs >= (1 - mu) * rhs


def test_popularity_split():
    A, B = ZSet([0, 1, 2]), ZSet([0, 1])
    ps = popularity_split(A, B, Fraction(1, 2))
    assert ps.counts == {0: 1, 1: 2, 2: 2, 3: 1}
    assert ps.popular == (0, 1, 2, 3) and ps.unpopular == ()
    ps = popularity_split(A, B, 1)
    assert ps.popular == (1, 2) and ps.unpopular == (0, 3)
    assert sum(ps.counts.values()) == len(A) * len(B)
    for bad in (0, Fraction(3, 2)):
        with pytest.raises(InvalidInputError):
            popularity_split(A, B, bad)


# -- heuristics ----------------------------------------------------------------------------


def test_fibre_strategy_examples():
    B = ZSet(range(9))
    r = fibre_strategy(ZSet([0]), B, 3, 1, 64, seed=5)
    # w = 0 gives {0,2,3,5,6,8}; w = 1 gives {1,2,4,5,7,8}; the anchor fibre alone is {2,5,8}
    assert r.chosen in {(0, 2, 3, 5, 6, 8), (1, 2, 4, 5, 7, 8), (2, 5, 8)}
    assert r.to_dict()["seed"] == 5
    assert fibre_strategy(ZSet([0, 1]), B, 1, 2, 3, seed=0).chosen == B.elements
    sparse = fibre_strategy(ZSet([0, 1]), ZSet([0, 3, 7]), 10, 2, 4, seed=1)
    assert len(sparse.chosen) <= 3


def test_fibre_strategy_is_seed_deterministic():
    A, B = ZSet(range(0, 40, 3)), ZSet(range(0, 30, 2))
    assert fibre_strategy(A, B, 4, 1, 5, seed=3) == fibre_strategy(A, B, 4, 1, 5, seed=3)


def test_greedy_examples(backend):
    r = greedy_select(ZSet([0, 1]), ZSet([0, 5, 10]), 2)
    assert (r.chosen, r.achieved) == ((0, 5), 4)
    r = greedy_select(ZSet([3, 4, 9]), ZSet([2, 7, 11]), 1)
    assert (r.chosen, r.achieved) == ((2,), 3)


def test_greedy_never_beats_exhaustive():
    rng = random.Random(17)
    for _ in range(1000):
        A = ZSet(rng.sample(range(40), rng.randint(1, 8)))
        B = ZSet(rng.sample(range(40), rng.randint(1, 8)))
        c = rng.randint(1, 4)
        g = greedy_select(A, B, c)
        assert len(A) <= g.achieved <= best_subset_exhaustive(A, B, c).achieved
        assert achieved_size(A, g.chosen) == g.achieved


@settings(max_examples=100)
@given(small, small, st.integers(-50, 50))
def test_translate_equivariance(A, B, u):
    Bu = B.shift(u)
    strategies = [
        lambda X: best_subset_exhaustive(A, X, 3),
        lambda X: greedy_select(A, X, 2),
        lambda X: endpoint_plus_scan(A, X),
    ]
    if len(B) >= 2:
        strategies.append(lambda X: best_pair(A, X))
    for f in strategies:
        r, ru = f(B), f(Bu)
        assert ru.achieved == r.achieved
        assert ru.chosen == tuple(b + u for b in r.chosen)
