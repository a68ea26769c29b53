"""Choosing a small B' ⊆ B that makes |A+B'| large.

Every strategy returns a :class:`SelectionResult` whose ``achieved`` value is
recomputable as ``len(translate_union(A, chosen))``.  Ties are always broken
towards the lexicographically smallest witness.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import _kernels
from .core import (
    AnySet,
    ZpSet,
    ZSet,
    bound_for,
    check_same_ambient,
    like,
    project_fibres,
    projection_size,
    rotate,
    sumset,
    translate_rows,
    union_of_rows,
)
from .errors import BudgetExceededError, InvalidInputError
from .rng import rng_for

EXHAUSTIVE_BUDGET = 10**8


def _frac_str(x: Fraction | int) -> str | int:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


@dataclass(frozen=True)
class SelectionResult:
    strategy: str
    chosen: tuple[int, ...]
    achieved: int
    bound: int | Fraction
    c: int
    seed: int | None = None
    average: Fraction | None = None

    @property
    def gap(self) -> int | Fraction:
        return self.achieved - self.bound

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "strategy": self.strategy,
            "chosen": list(self.chosen),
            "achieved": self.achieved,
            "bound": _frac_str(self.bound),
            "gap": _frac_str(self.gap),
            "c": self.c,
        }
        if self.seed is not None:
            d["seed"] = self.seed
        if self.average is not None:
            d["average"] = _frac_str(self.average)
        return d


def _check_pair(A: AnySet, B: AnySet) -> None:
    check_same_ambient(A, B)
    if len(A) == 0 or len(B) == 0:
        raise InvalidInputError("A and B must be non-empty")


def subset_budget(k: int, c: int) -> int:
    return math.comb(k, min(c, k))


def best_subset_exhaustive(A: AnySet, B: AnySet, c: int, target: int | None = None) -> SelectionResult:
    """Maximise |A+B'| over B' ∈ B^(c) by enumeration.

    If ``target`` is given the search stops at the first B' (in lexicographic
    order) with |A+B'| >= target; ``achieved`` is then only a witness value.
    """
    _check_pair(A, B)
    if c < 1:
        raise InvalidInputError("budget c must be at least 1")
    k = len(B)
    cc = min(c, k)
    if subset_budget(k, cc) > EXHAUSTIVE_BUDGET:
        raise BudgetExceededError(f"C({k},{cc}) subsets exceeds the 10^8 evaluation budget")
    tr = translate_rows(A, B)
    best, idx = _kernels.best_union(tr.rows, cc, -1 if target is None else target)
    chosen = tuple(B.elements[i] for i in idx)
    strategy = "exhaustive" if target is None else "exhaustive-target"
    return SelectionResult(strategy, chosen, best, bound_for(A, B), c)


def max_union(A: AnySet, B: AnySet, c: int) -> int:
    return best_subset_exhaustive(A, B, c).achieved


# ---------------------------------------------------------------------------
# endpoint-plus-scan


def _normalized(B: ZSet) -> tuple[int, int, tuple[int, ...]]:
    shift = B.min
    return shift, B.max - shift, tuple(b - shift for b in B.elements)


def endpoint_scan_values(A: ZSet, B: ZSet) -> list[int]:
    """|A+{0,b,m}| for each b in B\\{m}, with B translated to start at 0."""
    rows = translate_rows(A, B).rows
    return _kernels.union_sizes(rows[0] | rows[-1], rows[:-1])


def endpoint_plus_scan(A: ZSet, B: ZSet) -> SelectionResult:
    """Best triple of the form {min B, b, max B} and the exact average over b.

    When |A| >= |B| the achieved value is at least |A|+|B|-1.
    """
    if not isinstance(A, ZSet) or not isinstance(B, ZSet):
        raise InvalidInputError("endpoint_plus_scan works in Z")
    _check_pair(A, B)
    bound = len(A) + len(B) - 1
    if len(B) == 1:
        return SelectionResult("endpoints", B.elements, len(A), bound, 3, average=Fraction(len(A)))
    shift, m, bs = _normalized(B)
    vals = endpoint_scan_values(A, B)
    best = max(vals)
    b = bs[vals.index(best)]
    chosen = tuple(sorted({shift, shift + b, shift + m}))
    return SelectionResult("endpoints", chosen, best, bound, 3, average=Fraction(sum(vals), len(vals)))


@dataclass(frozen=True)
class ScanProfile:
    """Per-b breakdown of the endpoint scan, B translated to start at 0."""

    m: int
    bs: tuple[int, ...]
    values: tuple[int, ...]
    base: int
    new_coverage: tuple[int, ...]
    proj_a: int
    proj_b: int

    @property
    def average(self) -> Fraction:
        return Fraction(sum(self.values), len(self.values))

    @property
    def average_new_coverage(self) -> Fraction:
        return Fraction(sum(self.new_coverage), len(self.new_coverage))


def scan_profile(A: ZSet, B: ZSet, A1: ZSet | None = None) -> ScanProfile:
    """Endpoint scan with the coverage outside π_m^{-1}(π_m(A)) for each b.

    ``A1`` (default A) is the set whose translates are measured against the
    residues of A.
    """
    if len(B) < 2:
        raise InvalidInputError("scan profile needs |B| >= 2")
    _, m, bs = _normalized(B)
    bs = bs[:-1]
    vals = tuple(endpoint_scan_values(A, B))
    rows = translate_rows(A, B).rows
    base = (rows[0] | rows[-1]).bit_count()
    res_a = {x % m for x in A.elements}
    src = A if A1 is None else A1
    new = tuple(sum(1 for x in src.elements if (x + b) % m not in res_a) for b in bs)
    return ScanProfile(m, bs, vals, base, new, len(res_a), projection_size(B, m))


def scan_lower_bound(A: ZSet, B: ZSet) -> Fraction:
    """Proven lower bound for the endpoint-scan average.

    Returns the larger of |A| + |π_m(A)| + |A|·max(0, (|B|-1-|π_m(A)|)/(|B|-1))
    and, when |A| = |B|, |A|+|B|-1 + max(0, ((2|π_m(A)|-m)(m-(|B|-1)) - 1)/(|B|-1)).
    """
    if not isinstance(A, ZSet) or not isinstance(B, ZSet):
        raise InvalidInputError("scan_lower_bound works in Z")
    if len(A) == 0 or len(B) < 2:
        raise InvalidInputError("need non-empty A and |B| >= 2")
    m = B.max - B.min
    na, nb = len(A), len(B)
    pa = projection_size(A, m)
    general = na + pa + na * max(Fraction(0), Fraction(nb - 1 - pa, nb - 1))
    if na != nb:
        return general
    balanced = na + nb - 1 + max(Fraction(0), Fraction((2 * pa - m) * (m - (nb - 1)) - 1, nb - 1))
    return max(general, balanced)


# ---------------------------------------------------------------------------
# pairs


def best_pair(A: AnySet, B: AnySet) -> SelectionResult:
    """Best two translates via |A+{b1,b2}| = |A| + f_A(b2-b1)."""
    _check_pair(A, B)
    if len(B) < 2:
        raise InvalidInputError("best_pair needs |B| >= 2")
    els = B.elements
    if isinstance(A, ZpSet):
        p = A.p
        diffs = {(y - x) % p for i, x in enumerate(els) for y in els[i + 1:]}
        gain = {s: len(A) - (A.bits & rotate(A.bits, s, p)).bit_count() for s in diffs}

        def diff_of(x: int, y: int) -> int:
            return (y - x) % p
    else:
        a = A.mask
        diffs = {y - x for i, x in enumerate(els) for y in els[i + 1:]}
        gain = {s: len(A) - (a & (a << s)).bit_count() for s in diffs}

        def diff_of(x: int, y: int) -> int:
            return y - x

    top = max(gain.values())
    chosen = next(
        (x, y) for i, x in enumerate(els) for y in els[i + 1:] if gain[diff_of(x, y)] == top
    )
    return SelectionResult("pair", chosen, len(A) + top, bound_for(A, B), 2)


# ---------------------------------------------------------------------------
# expectations and popularity


def representation_counts(A: AnySet, B: AnySet) -> Counter:
    """r(x) = |(x - A) ∩ B| for every x in A+B."""
    check_same_ambient(A, B)
    if isinstance(A, ZpSet):
        p = A.p
        return Counter((a + b) % p for a in A.elements for b in B.elements)
    return Counter(a + b for a in A.elements for b in B.elements)


def expected_union_exact(A: AnySet, B: AnySet, c: int) -> Fraction:
    """E |A+B'| for B' uniform in B^(c), in closed form.

    x ∈ A+B is missed exactly when B' avoids the r(x) elements b with x-b ∈ A,
    which happens with probability C(|B|-r(x), c) / C(|B|, c).
    """
    _check_pair(A, B)
    if c < 1:
        raise InvalidInputError("budget c must be at least 1")
    k = len(B)
    cc = min(c, k)
    r = representation_counts(A, B)
    missed = sum(math.comb(k - v, cc) for v in r.values())
    return len(r) - Fraction(missed, math.comb(k, cc))


@dataclass(frozen=True)
class PopularitySplit:
    alpha: Fraction
    counts: dict[int, int]
    popular: tuple[int, ...]
    unpopular: tuple[int, ...]


def popularity_split(A: AnySet, B: AnySet, alpha) -> PopularitySplit:
    """Partition A+B by whether r(x) >= alpha·|B|."""
    _check_pair(A, B)
    alpha = Fraction(alpha)
    if not (0 < alpha <= 1):
        raise InvalidInputError("alpha must lie in (0, 1]")
    r = representation_counts(A, B)
    if sum(r.values()) != len(A) * len(B):
        raise AssertionError("representation counts do not sum to |A||B|")
    thr = alpha * len(B)
    popular = tuple(sorted(x for x, v in r.items() if v >= thr))
    unpopular = tuple(sorted(x for x, v in r.items() if v < thr))
    return PopularitySplit(alpha, dict(sorted(r.items())), popular, unpopular)


# ---------------------------------------------------------------------------
# heuristics


def fibre_strategy(A: ZSet, B: ZSet, d: int, s: int, trials: int, seed: int) -> SelectionResult:
    """Fibre of max B mod d plus s uniformly drawn fibres, best of ``trials``."""
    if not isinstance(A, ZSet) or not isinstance(B, ZSet):
        raise InvalidInputError("fibre_strategy works in Z")
    _check_pair(A, B)
    if d < 1 or s < 0 or trials < 1:
        raise InvalidInputError("need d >= 1, s >= 0 and trials >= 1")
    fib = project_fibres(B, d)
    anchor = set(fib.fibre(B.max).elements)
    best = None
    for t in range(trials):
        ws = rng_for(seed, t).integers(0, d, size=s)
        chosen = set(anchor)
        for w in ws:
            chosen.update(fib.fibre(int(w)).elements)
        key = tuple(sorted(chosen))
        val = len(sumset(A, ZSet(key)))
        if best is None or val > best[0] or (val == best[0] and key < best[1]):
            best = (val, key)
    val, key = best
    return SelectionResult("fibre", key, val, bound_for(A, B), len(key), seed=seed)


def greedy_select(A: AnySet, B: AnySet, c: int) -> SelectionResult:
    """Add the translate with the largest marginal gain, smallest b on ties."""
    _check_pair(A, B)
    if c < 1:
        raise InvalidInputError("budget c must be at least 1")
    rows = translate_rows(A, B).rows
    covered = 0
    picked: list[int] = []
    used = set()
    for _ in range(min(c, len(rows))):
        gains = [
            (-1 if i in used else (r & ~covered).bit_count(), -i) for i, r in enumerate(rows)
        ]
        g, neg_i = max(gains)
        if picked and g <= 0:
            break
        i = -neg_i
        used.add(i)
        picked.append(i)
        covered |= rows[i]
    chosen = tuple(sorted(B.elements[i] for i in picked))
    return SelectionResult("greedy", chosen, covered.bit_count(), bound_for(A, B), c)


def achieved_size(A: AnySet, chosen) -> int:
    """Recompute |A+chosen| from scratch."""
    return len(sumset(A, like(A, chosen)))


def union_size_of(A: AnySet, B: AnySet, idx) -> int:
    rows = translate_rows(A, B).rows
    return union_of_rows(rows[i] for i in idx).bit_count()
