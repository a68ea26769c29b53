"""Finite unions of closed rational intervals on the line and the circle R/Z.

Everything here is exact: endpoints are :class:`fractions.Fraction` and no
floating point enters a measure or a verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable

from . import _kernels
from .checks import HOLDS, INCONCLUSIVE, NOT_MET, CheckReport
from .core import ZSet, rotate
from .errors import BudgetExceededError, InvalidInputError
from .select import EXHAUSTIVE_BUDGET, endpoint_plus_scan, subset_budget

LINE = "line"
CIRCLE = "circle"
GRID_CAP = 1 << 20
# one n-bit row per grid point of B; stop refining past this many row bits
ROW_BITS_CAP = 1 << 30

__all__ = [
    "IntervalUnion",
    "as_fraction",
    "measure_union",
    "sum_with_points",
    "discretize",
    "grid_cells",
    "check_continuous_translates",
]


def as_fraction(x: Any) -> Fraction:
    """Exact rational from int, Fraction, Decimal or a 'p/q' / decimal string."""
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not endpoints")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise InvalidInputError(f"endpoint {x} is not rational")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError(f"endpoint {x!r} is not an exact rational") from None
    # floats are refused: their binary value is rarely what the caller meant
    raise InvalidInputError(f"endpoint {x!r} must be given exactly (int, Fraction or string)")


def _merge(ivs: list[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    ivs.sort()
    out: list[list[Fraction]] = []
    for l, r in ivs:
        if out and l <= out[-1][1]:
            out[-1][1] = max(out[-1][1], r)
        else:
            out.append([l, r])
    return tuple((l, r) for l, r in out)


def _wrap(l: Fraction, r: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Pieces of the arc [l, r] inside [0, 1]; arcs of length >= 1 are the whole circle."""
    if r - l >= 1:
        return [(Fraction(0), Fraction(1))]
    shift = math.floor(l)
    l, r = l - shift, r - shift
    if r <= 1:
        return [(l, r)]
    return [(l, Fraction(1)), (Fraction(0), r - 1)]


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals; on the circle they live inside [0, 1].

    Use :meth:`of` to build one; it merges overlaps and, on the circle, splits
    arcs crossing 0 so that equal sets have equal representations.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...]
    ambient: str = LINE

    @classmethod
    def of(cls, intervals: Iterable[tuple[Any, Any]], ambient: str = LINE) -> "IntervalUnion":
        if ambient not in (LINE, CIRCLE):
            raise InvalidInputError(f"unknown ambient {ambient!r}")
        pieces: list[tuple[Fraction, Fraction]] = []
        for l, r in intervals:
            l, r = as_fraction(l), as_fraction(r)
            if l > r:
                raise InvalidInputError(f"interval [{l}, {r}] has left > right")
            pieces.extend(_wrap(l, r) if ambient == CIRCLE else [(l, r)])
        merged = _merge(pieces)
        if ambient == CIRCLE and any(l == 0 and r == 1 for l, r in merged):
            merged = ((Fraction(0), Fraction(1)),)
        return cls(merged, ambient)

    @property
    def measure(self) -> Fraction:
        return sum((r - l for l, r in self.intervals), Fraction(0))

    def __len__(self) -> int:
        return len(self.intervals)

    def denominators_lcm(self) -> int:
        return math.lcm(1, *(x.denominator for iv in self.intervals for x in iv))

    def to_dict(self) -> dict[str, Any]:
        return {"ambient": self.ambient, "intervals": [[str(l), str(r)] for l, r in self.intervals]}


def measure_union(U: IntervalUnion) -> Fraction:
    return U.measure


def sum_with_points(U: IntervalUnion, T: Iterable[Any]) -> IntervalUnion:
    """U + T as a normalised union of translates."""
    pts = [as_fraction(t) for t in T]
    if not pts:
        raise InvalidInputError("translate set must be non-empty")
    return IntervalUnion.of(((l + t, r + t) for t in pts for l, r in U.intervals), U.ambient)


def discretize(U: IntervalUnion, n: int) -> ZSet:
    """Integers k with k/n in U (reduced mod n on the circle)."""
    if n < 1:
        raise InvalidInputError("grid size must be positive")
    ks: set[int] = set()
    for l, r in U.intervals:
        ks.update(range(math.ceil(l * n), math.floor(r * n) + 1))
    if U.ambient == CIRCLE:
        ks = {k % n for k in ks}
    return ZSet(ks)


def grid_cells(U: IntervalUnion, n: int) -> ZSet:
    """Indices i whose cell [i/n, (i+1)/n] lies inside U."""
    if n < 1:
        raise InvalidInputError("grid size must be positive")
    ks: set[int] = set()
    for l, r in U.intervals:
        ks.update(range(math.ceil(l * n), math.floor(r * n)))
    if U.ambient == CIRCLE:
        ks = {k % n for k in ks}
    return ZSet(ks)


def _circle_select(cells: ZSet, pts: ZSet, n: int, c: int) -> tuple[int, ...]:
    k = len(pts)
    if subset_budget(k, c) > EXHAUSTIVE_BUDGET:
        raise BudgetExceededError(f"C({k},{c}) grid subsets exceeds the 10^8 evaluation budget")
    base = 0
    for i in cells.elements:
        base |= 1 << i
    rows = [rotate(base, b, n) for b in pts.elements]
    _, idx = _kernels.best_union(rows, min(c, k), -1)
    return tuple(pts.elements[i] for i in idx)


def check_continuous_translates(
    A: IntervalUnion,
    B: IntervalUnion,
    c: int = 3,
    n0: int | None = None,
    max_grid: int = GRID_CAP,
) -> CheckReport:
    """Find c translates b_i in B with measure(A + {b_i}) >= measure(A) + measure(B).

    Grids n0, 2n0, 4n0, ... are tried.  At each level the discrete selector
    picks grid points of B against the grid cells inside A (endpoint scan on
    the line, exhaustive search mod n on the circle) and the continuous
    measure of A + {b/n} is computed exactly.  The default n0 is the least
    common denominator of all endpoints, where cells tile A exactly.
    """
    if A.ambient != B.ambient:
        raise InvalidInputError("A and B must share an ambient")
    if c < 1:
        raise InvalidInputError("budget c must be at least 1")
    mA, mB = A.measure, B.measure
    target = mA + mB
    instance = {"A": A.to_dict(), "B": B.to_dict(), "c": c}
    metrics: dict[str, Any] = {"measure_A": str(mA), "measure_B": str(mB), "target": str(target)}
    circle = A.ambient == CIRCLE
    if mB <= 0 or mA <= 0 or (not circle and mA < mB) or (circle and target >= 1):
        return CheckReport("continuous", instance, NOT_MET, metrics=metrics)
    if not circle and c < 3:
        return CheckReport("continuous", instance, NOT_MET, metrics=metrics | {"reason": "line needs c >= 3"})

    n = n0 if n0 is not None else math.lcm(A.denominators_lcm(), B.denominators_lcm())
    if n < 1:
        raise InvalidInputError("starting grid must be positive")
    levels = []
    best: tuple[Fraction, tuple[Fraction, ...], int] | None = None
    while n <= max_grid:
        cells = grid_cells(A, n)
        pts = discretize(B, n)
        if len(pts) * n > ROW_BITS_CAP:
            break
        if len(cells) and len(pts):
            try:
                if circle:
                    chosen = _circle_select(cells, pts, n, c)
                else:
                    chosen = endpoint_plus_scan(cells, pts).chosen
            except BudgetExceededError:
                break
            points = tuple(Fraction(b, n) for b in chosen)
            achieved = sum_with_points(A, points).measure
            levels.append({"grid": n, "achieved": str(achieved)})
            if best is None or achieved > best[0]:
                best = (achieved, points, n)
            slack = Fraction(len(A) + c * len(A), n)
            if achieved >= target - slack:
                break
        n *= 2

    metrics["levels"] = levels
    if best is None:
        return CheckReport("continuous", instance, INCONCLUSIVE, metrics=metrics)
    achieved, points, grid = best
    metrics |= {"achieved": str(achieved), "grid": grid, "exact": achieved >= target}
    witness = {"points": [str(t) for t in points]}
    slack = Fraction(len(A) + c * len(A), grid)
    verdict = HOLDS if achieved >= target - slack else INCONCLUSIVE
    return CheckReport("continuous", instance, verdict, witness, metrics)
