"""Restricted sums A +_F B' over a forbidden relation F ⊆ A×A."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import _kernels
from .checks import FAILS, HOLDS, NOT_MET, CheckReport, describe_set
from .core import (
    AnySet,
    ForbiddenPairs,
    ZpSet,
    ZSet,
    forbidden_degree,
    min_ap_cover,
    min_ap_cover_zp,
    restricted_rows,
    restricted_sumset,
    translate_rows,
)
from .errors import BudgetExceededError, InvalidInputError
from .select import EXHAUSTIVE_BUDGET, SelectionResult, subset_budget

__all__ = [
    "RestrictedInstance",
    "eh_search",
    "extremal_family_deg",
    "extremal_family_size",
    "check_small_forbidden",
    "diagonal_pairs",
    "restricted_size",
]


@dataclass(frozen=True)
class RestrictedInstance:
    A: AnySet
    F: ForbiddenPairs
    d: int
    n: int
    beta: float | None = None

    def __post_init__(self):
        if self.n != len(self.A):
            raise InvalidInputError("n must equal |A|")
        self.F.validate(self.A, self.A)
        _, deg = forbidden_degree(self.F, self.A.elements)
        if deg > self.d:
            raise InvalidInputError(f"forbidden degree {deg} exceeds the declared bound {self.d}")

    @classmethod
    def build(cls, A: AnySet, F: ForbiddenPairs, beta: float | None = None) -> "RestrictedInstance":
        """Instance with d set to the actual degree of F."""
        _, deg = forbidden_degree(F, A.elements)
        return cls(A, F, deg, len(A), beta)

    def to_dict(self) -> dict[str, Any]:
        d = {"A": describe_set(self.A), "F": [list(pr) for pr in self.F.pairs], "d": self.d, "n": self.n}
        if self.beta is not None:
            d["beta"] = self.beta
        return d


def diagonal_pairs(A: AnySet) -> ForbiddenPairs:
    """F = {(a, a)}: forbids repeated summands (the Erdős–Heilbronn setting)."""
    return ForbiddenPairs((a, a) for a in A.elements)


def restricted_size(A: AnySet, F: ForbiddenPairs, chosen) -> int:
    B = ZpSet(A.p, chosen) if isinstance(A, ZpSet) else ZSet(chosen)
    return len(restricted_sumset(A, B, F.restrict_second(B.elements)))


def _exhaustive(A: AnySet, F: ForbiddenPairs, c: int, target: int = -1) -> tuple[int, tuple[int, ...]]:
    k = len(A)
    cc = min(c, k)
    if subset_budget(k, cc) > EXHAUSTIVE_BUDGET:
        raise BudgetExceededError(f"C({k},{cc}) subsets exceeds the 10^8 evaluation budget")
    rows = restricted_rows(A, A, F).rows if len(F) else translate_rows(A, A).rows
    best, idx = _kernels.best_union(rows, cc, target)
    return best, tuple(A.elements[i] for i in idx)


def _cover_order(A: AnySet) -> list[int] | None:
    """A listed along a covering AP, or None when A+A could wrap around."""
    if isinstance(A, ZSet):
        return list(A.elements)
    cover = min_ap_cover_zp(A)
    if 2 * cover.length - 1 > A.p:
        return None
    pos = {x: i for i, x in enumerate(cover.elements())}
    return sorted(A.elements, key=pos.__getitem__)


def eh_search(inst: RestrictedInstance, c: int = 3) -> SelectionResult:
    """Find B' ∈ A^(≤c) with |A +_F B'| >= 2n-1-2d.

    Large unrestricted sums are used first (any B' with |A+B'| >= 2n+cd loses
    at most cd sums to F); otherwise the two ends of A along its AP cover are
    tried, and exhaustive search settles the rest.
    """
    if c < 2:
        raise InvalidInputError("eh_search needs c >= 2")
    A, F, n, d = inst.A, inst.F, inst.n, inst.d
    bound = 2 * n - 1 - 2 * d
    cc = min(c, n)
    if subset_budget(n, cc) <= EXHAUSTIVE_BUDGET:
        hit, idx = _kernels.best_union(translate_rows(A, A).rows, cc, 2 * n + c * d)
        if hit >= 2 * n + c * d:
            chosen = tuple(A.elements[i] for i in idx)
            return SelectionResult("eh-phase1", chosen, restricted_size(A, F, chosen), bound, c)

    order = _cover_order(A)
    if order is not None:
        chosen = tuple(sorted({order[0], order[-1]}))
        got = restricted_size(A, F, chosen)
        if got >= bound:
            return SelectionResult("eh-endpoints", chosen, got, bound, c)

    best, chosen = _exhaustive(A, F, c)
    return SelectionResult("eh-exhaustive", chosen, best, bound, c)


def extremal_family_deg(n: int, d: int) -> RestrictedInstance:
    """A = [1, n] with F the two d×d corner blocks; A +_F A = [d+2, 2n-d]."""
    if d < 0 or n <= 2 * d:
        raise InvalidInputError("need 0 <= d and n > 2d")
    lo = range(1, d + 1)
    hi = range(n - d + 1, n + 1)
    pairs = [(i, j) for i in lo for j in lo] + [(i, j) for i in hi for j in hi]
    return RestrictedInstance(ZSet(range(1, n + 1)), ForbiddenPairs(pairs), d, n)


def extremal_family_size(n: int, k: int) -> RestrictedInstance:
    """A = [1, n] with F = {i+j <= k or i+j >= 2n-k+2}; A +_F A = [k+1, 2n-k+1]."""
    if not 2 <= k <= n:
        raise InvalidInputError("need 2 <= k <= n")
    A = range(1, n + 1)
    pairs = [(i, j) for i in A for j in A if i + j <= k or i + j >= 2 * n - k + 2]
    F = ForbiddenPairs(pairs)
    return RestrictedInstance.build(ZSet(A), F)


def _endpoint_degree_pair(order: list[int], F: ForbiddenPairs) -> tuple[int, int]:
    """Indices j, h minimising i+d_i and n+1-i+d_i (1-based positions)."""
    n = len(order)
    degs = [F.degree(a) for a in order]
    j = min(range(1, n + 1), key=lambda i: (i + degs[i - 1], i))
    h = min(range(1, n + 1), key=lambda i: (n + 1 - i + degs[i - 1], i))
    return order[j - 1], order[h - 1]


def check_small_forbidden(inst: RestrictedInstance, k: int, c: int = 3) -> CheckReport:
    """Few forbidden pairs (|F| <= k(k-1)) still leave some B' with 2n+1-2k sums."""
    if k < 2:
        raise InvalidInputError("k must be at least 2")
    A, F, n = inst.A, inst.F, inst.n
    bound = 2 * n + 1 - 2 * k
    instance = inst.to_dict() | {"k": k, "c": c}
    metrics: dict[str, Any] = {"bound": bound, "forbidden": len(F)}
    if len(F) > k * (k - 1):
        return CheckReport("small-forbidden", instance, NOT_MET, metrics=metrics)

    cc = min(c, n)
    if subset_budget(n, cc) <= EXHAUSTIVE_BUDGET:
        hit, idx = _kernels.best_union(translate_rows(A, A).rows, cc, 2 * n + k * k)
        if hit >= 2 * n + k * k:
            chosen = tuple(A.elements[i] for i in idx)
            got = restricted_size(A, F, chosen)
            metrics |= {"achieved": got, "route": "large-sumset"}
            return CheckReport("small-forbidden", instance, HOLDS, {"chosen": list(chosen)}, metrics)

    order = _cover_order(A)
    if order is not None:
        chosen = tuple(sorted(set(_endpoint_degree_pair(order, F))))
        got = restricted_size(A, F, chosen)
        if got >= bound:
            metrics |= {"achieved": got, "route": "endpoint-degrees"}
            return CheckReport("small-forbidden", instance, HOLDS, {"chosen": list(chosen)}, metrics)

    best, chosen = _exhaustive(A, F, c)
    metrics |= {"achieved": best, "route": "exhaustive"}
    verdict = HOLDS if best >= bound else FAILS
    return CheckReport("small-forbidden", instance, verdict, {"chosen": list(chosen)}, metrics)
