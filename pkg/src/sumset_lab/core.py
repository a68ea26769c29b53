"""Exact set arithmetic in Z and Z_p.

Sets in Z are stored as sorted tuples plus a lazily built bitmask relative to
their minimum; subsets of Z_p are stored as a p-bit Python int.  Sumsets and
translate unions are computed by OR-ing shifted (or rotated) bitmasks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Union

import numpy as np

from .errors import InvalidInputError

Z_BOUND = 2**31
P_MAX = 2**20
# Above this many bits a translate row is built over the compressed support of
# A+B instead of the raw integer span.
_MAX_DIRECT_SPAN = 1 << 16


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime(q)]


def _bits_to_tuple(bits: int, offset: int = 0) -> tuple[int, ...]:
    out = []
    i = 0
    while bits:
        low = bits & -bits
        i = low.bit_length() - 1
        out.append(i + offset)
        bits ^= low
    return tuple(out)


class ZSet:
    """Finite set of integers, normalized to sorted distinct elements."""

    __slots__ = ("elements", "_mask")
    modulus = None

    def __init__(self, elements: Iterable[int] = ()):
        els = tuple(sorted({int(x) for x in elements}))
        if els and (els[0] < -Z_BOUND or els[-1] > Z_BOUND):
            raise InvalidInputError(f"elements must lie in [-2^31, 2^31], got {els[0]}..{els[-1]}")
        self.elements = els
        self._mask = None

    @classmethod
    def from_mask(cls, mask: int, offset: int = 0) -> "ZSet":
        s = cls.__new__(cls)
        s.elements = _bits_to_tuple(mask, offset)
        s._mask = None
        return s

    @property
    def min(self) -> int:
        return self.elements[0]

    @property
    def max(self) -> int:
        return self.elements[-1]

    @property
    def span(self) -> int:
        return self.elements[-1] - self.elements[0] if self.elements else 0

    @property
    def mask(self) -> int:
        """Bitmask of ``self - min``."""
        if self._mask is None:
            lo = self.elements[0] if self.elements else 0
            m = 0
            for x in self.elements:
                m |= 1 << (x - lo)
            self._mask = m
        return self._mask

    def shift(self, t: int) -> "ZSet":
        return ZSet(x + t for x in self.elements)

    def scale(self, lam: int) -> "ZSet":
        return ZSet(lam * x for x in self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int) or not self.elements:
            return False
        k = x - self.elements[0]
        return k >= 0 and (self.mask >> k) & 1 == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZSet) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(("Z", self.elements))

    def __repr__(self) -> str:
        return f"ZSet({{{', '.join(map(str, self.elements))}}})"


class ZpSet:
    """Subset of Z_p held as a p-bit membership bitset."""

    __slots__ = ("p", "bits", "_elements")

    def __init__(self, p: int, elements: Iterable[int] = ()):
        p = int(p)
        if p > P_MAX:
            raise InvalidInputError(f"modulus {p} exceeds 2^20")
        if not is_prime(p):
            raise InvalidInputError(f"modulus {p} is not prime")
        bits = 0
        for x in elements:
            bits |= 1 << (int(x) % p)
        self.p = p
        self.bits = bits
        self._elements = None

    @classmethod
    def from_bits(cls, p: int, bits: int) -> "ZpSet":
        # trusted constructor: p already validated by the caller
        s = cls.__new__(cls)
        s.p = p
        s.bits = bits & ((1 << p) - 1)
        s._elements = None
        return s

    @property
    def modulus(self) -> int:
        return self.p

    @property
    def elements(self) -> tuple[int, ...]:
        if self._elements is None:
            self._elements = _bits_to_tuple(self.bits)
        return self._elements

    @property
    def min(self) -> int:
        return self.elements[0]

    @property
    def max(self) -> int:
        return self.elements[-1]

    def rotate_bits(self, t: int) -> int:
        return rotate(self.bits, t, self.p)

    def shift(self, t: int) -> "ZpSet":
        return ZpSet.from_bits(self.p, self.rotate_bits(t))

    def affine(self, lam: int, mu: int = 0) -> "ZpSet":
        p = self.p
        return ZpSet(p, ((lam * x + mu) % p for x in self.elements))

    def scale(self, lam: int) -> "ZpSet":
        return self.affine(lam, 0)

    def complement(self) -> "ZpSet":
        return ZpSet.from_bits(self.p, ~self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and (self.bits >> (x % self.p)) & 1 == 1

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZpSet) and self.p == other.p and self.bits == other.bits

    def __hash__(self) -> int:
        return hash(("Zp", self.p, self.bits))

    def __repr__(self) -> str:
        return f"ZpSet({self.p}, {{{', '.join(map(str, self.elements))}}})"


AnySet = Union[ZSet, ZpSet]


def rotate(bits: int, t: int, p: int) -> int:
    """Cyclic shift of a p-bit set by ``t`` (i.e. the set translated by t)."""
    t %= p
    if t == 0:
        return bits
    full = (1 << p) - 1
    return ((bits << t) | (bits >> (p - t))) & full


def check_same_ambient(*sets: AnySet) -> None:
    first = sets[0]
    for s in sets:
        if not isinstance(s, (ZSet, ZpSet)):
            raise InvalidInputError(f"expected ZSet or ZpSet, got {type(s).__name__}")
        if type(s) is not type(first) or s.modulus != first.modulus:
            raise InvalidInputError("operands live in different ambient groups")


def _require_nonempty(*sets: AnySet) -> None:
    for s in sets:
        if len(s) == 0:
            raise InvalidInputError("operand must be non-empty")


def like(template: AnySet, elements: Iterable[int]) -> AnySet:
    """Build a set in the same ambient group as ``template``."""
    if isinstance(template, ZpSet):
        return ZpSet(template.p, elements)
    return ZSet(elements)


def negate(S: AnySet) -> AnySet:
    if isinstance(S, ZpSet):
        return ZpSet(S.p, (-x for x in S.elements))
    return ZSet(-x for x in S.elements)


def cd_bound(n_a: int, n_b: int, p: int | None = None) -> int:
    """Cauchy-Davenport lower bound for |A+B| given the sizes."""
    if n_a < 1 or n_b < 1:
        raise InvalidInputError("sizes must be positive")
    if p is None:
        return n_a + n_b - 1
    if n_a > p or n_b > p:
        raise InvalidInputError("set sizes cannot exceed p")
    return min(p, n_a + n_b - 1)


def bound_for(A: AnySet, B: AnySet) -> int:
    return cd_bound(len(A), len(B), A.modulus)


# ---------------------------------------------------------------------------
# translate rows: one bitmask per b in B, so that |A+B'| = popcount(OR rows)


@dataclass(frozen=True)
class TranslateRows:
    rows: tuple[int, ...]
    decode: Callable[[int], AnySet] = field(repr=False)


def translate_rows(A: AnySet, B: AnySet, allowed: Mapping[int, int] | None = None) -> TranslateRows:
    """Bitmask rows for the translates ``A+b``, b in sorted B.

    ``allowed`` optionally maps b to a sub-mask of A (in A's own coordinates)
    used instead of A for that translate; restricted sums use this.
    """
    check_same_ambient(A, B)
    _require_nonempty(A, B)
    if isinstance(A, ZpSet):
        p = A.p
        rows = tuple(rotate(allowed.get(b, A.bits) if allowed else A.bits, b, p) for b in B.elements)
        return TranslateRows(rows, lambda m: ZpSet.from_bits(p, m))

    a0, b0 = A.min, B.min
    if A.span + B.span <= max(_MAX_DIRECT_SPAN, 64 * len(A) * len(B)):
        base = A.mask
        rows = tuple((allowed.get(b, base) if allowed else base) << (b - b0) for b in B.elements)
        off = a0 + b0
        return TranslateRows(rows, lambda m: ZSet.from_mask(m, off))

    # sparse, wide sets: index the support of A+B
    support = sorted({a + b for a in A.elements for b in B.elements})
    pos = {x: i for i, x in enumerate(support)}
    rows_l = []
    for b in B.elements:
        if allowed and b in allowed:
            sub = allowed[b]
            src = [a for a in A.elements if (sub >> (a - a0)) & 1]
        else:
            src = A.elements
        r = 0
        for a in src:
            r |= 1 << pos[a + b]
        rows_l.append(r)
    return TranslateRows(tuple(rows_l), lambda m: ZSet(support[i] for i in _bits_to_tuple(m)))


def union_of_rows(rows: Iterable[int]) -> int:
    acc = 0
    for r in rows:
        acc |= r
    return acc


# ---------------------------------------------------------------------------
# sumsets


def sumset(A: AnySet, B: AnySet) -> AnySet:
    """{a+b : a in A, b in B}, reduced mod p in Z_p."""
    check_same_ambient(A, B)
    _require_nonempty(A, B)
    if isinstance(A, ZpSet):
        acc = 0
        for b in B.elements:
            acc |= rotate(A.bits, b, A.p)
        return ZpSet.from_bits(A.p, acc)
    tr = translate_rows(A, B)
    return tr.decode(union_of_rows(tr.rows))


def translate_union(A: AnySet, T: AnySet) -> AnySet:
    """Union of the translates A+t over t in T (the same set as A+T)."""
    return sumset(A, T)


def difference_set(A: AnySet, B: AnySet) -> AnySet:
    return sumset(A, negate(B))


def shift_gain(A: AnySet, s: int) -> int:
    """f_A(s) = |(A+s) \\ A| = |A| - |A ∩ (A+s)|."""
    _require_nonempty(A)
    if isinstance(A, ZpSet):
        return len(A) - (A.bits & rotate(A.bits, s, A.p)).bit_count()
    s = abs(s)
    return len(A) - (A.mask & (A.mask << s)).bit_count()


# ---------------------------------------------------------------------------
# fibres


@dataclass(frozen=True)
class FibreDecomposition:
    modulus: int
    projection: tuple[int, ...]
    fibres: Mapping[int, ZSet]

    def fibre(self, x: int) -> ZSet:
        return self.fibres.get(x % self.modulus, ZSet())


def project_fibres(S: ZSet, d: int) -> FibreDecomposition:
    """Split S into residue classes mod d."""
    if not isinstance(S, ZSet):
        raise InvalidInputError("fibres are defined for subsets of Z")
    if d <= 0:
        raise InvalidInputError("modulus must be positive")
    groups: dict[int, list[int]] = {}
    for x in S.elements:
        groups.setdefault(x % d, []).append(x)
    fibres = {r: ZSet(v) for r, v in sorted(groups.items())}
    return FibreDecomposition(d, tuple(sorted(fibres)), fibres)


def projection_size(S: ZSet, m: int) -> int:
    return len({x % m for x in S.elements})


# ---------------------------------------------------------------------------
# forbidden pairs and restricted sums


class ForbiddenPairs:
    """Forbidden relation F ⊆ A×B, indexed by the second coordinate."""

    __slots__ = ("pairs", "_by_second")

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        self.pairs = tuple(sorted({(int(a), int(b)) for a, b in pairs}))
        by_second: dict[int, set[int]] = {}
        for a, b in self.pairs:
            by_second.setdefault(b, set()).add(a)
        self._by_second = {b: frozenset(v) for b, v in by_second.items()}

    def partners(self, b: int) -> frozenset[int]:
        return self._by_second.get(b, frozenset())

    def degree(self, b: int) -> int:
        return len(self.partners(b))

    def seconds(self) -> tuple[int, ...]:
        return tuple(sorted(self._by_second))

    def restrict_second(self, B: Iterable[int]) -> "ForbiddenPairs":
        keep = set(B)
        return ForbiddenPairs(pr for pr in self.pairs if pr[1] in keep)

    def validate(self, A: AnySet, B: AnySet) -> None:
        for a, b in self.pairs:
            if a not in A or b not in B:
                raise InvalidInputError(f"forbidden pair ({a}, {b}) is not in A×B")

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ForbiddenPairs) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"ForbiddenPairs({list(self.pairs)})"


def forbidden_degree(F: ForbiddenPairs, B: Iterable[int] | None = None) -> tuple[dict[int, int], int]:
    """Per-element degrees d(b) and d(F) = max_b d(b).

    When ``B`` is given every b in B gets an entry, zero included.
    """
    keys = sorted(set(B) | set(F.seconds())) if B is not None else list(F.seconds())
    deg = {b: F.degree(b) for b in keys}
    return deg, max(deg.values(), default=0)


def allowed_masks(A: AnySet, B: AnySet, F: ForbiddenPairs) -> dict[int, int]:
    """For each b with forbidden partners, the mask of A-elements still allowed."""
    out = {}
    for b in B.elements:
        ps = F.partners(b)
        if not ps:
            continue
        if isinstance(A, ZpSet):
            m = A.bits
            for a in ps:
                m &= ~(1 << (a % A.p))
        else:
            m = A.mask
            for a in ps:
                m &= ~(1 << (a - A.min))
        out[b] = m
    return out


def restricted_rows(A: AnySet, B: AnySet, F: ForbiddenPairs) -> TranslateRows:
    F.validate(A, B)
    return translate_rows(A, B, allowed_masks(A, B, F))


def restricted_sumset(A: AnySet, B: AnySet, F: ForbiddenPairs) -> AnySet:
    """A +_F B = {a+b : (a, b) not in F}."""
    tr = restricted_rows(A, B, F)
    return tr.decode(union_of_rows(tr.rows))


# ---------------------------------------------------------------------------
# arithmetic progressions


@dataclass(frozen=True)
class APSpec:
    start: int
    diff: int
    length: int
    modulus: int | None = None

    def __post_init__(self):
        if self.length < 1:
            raise InvalidInputError("AP length must be positive")
        if self.modulus is None:
            if self.diff == 0:
                raise InvalidInputError("AP step must be nonzero")
        else:
            if self.diff % self.modulus == 0:
                raise InvalidInputError("AP step must be nonzero mod p")
            if self.length > self.modulus:
                raise InvalidInputError("AP in Z_p cannot be longer than p")

    def elements(self) -> tuple[int, ...]:
        xs = (self.start + i * self.diff for i in range(self.length))
        if self.modulus is None:
            return tuple(xs)
        return tuple(x % self.modulus for x in xs)

    def as_set(self) -> AnySet:
        if self.modulus is None:
            return ZSet(self.elements())
        return ZpSet(self.modulus, self.elements())

    def covers(self, S: AnySet) -> bool:
        return set(S.elements) <= set(self.elements())

    def slack(self, S: AnySet) -> int:
        return self.length - len(S)

    def to_dict(self) -> dict:
        return {"start": self.start, "diff": self.diff, "length": self.length, "modulus": self.modulus}


def min_ap_cover(S: ZSet) -> APSpec:
    """Shortest AP in Z containing S (step = gcd of consecutive gaps)."""
    if not isinstance(S, ZSet):
        raise InvalidInputError("min_ap_cover expects a subset of Z")
    _require_nonempty(S)
    g = 0
    els = S.elements
    for x, y in zip(els, els[1:]):
        g = math.gcd(g, y - x)
    g = g or 1
    return APSpec(els[0], g, (els[-1] - els[0]) // g + 1)


def cover_with_diff_zp(elements: Iterable[int], p: int, d: int) -> tuple[int, int]:
    """(length, start) of the shortest AP with step d containing the elements.

    Dilating by d^{-1} turns APs of step d into cyclic intervals; the shortest
    covering interval starts right after the largest cyclic gap.  Among equal
    gaps the smallest original start wins.
    """
    arr = np.fromiter(elements, dtype=np.int64)
    k = arr.size
    if k == 0:
        raise InvalidInputError("cannot cover an empty set")
    if k == p:
        return p, 0
    inv = pow(d, -1, p)
    t = np.sort((arr * inv) % p)
    gaps = np.empty(k, dtype=np.int64)
    gaps[:-1] = t[1:] - t[:-1]
    gaps[-1] = t[0] + p - t[-1]
    g = gaps.max()
    starts = t[(np.nonzero(gaps == g)[0] + 1) % k]
    start = int(((starts * d) % p).min())
    return int(p - g + 1), start


def min_ap_cover_zp(S: ZpSet) -> APSpec:
    """Minimum-length AP in Z_p containing S, smallest (diff, start) on ties."""
    if not isinstance(S, ZpSet):
        raise InvalidInputError("min_ap_cover_zp expects a subset of Z_p")
    _require_nonempty(S)
    p = S.p
    n = len(S)
    if n == p:
        return APSpec(0, 1, p, p)
    els = S.elements
    best = None
    for d in range(1, p):
        length, start = cover_with_diff_zp(els, p, d)
        if best is None or length < best[0]:
            best = (length, d, start)
            if length == n:
                break
    length, d, start = best
    return APSpec(start, d, length, p)
