"""Pure-Python translate-union kernels operating on int bitmasks."""
from __future__ import annotations

from typing import Sequence


def union_sizes(base: int, masks: Sequence[int]) -> list[int]:
    return [(base | m).bit_count() for m in masks]


def best_union(masks: Sequence[int], c: int, target: int = -1) -> tuple[int, tuple[int, ...]]:
    """Maximise popcount(OR of c rows) over all c-subsets of ``masks``.

    Subsets are visited in lexicographic order of their index tuples and only a
    strictly larger value replaces the incumbent, so the returned witness is
    the lexicographically smallest maximiser.  With ``target >= 0`` the search
    stops at the first subset reaching ``target``.
    """
    k = len(masks)
    if c <= 0 or k == 0:
        raise ValueError("need c >= 1 and at least one row")
    if c >= k:
        acc = 0
        for m in masks:
            acc |= m
        return acc.bit_count(), tuple(range(k))

    best = -1
    best_idx: tuple[int, ...] = ()
    idx = [0] * c
    stop = False

    # explicit DFS with prefix ORs; depth d picks idx[d] from [idx[d-1]+1, k-c+d]
    def rec(depth: int, start: int, acc: int) -> None:
        nonlocal best, best_idx, stop
        last = k - c + depth
        if depth == c - 1:
            for i in range(start, last + 1):
                v = (acc | masks[i]).bit_count()
                if v > best:
                    idx[depth] = i
                    best = v
                    best_idx = tuple(idx)
                    if 0 <= target <= v:
                        stop = True
                        return
            return
        for i in range(start, last + 1):
            idx[depth] = i
            rec(depth + 1, i + 1, acc | masks[i])
            if stop:
                return

    rec(0, 0, 0)
    return best, best_idx
