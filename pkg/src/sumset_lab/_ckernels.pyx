# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled translate-union kernels over packed uint64 bitsets."""
import sys

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free
from libc.string cimport memcpy

if sys.byteorder != "little":
    # packing copies little-endian bytes straight into uint64 words
    raise ImportError("compiled kernels need a little-endian host")

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef uint64_t* _pack(list masks, Py_ssize_t* words) except NULL:
    """Rows as a k×W little-endian uint64 block; caller frees."""
    cdef Py_ssize_t k = len(masks), i, width = 1, W
    for m in masks:
        if m < 0:
            raise ValueError("row masks must be non-negative")
        if m.bit_length() > width:
            width = m.bit_length()
    W = (width + 63) // 64
    cdef uint64_t* buf = <uint64_t*> calloc(k * W if k else 1, sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef bytes raw
    for i in range(k):
        raw = (<object> masks[i]).to_bytes(W * 8, "little")
        memcpy(&buf[i * W], <const char*> raw, W * 8)
    words[0] = W
    return buf


cdef inline int _or_popcount(const uint64_t* a, const uint64_t* b, Py_ssize_t W) noexcept nogil:
    cdef Py_ssize_t w
    cdef int total = 0
    for w in range(W):
        total += __builtin_popcountll(a[w] | b[w])
    return total


def union_sizes(base, masks):
    # one OR per row: Python ints are already packed words, so no repacking
    return [(base | m).bit_count() for m in masks]


def best_union(masks, int c, long long target=-1):
    cdef Py_ssize_t k = len(masks)
    if c <= 0 or k == 0:
        raise ValueError("need c >= 1 and at least one row")
    if c >= k:
        acc = 0
        for m in masks:
            acc |= m
        return acc.bit_count(), tuple(range(k))

    cdef Py_ssize_t W, i, j, w, d
    cdef uint64_t* rows = _pack(list(masks), &W)
    cdef uint64_t* prefix = <uint64_t*> calloc(c * W, sizeof(uint64_t))
    cdef Py_ssize_t* idx = <Py_ssize_t*> calloc(2 * c, sizeof(Py_ssize_t))
    if prefix == NULL or idx == NULL:
        free(rows); free(prefix); free(idx)
        raise MemoryError()
    cdef Py_ssize_t* best_idx = idx + c
    cdef long long best = -1, v
    cdef bint done = False

    with nogil:
        # prefix row j holds OR of rows idx[0..j-1]; row 0 stays zero
        d = 0
        idx[0] = 0
        while True:
            for j in range(d, c - 1):
                for w in range(W):
                    prefix[(j + 1) * W + w] = prefix[j * W + w] | rows[idx[j] * W + w]
                idx[j + 1] = idx[j] + 1
            for i in range(idx[c - 1], k):
                v = _or_popcount(&prefix[(c - 1) * W], &rows[i * W], W)
                if v > best:
                    best = v
                    for j in range(c - 1):
                        best_idx[j] = idx[j]
                    best_idx[c - 1] = i
                    if 0 <= target <= v:
                        done = True
                        break
            if done:
                break
            j = c - 2
            while j >= 0 and idx[j] == k - c + j:
                j -= 1
            if j < 0:
                break
            idx[j] += 1
            d = j
    result = (int(best), tuple(int(best_idx[j]) for j in range(c)))
    free(rows)
    free(prefix)
    free(idx)
    return result
