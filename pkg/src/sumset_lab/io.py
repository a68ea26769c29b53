"""Text formats for sets, forbidden pairs and interval unions.

All three share the same lexical rules: ``#`` starts a comment, blank lines
are ignored, and every diagnostic names the offending line.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Iterator

from .continuous import CIRCLE, LINE, IntervalUnion, as_fraction
from .core import ForbiddenPairs, ZpSet, ZSet, is_prime, P_MAX
from .errors import InvalidInputError

__all__ = [
    "parse_set_text",
    "parse_set_file",
    "format_set",
    "parse_pairs_text",
    "parse_pairs_file",
    "parse_intervals_text",
    "parse_intervals_file",
]


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _int(tok: str, lineno: int, where: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InvalidInputError(f"{where}line {lineno}: {tok!r} is not an integer") from None


def _read(path: str | os.PathLike) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None


def parse_set_text(text: str, source: str = "") -> ZSet | ZpSet:
    """Optional ``p <prime>`` header, then one integer per line; duplicates rejected."""
    where = f"{source}: " if source else ""
    p = None
    seen: dict[int, int] = {}
    for lineno, line in _lines(text):
        parts = line.split()
        if parts[0] == "p":
            if p is not None or seen:
                raise InvalidInputError(f"{where}line {lineno}: the 'p' header must come first")
            if len(parts) != 2:
                raise InvalidInputError(f"{where}line {lineno}: expected 'p <prime>'")
            p = _int(parts[1], lineno, where)
            if p > P_MAX:
                raise InvalidInputError(f"{where}line {lineno}: modulus {p} exceeds 2^20")
            if not is_prime(p):
                raise InvalidInputError(f"{where}line {lineno}: modulus {p} is not prime")
            continue
        if len(parts) != 1:
            raise InvalidInputError(f"{where}line {lineno}: expected one integer, got {line!r}")
        x = _int(parts[0], lineno, where)
        key = x % p if p is not None else x
        if key in seen:
            raise InvalidInputError(f"{where}line {lineno}: duplicate element {x} (first on line {seen[key]})")
        seen[key] = lineno
    try:
        return ZpSet(p, seen) if p is not None else ZSet(seen)
    except InvalidInputError as e:
        raise InvalidInputError(f"{where}{e}") from None


def parse_set_file(path: str | os.PathLike) -> ZSet | ZpSet:
    return parse_set_text(_read(path), str(path))


def format_set(S: ZSet | ZpSet) -> str:
    """Inverse of :func:`parse_set_text`."""
    head = [f"p {S.modulus}"] if S.modulus is not None else []
    return "\n".join(head + [str(x) for x in S.elements]) + "\n"


def parse_pairs_text(text: str, source: str = "") -> ForbiddenPairs:
    where = f"{source}: " if source else ""
    pairs = []
    for lineno, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise InvalidInputError(f"{where}line {lineno}: expected 'a b', got {line!r}")
        pairs.append((_int(parts[0], lineno, where), _int(parts[1], lineno, where)))
    return ForbiddenPairs(pairs)


def parse_pairs_file(path: str | os.PathLike) -> ForbiddenPairs:
    return parse_pairs_text(_read(path), str(path))


def parse_intervals_text(text: str, source: str = "") -> IntervalUnion:
    """Lines ``l r`` as exact rationals; a leading ``circle`` header selects R/Z."""
    where = f"{source}: " if source else ""
    ambient = LINE
    ivs = []
    for lineno, line in _lines(text):
        if line in (CIRCLE, LINE):
            if ivs:
                raise InvalidInputError(f"{where}line {lineno}: ambient header must come first")
            ambient = line
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidInputError(f"{where}line {lineno}: expected 'l r', got {line!r}")
        try:
            ivs.append((as_fraction(parts[0]), as_fraction(parts[1])))
        except InvalidInputError as e:
            raise InvalidInputError(f"{where}line {lineno}: {e}") from None
    if not ivs:
        raise InvalidInputError(f"{where}no intervals given")
    try:
        return IntervalUnion.of(ivs, ambient)
    except InvalidInputError as e:
        raise InvalidInputError(f"{where}{e}") from None


def parse_intervals_file(path: str | os.PathLike) -> IntervalUnion:
    return parse_intervals_text(_read(path), str(path))
