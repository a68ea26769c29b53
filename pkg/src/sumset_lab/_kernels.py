"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is used.  Both expose ``best_union`` and ``union_sizes`` with
identical semantics.
"""
from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active: ModuleType = _BACKENDS.get("cython", _pykernels)


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend() -> str:
    return "cython" if _active is _ckernels else "python"


def use_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    _active = _BACKENDS[name]


def best_union(masks, c, target=-1):
    return _active.best_union(masks, c, target)


def union_sizes(base, masks):
    return _active.union_sizes(base, masks)
