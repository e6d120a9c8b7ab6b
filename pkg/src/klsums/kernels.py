"""Kernel backend selector.

Prefers the compiled extension (klsums._kernels) and falls back to the numpy
implementations in klsums._kernels_py.  Set KLSUMS_PURE_PYTHON=1 to force the
fallback.  Tables (unit/inverse arrays, root-of-unity tables) are cached here
with a small LRU so sweeps that iterate over a handful of moduli never
rebuild them; cache access is lock-protected, computation is pure.
"""

from __future__ import annotations

import os
import threading
from collections import OrderedDict

import numpy as np

from . import _kernels_py

if os.environ.get("KLSUMS_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

units_and_inverses_raw = _impl.units_and_inverses
weighted_kloosterman_many_raw = _impl.weighted_kloosterman_many
kloosterman_direct_raw = _impl.kloosterman_direct
quadratic_root_count = _impl.quadratic_root_count

_lock = threading.Lock()
_unit_cache: OrderedDict[int, tuple[np.ndarray, np.ndarray]] = OrderedDict()
_root_cache: OrderedDict[int, np.ndarray] = OrderedDict()
_UNIT_CACHE_SIZE = 16
_ROOT_CACHE_SIZE = 8


def units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    with _lock:
        if c in _unit_cache:
            _unit_cache.move_to_end(c)
            return _unit_cache[c]
    pair = units_and_inverses_raw(c)
    with _lock:
        _unit_cache[c] = pair
        while len(_unit_cache) > _UNIT_CACHE_SIZE:
            _unit_cache.popitem(last=False)
    return pair


def root_table(c: int) -> np.ndarray:
    with _lock:
        if c in _root_cache:
            _root_cache.move_to_end(c)
            return _root_cache[c]
    table = np.exp(2j * np.pi * np.arange(c) / c)
    with _lock:
        _root_cache[c] = table
        while len(_root_cache) > _ROOT_CACHE_SIZE:
            _root_cache.popitem(last=False)
    return table


def weighted_kloosterman_many(
    m: int, n: int, c: int, weights: np.ndarray, use_roots: bool = True
) -> np.ndarray:
    """Weighted Kloosterman sums (one per weight row) with cached tables."""
    units, invs = units_and_inverses(c)
    roots = root_table(c) if use_roots and c > 64 else None
    return weighted_kloosterman_many_raw(m, n, c, units, invs, weights, roots)


def kloosterman_direct(m: int, n: int, c: int) -> complex:
    units, invs = units_and_inverses(c)
    roots = root_table(c) if c > 64 else None
    return kloosterman_direct_raw(m, n, c, units, invs, roots)


def clear_caches() -> None:
    with _lock:
        _unit_cache.clear()
        _root_cache.clear()
