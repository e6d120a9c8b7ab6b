"""Pure numpy implementations of the hot kernels.

Same call contracts as the compiled extension (klsums._kernels); selected at
import time by klsums.kernels when the extension is unavailable or disabled.

All moduli here must satisfy c < 2**31 so products of two reduced residues
fit in int64.
"""

from __future__ import annotations

import numpy as np

from .arith import carmichael

BACKEND = "python"

_C_MAX = 1 << 31


def _check_modulus(c: int) -> None:
    if not 1 <= c < _C_MAX:
        raise ValueError(f"kernel modulus must satisfy 1 <= c < 2**31, got {c}")


def _powmod_vec(base: np.ndarray, exponent: int, c: int) -> np.ndarray:
    """base**exponent mod c, elementwise (int64-safe square and multiply)."""
    result = np.ones_like(base)
    b = base % c
    e = exponent
    while e > 0:
        if e & 1:
            result = result * b % c
        b = b * b % c
        e >>= 1
    return result


def units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """Units x mod c (ascending) and their modular inverses.

    For c = 1 the single residue 0 is returned (empty product convention).
    """
    _check_modulus(c)
    if c == 1:
        z = np.zeros(1, dtype=np.int64)
        return z, z.copy()
    x = np.arange(1, c, dtype=np.int64)
    units = x[np.gcd(x, c) == 1]
    inv = _powmod_vec(units, carmichael(c) - 1, c)
    return units, inv


def root_table(c: int) -> np.ndarray:
    """exp(2*pi*i*k/c) for k = 0..c-1."""
    return np.exp(2j * np.pi * np.arange(c) / c)


def weighted_kloosterman_many(
    m: int,
    n: int,
    c: int,
    units: np.ndarray,
    invs: np.ndarray,
    weights: np.ndarray,
    roots: np.ndarray | None = None,
) -> np.ndarray:
    """For each weight row w: sum_i w[i] * e_c(m*units[i] + n*invs[i]).

    ``weights`` has shape (rows, len(units)); the phase argument is reduced
    exactly in integers before the root of unity is taken.
    """
    _check_modulus(c)
    phase = ((m % c) * units + (n % c) * invs) % c
    e = roots[phase] if roots is not None else np.exp(2j * np.pi * phase / c)
    w = np.asarray(weights)
    if w.ndim == 1:
        return np.array([np.dot(w, e)])
    return w @ e


def kloosterman_direct(
    m: int,
    n: int,
    c: int,
    units: np.ndarray,
    invs: np.ndarray,
    roots: np.ndarray | None = None,
) -> complex:
    """sum over units x mod c of e_c(m*x + n*inv(x))."""
    _check_modulus(c)
    phase = ((m % c) * units + (n % c) * invs) % c
    e = roots[phase] if roots is not None else np.exp(2j * np.pi * phase / c)
    return complex(e.sum())


def quadratic_root_count(alpha: int, beta: int, gamma: int, q: int) -> int:
    """#{x mod q : alpha*x^2 + beta*x + gamma == 0 (mod q)} by brute force."""
    _check_modulus(q)
    x = np.arange(q, dtype=np.int64)
    a, b, g = alpha % q, beta % q, gamma % q
    vals = (a * x % q * x + b * x + g) % q
    return int(np.count_nonzero(vals == 0))
