"""Exact integer utilities: factorization, multiplicative functions, residues.

Everything here is pure and deterministic.  Inputs are capped at 2**63; all
modular arithmetic goes through Python integers, so intermediates never
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_U63 = 1 << 63

# Witness set proving Miller-Rabin deterministic for n < 3.3e24 (covers u64).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ArithError(ValueError):
    """Invalid input to an integer routine (zero, overflow, non-coprime...)."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 0 <= n < 2**63."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of composite n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        y, c, m = seed, seed + 1, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    """Prime factorization with primes in strictly increasing order."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        primes = [p for p, _ in self.pairs]
        if primes != sorted(set(primes)):
            raise ArithError("primes must be strictly increasing")
        if any(e < 1 for _, e in self.pairs):
            raise ArithError("exponents must be >= 1")

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def valuation(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.pairs:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Exact prime factorization of 1 <= n < 2**63."""
    if not 1 <= n < _U63:
        raise ArithError(f"factorize requires 1 <= n < 2**63, got {n}")
    fac: dict[int, int] = {}

    def _split(m: int) -> None:
        if m == 1:
            return
        if is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            return
        d = _pollard_rho(m)
        _split(d)
        _split(m // d)

    m = n
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
    _split(m)
    return Factorization(tuple(sorted(fac.items())))


def v_p(n: int, p: int) -> int:
    """Largest k with p**k dividing n (n >= 1)."""
    if n < 1:
        raise ArithError("v_p requires n >= 1")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def flrt(n: int) -> int:
    """Floor square root: product of p**floor(v_p(n)/2) over p | n.

    The largest d such that d**2 | n, up to the squarefree part of n.
    """
    out = 1
    for p, e in factorize(n).pairs:
        out *= p ** (e // 2)
    return out


@dataclass(frozen=True)
class MultiplicativeData:
    totient: int
    moebius: int
    divisor_count: int
    von_mangoldt_log: float


def mult_fn(n: int) -> MultiplicativeData:
    """Euler phi, Moebius mu, divisor count d(n), and Lambda(n).

    von_mangoldt_log is log p when n = p**e (e >= 1) and 0 otherwise.
    """
    fac = factorize(n)
    phi, mu, d = 1, 1, 1
    for p, e in fac.pairs:
        phi *= p ** (e - 1) * (p - 1)
        mu = 0 if e > 1 else -mu
        d *= e + 1
    vm = math.log(fac.pairs[0][0]) if len(fac.pairs) == 1 else 0.0
    return MultiplicativeData(phi, mu, d, vm)


def totient(n: int) -> int:
    return mult_fn(n).totient


def moebius(n: int) -> int:
    return mult_fn(n).moebius


def divisor_count(n: int) -> int:
    return mult_fn(n).divisor_count


@dataclass(frozen=True)
class Residue:
    """A reduced residue: 0 <= value < modulus."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ArithError("modulus must be >= 1")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)


def inverse_mod(a: int, m: int) -> int:
    """Inverse of a modulo m; raises ArithError when gcd(a, m) > 1."""
    if m == 1:
        return 0
    g = math.gcd(a, m)
    if g != 1:
        raise ArithError(f"{a} is not invertible mod {m} (gcd {g})")
    return pow(a, -1, m)


def mod_inverse(a: Residue) -> Residue:
    return Residue(inverse_mod(a.value, a.modulus), a.modulus)


def crt_combine(residues: list[Residue] | tuple[Residue, ...]) -> Residue:
    """The unique residue mod the product agreeing with each input.

    Moduli must be pairwise coprime.
    """
    if not residues:
        raise ArithError("crt_combine requires at least one residue")
    x, m = residues[0].value, residues[0].modulus
    for r in residues[1:]:
        if math.gcd(m, r.modulus) != 1:
            raise ArithError(f"moduli {m} and {r.modulus} are not coprime")
        # x + m*t = r.value (mod r.modulus)
        t = (r.value - x) * inverse_mod(m, r.modulus) % r.modulus
        x += m * t
        m *= r.modulus
    return Residue(x, m)


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n (Eratosthenes), as an int64 array."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def carmichael(n: int) -> int:
    """Carmichael function lambda(n): exponent of the unit group mod n."""
    lam = 1
    for p, e in factorize(n).pairs:
        if p == 2:
            comp = 1 if e == 1 else 2 if e == 2 else 2 ** (e - 2)
        else:
            comp = p ** (e - 1) * (p - 1)
        lam = lam * comp // math.gcd(lam, comp)
    return lam
