"""Square-root-cancellation bound calculators and on-average sweep checkers.

The pointwise bound for twisted sums to odd moduli is assembled from the
per-prime additive residues (the displayed form keeps the gcd with the floor
square root; the per-prime depth data stays available as diagnostics).
Implied constants of the on-average bounds are measured over sweeps and
reported, never asserted a priori.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arith import divisor_count, factorize, flrt, totient, v_p
from .characters import DirichletCharacter, dlog_table, postnikov_ell
from .expsums import twisted_kloosterman


class BoundError(ValueError):
    """Invalid input to a bound calculator."""


def weil_bound(m: int, n: int, c: int) -> float:
    """c^(1/2) (m,n,c)^(1/2) d(c), the square-root cancellation envelope."""
    if c < 1:
        raise BoundError("modulus must be positive")
    return math.sqrt(c) * math.sqrt(math.gcd(m, n, c)) * divisor_count(c)


@dataclass(frozen=True)
class WeilFactorData:
    """Per-prime data entering the twisted bound for one (chi, m, n) triple.

    For each p^e || c: the additive residue ell (verified exhaustively on
    construction), c_i = (c / p^e) * ell, the gcd depth
    delta = v_p(gcd(m, n, ell, p^floor(e/2))), and the discriminant depth
    v_p(c_i^2 + 4 m n) capped by floor(e/2).
    """

    prime: int
    exponent: int
    ell: int
    c_i: int
    delta: int
    disc_depth: int


def weil_factor_data(chi: DirichletCharacter, m: int, n: int) -> list[WeilFactorData]:
    c = chi.modulus
    out = []
    for comp in chi.components:
        p, e = comp.p, comp.e
        ell = postnikov_ell(chi.factor_mod(comp.prime_power)).value
        c_i = (c // comp.prime_power) * ell
        half = e // 2
        delta = v_p(math.gcd(m, n, ell, p**half), p) if half else 0
        disc = min(v_p(c_i * c_i + 4 * m * n, p), half)
        out.append(WeilFactorData(p, e, ell, c_i, delta, disc))
    return out


def flrt_bound(chi: DirichletCharacter, m: int, n: int) -> float:
    """The twisted-sum envelope to an odd modulus c:

        c^(1/2) d(c) (m, n, flrt(c))^(1/2)
            * (prod_i p_i^(v_{p_i}(c_i^2 + 4 m n)), flrt(c))^(1/2).
    """
    c = chi.modulus
    if c % 2 == 0:
        raise BoundError("the twisted envelope needs an odd modulus")
    data = weil_factor_data(chi, m, n)
    fl = flrt(c)
    disc_gcd = 1
    for d in data:
        disc_gcd *= d.prime**d.disc_depth  # min(v_p(c_i^2+4mn), v_p(flrt(c)))
    return (
        math.sqrt(c)
        * divisor_count(c)
        * math.sqrt(math.gcd(m, n, fl))
        * math.sqrt(disc_gcd)
    )


# ---------------------------------------------------------------------------
# on-average sweeps


@dataclass(frozen=True)
class AvgWeilResult:
    lhs: float
    envelope: float
    ratio: float
    pairs: int

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "envelope": self.envelope,
            "ratio": self.ratio,
            "pairs": self.pairs,
        }


def _hyperbola_pairs(A: int, B: int) -> list[tuple[int, int]]:
    """Ordered pairs (m, n), m, n >= 1, with A <= m*n <= B."""
    out = []
    for m in range(1, B + 1):
        n_lo = max(1, -(-A // m))  # ceil(A/m)
        n_hi = B // m
        for n in range(n_lo, n_hi + 1):
            out.append((m, n))
    return out


def avg_weil_envelope(c: int, A: int, B: int, eps0: float) -> float:
    return c ** (0.5 + eps0) * B**eps0 * (B - A + math.sqrt(c))


def avg_weil_check(
    chi: DirichletCharacter, A: int, B: int, eps0: float = 0.1
) -> AvgWeilResult:
    """lhs = sum over ordered pairs with A <= mn <= B of |S_chi(m,n;c)|;
    envelope = c^(1/2+eps0) B^eps0 (B - A + c^(1/2))."""
    if not 1 <= A <= B:
        raise BoundError("need 1 <= A <= B")
    c = chi.modulus
    pairs = _hyperbola_pairs(A, B)
    lhs = 0.0
    for m, n in pairs:
        lhs += abs(twisted_kloosterman(chi, m, n, c).value)
    env = avg_weil_envelope(c, A, B, eps0)
    return AvgWeilResult(lhs, env, lhs / env, len(pairs))


def avg_weil_sweep(
    c: int, A: int, B: int, eps0: float = 0.1
) -> list[tuple[DirichletCharacter, AvgWeilResult]]:
    """avg_weil_check for every character mod c at once (shared unit tables)."""
    from .characters import enumerate_group

    chars = enumerate_group(c)
    units, _ = kernels.units_and_inverses(c)
    rows = np.stack([np.conj(chi.values(units)) for chi in chars])
    pairs = _hyperbola_pairs(A, B)
    lhs = np.zeros(len(chars))
    for m, n in pairs:
        lhs += np.abs(kernels.weighted_kloosterman_many(m, n, c, rows))
    env = avg_weil_envelope(c, A, B, eps0)
    return [
        (chi, AvgWeilResult(float(v), env, float(v) / env, len(pairs)))
        for chi, v in zip(chars, lhs)
    ]


def avg_weil_corollary_check(
    chi: DirichletCharacter, M: int, n: int, alpha: float, eps0: float = 0.1
) -> AvgWeilResult:
    """lhs = sum over m <= M of m^alpha |S_chi(m,n;c)|; envelope =
    c^(1/2+eps0) M^(1+alpha+eps0) n^(1+eps0) + c^(1+eps0) M^(alpha+eps0) n^eps0."""
    if M < 1 or n < 1 or alpha < 0:
        raise BoundError("need M, n >= 1 and alpha >= 0")
    c = chi.modulus
    lhs = 0.0
    for m in range(1, M + 1):
        lhs += m**alpha * abs(twisted_kloosterman(chi, m, n, c).value)
    env = c ** (0.5 + eps0) * M ** (1 + alpha + eps0) * n ** (1 + eps0) + c ** (
        1 + eps0
    ) * M ** (alpha + eps0) * n**eps0
    return AvgWeilResult(lhs, env, lhs / env, M)


@dataclass(frozen=True)
class AmgmSplitResult:
    """The two divisor-weighted sums from the mean-inequality split, each
    against the shared envelope B^eps0 c^eps0 (B - A + c^(1/2))."""

    gcd_sum: float
    disc_sum: float
    envelope: float

    @property
    def gcd_ratio(self) -> float:
        return self.gcd_sum / self.envelope

    @property
    def disc_ratio(self) -> float:
        return self.disc_sum / self.envelope


def amgm_split_check(
    chi: DirichletCharacter, A: int, B: int, eps0: float = 0.1
) -> AmgmSplitResult:
    """sum_{A<=r<=B} d(r) (flrt(r), flrt(c))  and
    sum_{A<=r<=B} d(r) (prod_i p_i^(v_{p_i}(c_i^2+4r)), flrt(c))."""
    if not 1 <= A <= B:
        raise BoundError("need 1 <= A <= B")
    c = chi.modulus
    fl = flrt(c)
    data = weil_factor_data(chi, 1, 1)
    gcd_sum = 0.0
    disc_sum = 0.0
    for r in range(A, B + 1):
        d_r = divisor_count(r)
        gcd_sum += d_r * math.gcd(flrt(r), fl)
        disc = 1
        for item in data:
            half = item.exponent // 2
            disc *= item.prime ** min(v_p(item.c_i**2 + 4 * r, item.prime), half)
        disc_sum += d_r * disc
    env = B**eps0 * c**eps0 * (B - A + math.sqrt(c))
    return AmgmSplitResult(gcd_sum, disc_sum, env)
