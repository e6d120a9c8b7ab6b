"""Special functions: digamma, Bessel J, zeta via Euler-Maclaurin, and the
squarefree Dirichlet-series factor entering the prime-power main term.

Implementations are self-contained (scipy supplies only the complex
log-gamma); accuracy targets are 1e-10 in the working ranges, verified in the
test suite against high-precision references.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from .arith import primes_up_to


class SpecialFunctionError(ValueError):
    """Pole or domain violation in a special-function routine."""


# ---------------------------------------------------------------------------
# digamma

# B_{2n}/(2n) for the asymptotic series, n = 1..8
_DIGAMMA_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)

_DIGAMMA_SHIFT = 14.0


def digamma(z: complex) -> complex:
    """Psi(z) = Gamma'(z)/Gamma(z) by recurrence plus the asymptotic series.

    Accurate to ~1e-12 relative away from poles; poles (z a nonpositive
    integer) are rejected.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise SpecialFunctionError(f"digamma pole at z = {z}")
    acc = 0j
    while abs(z) < _DIGAMMA_SHIFT:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    power = inv2
    for coeff in _DIGAMMA_COEFFS:
        series += coeff * power
        power *= inv2
    return acc + cmath.log(z) - 0.5 / z - series


def digamma_vec(zs: np.ndarray) -> np.ndarray:
    """Vectorized digamma over a complex array (same algorithm)."""
    z = np.asarray(zs, dtype=np.complex128).copy()
    acc = np.zeros_like(z)
    for _ in range(int(_DIGAMMA_SHIFT) + 1):
        mask = np.abs(z) < _DIGAMMA_SHIFT
        if not mask.any():
            break
        acc[mask] -= 1.0 / z[mask]
        z[mask] += 1.0
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    power = inv2.copy()
    for coeff in _DIGAMMA_COEFFS:
        series += coeff * power
        power *= inv2
    return acc + np.log(z) - 0.5 / z - series


# ---------------------------------------------------------------------------
# Bessel J of integer order

_BESSEL_SERIES_CUTOFF = 12.0
_BESSEL_NU_MAX = 50


def _bessel_series(nu: int, x: float) -> float:
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    total = term
    x2 = -half * half
    for j in range(1, 80):
        term *= x2 / (j * (nu + j))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def _bessel_integral_points(nu: int, x: float) -> int:
    # aliasing error ~ J_{2M-nu}(x); push 2M-nu safely past the turning point
    return int((x + nu + 12.0 * x ** (1.0 / 3.0) + 60.0) / 2.0) + 1


def bessel_j(nu: int, x: float) -> float:
    """J_nu(x) for integer 0 <= nu <= 50 and x >= 0, to ~1e-10 absolute.

    Power series below x = 12; above that, the cosine integral representation
    evaluated by the (spectrally convergent) trapezoidal rule.
    """
    if not 0 <= nu <= _BESSEL_NU_MAX:
        raise SpecialFunctionError(f"order must satisfy 0 <= nu <= {_BESSEL_NU_MAX}")
    if x < 0:
        raise SpecialFunctionError("argument must be nonnegative")
    if x <= _BESSEL_SERIES_CUTOFF:
        return _bessel_series(nu, x)
    m = _bessel_integral_points(nu, x)
    theta = np.pi * (np.arange(m) + 0.5) / m  # midpoint rule, equally spectral
    return float(np.cos(nu * theta - x * np.sin(theta)).mean())


def bessel_j_vec(nu: int, xs: np.ndarray) -> np.ndarray:
    """Vectorized J_nu over a nonnegative float array."""
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty_like(xs)
    small = xs <= _BESSEL_SERIES_CUTOFF
    if small.any():
        out[small] = [_bessel_series(nu, float(x)) for x in xs[small]]
    big = ~small
    if big.any():
        xb = xs[big]
        m = _bessel_integral_points(nu, float(xb.max()))
        theta = np.pi * (np.arange(m) + 0.5) / m
        out[big] = np.cos(nu * theta[None, :] - xb[:, None] * np.sin(theta)[None, :]).mean(axis=1)
    return out


# ---------------------------------------------------------------------------
# zeta by Euler-Maclaurin

# B_{2k} for k = 1..10
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)


def zeta_em(s: complex, correction_terms: int = 10) -> complex:
    """zeta(s) by Euler-Maclaurin, valid for Re(s) > 0, s != 1."""
    s = complex(s)
    if s == 1:
        raise SpecialFunctionError("zeta pole at s = 1")
    if s.real <= 0:
        raise SpecialFunctionError("Euler-Maclaurin route needs Re(s) > 0")
    n_cut = max(24, int(0.85 * abs(s.imag)) + 8)
    ns = np.arange(1, n_cut, dtype=np.float64)
    total = complex(np.sum(ns ** (-s)))
    total += n_cut ** (1 - s) / (s - 1) + 0.5 * n_cut ** (-s)
    # correction: sum_k B_2k/(2k)! * s(s+1)...(s+2k-2) * N^(-s-2k+1)
    rising = s
    fact = 2.0
    npow = complex(n_cut) ** (-s - 1)
    for k in range(1, correction_terms + 1):
        total += _BERNOULLI[k - 1] / fact * rising * npow
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
        npow /= n_cut * n_cut
    return total


def zeta_em_vec(ss: np.ndarray, correction_terms: int = 10) -> np.ndarray:
    """Vectorized Euler-Maclaurin zeta (common cutoff from the largest |Im|)."""
    ss = np.asarray(ss, dtype=np.complex128)
    n_cut = max(24, int(0.85 * float(np.abs(ss.imag).max(initial=0.0))) + 8)
    ns = np.arange(1, n_cut, dtype=np.float64)
    total = (ns[None, :] ** (-ss[:, None])).sum(axis=1)
    total += n_cut ** (1 - ss) / (ss - 1) + 0.5 * n_cut ** (-ss)
    rising = ss.copy()
    fact = 2.0
    npow = complex(n_cut) ** (-ss - 1)
    for k in range(1, correction_terms + 1):
        total += _BERNOULLI[k - 1] / fact * rising * npow
        rising = rising * (ss + 2 * k - 1) * (ss + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
        npow = npow / (n_cut * n_cut)
    return total


# ---------------------------------------------------------------------------
# the squarefree Dirichlet-series factor xi(s) = zeta(s) * A(s)

A_PRIME_LIMIT = 100_000


@lru_cache(maxsize=4)
def _a_primes(limit: int) -> tuple[np.ndarray, np.ndarray]:
    ps = primes_up_to(limit).astype(np.float64)
    return ps, np.log(ps)


def a_factor(s: complex, prime_limit: int = A_PRIME_LIMIT) -> complex:
    """A(s) = prod over primes of (1 + (p^(s-1) - 1) / (p^(2s-1) (p-1))).

    Euler product truncated at primes <= prime_limit (default 1e5);
    converges for Re(s) > 1/2.  A(1) = 1 exactly (every factor is 1 there).
    """
    s = complex(s)
    if s.real <= 0.55:
        raise SpecialFunctionError(f"A(s) product requires Re(s) > 0.55, got {s}")
    ps, logp = _a_primes(prime_limit)
    e = np.exp((s - 1) * logp)  # p^(s-1); p^(2s-1) = e^2 * p
    term = (e - 1.0) / (e * e * ps * (ps - 1.0))
    return complex(np.exp(np.sum(np.log(1.0 + term))))


def a_factor_vec(ss: np.ndarray, prime_limit: int = A_PRIME_LIMIT) -> np.ndarray:
    ss = np.asarray(ss, dtype=np.complex128)
    if np.any(ss.real <= 0.55):
        raise SpecialFunctionError("A(s) product requires Re(s) > 0.55")
    ps, logp = _a_primes(prime_limit)
    log_total = np.zeros(ss.shape, dtype=np.complex128)
    for lo in range(0, ps.size, 2048):  # prime blocks keep the grid small
        pb, lb = ps[lo : lo + 2048], logp[lo : lo + 2048]
        e = np.exp((ss[:, None] - 1) * lb[None, :])
        term = (e - 1.0) / (e * e * pb[None, :] * (pb - 1.0)[None, :])
        log_total += np.log(1.0 + term).sum(axis=1)
    return np.exp(log_total)


def a_factor_tail(s: complex, prime_limit: int = A_PRIME_LIMIT) -> float:
    """Crude absolute bound on the truncated part of log A(s)."""
    sigma = complex(s).real
    out = 0.0
    for a in (sigma + 1.0, 2.0 * sigma):  # p^-sigma/(p-1) and p^(1-2sigma)/(p-1) envelopes
        if a > 1.0:
            out += 2.0 * prime_limit ** (1.0 - a) / ((a - 1.0) * math.log(prime_limit))
        else:
            out += math.inf
    return out


def xi_function(s: complex, prime_limit: int = A_PRIME_LIMIT) -> complex:
    """xi(s) = zeta(s) * A(s): analytic continuation of the squarefree series

        sum over squarefree b >= 1 of 1 / (b^(s-1) phi(b)),

    valid for Re(s) > 0.6 (simple pole at s = 1, which is rejected).
    """
    s = complex(s)
    if s == 1:
        raise SpecialFunctionError("xi pole at s = 1")
    if s.real <= 0.6:
        raise SpecialFunctionError(f"xi requires Re(s) > 0.6, got {s}")
    return zeta_em(s) * a_factor(s, prime_limit)


def xi_vec(ss: np.ndarray, prime_limit: int = A_PRIME_LIMIT) -> np.ndarray:
    ss = np.asarray(ss, dtype=np.complex128)
    if np.any(ss == 1):
        raise SpecialFunctionError("xi pole at s = 1")
    if np.any(ss.real <= 0.6):
        raise SpecialFunctionError("xi requires Re(s) > 0.6")
    return zeta_em_vec(ss) * a_factor_vec(ss, prime_limit)


# ---------------------------------------------------------------------------
# the prime-power main-term kernel


def bessel_mellin_ratio(kappa: int, s: complex) -> complex:
    """2^(-s) Gamma((kappa-s)/2) / Gamma((kappa+s)/2); equals 1 at s = 0."""
    return 2.0 ** (-s) * np.exp(loggamma((kappa - s) / 2.0) - loggamma((kappa + s) / 2.0))


J_KP_INTERPOLATION_CUTOFF = 1e-3


def _j_kappa_p_direct(kappa: int, p: int, s: complex,
                      prime_limit: int = A_PRIME_LIMIT) -> complex:
    num = p ** (1 + s) * xi_function(1 + s, prime_limit)
    den = p**s * (p - 1) + 1
    gamma_ratio = np.exp(loggamma((kappa - s) / 2.0) - loggamma((kappa + s) / 2.0))
    return num / den * gamma_ratio - 1.0 / s


def j_kappa_p(kappa: int, p: int, s: complex, cutoff: float = J_KP_INTERPOLATION_CUTOFF) -> complex:
    """The analytic prime-power kernel on the strip -0.4 < Re(s) < kappa:

        p^(1+s) xi(1+s) / (p^s (p-1) + 1) * Gamma((k-s)/2)/Gamma((k+s)/2) - 1/s

    with the removable singularity at s = 0 filled in by the symmetric
    average of evaluations at +-cutoff along the ray of s (the odd term
    cancels, so the value is exact to O(cutoff^2) at the center and flat
    across the cutoff disk).
    """
    if kappa < 2 or kappa % 2 != 0:
        raise SpecialFunctionError("kappa must be an even integer >= 2")
    s = complex(s)
    if not (-0.4 < s.real < kappa):
        raise SpecialFunctionError(
            f"s = {s} outside the supported strip -0.4 < Re(s) < {kappa}"
        )
    if abs(s) >= cutoff:
        return _j_kappa_p_direct(kappa, p, s)
    h = cutoff if s == 0 else cutoff * s / abs(s)
    return 0.5 * (_j_kappa_p_direct(kappa, p, h) + _j_kappa_p_direct(kappa, p, -h))


def j_kappa_p_vec(kappa: int, p: int, ss: np.ndarray,
                  prime_limit: int = A_PRIME_LIMIT) -> np.ndarray:
    """Vectorized kernel for quadrature grids (entries near 0 interpolated)."""
    ss = np.asarray(ss, dtype=np.complex128)
    out = np.empty_like(ss)
    near = np.abs(ss) < J_KP_INTERPOLATION_CUTOFF
    far = ~near
    if far.any():
        s = ss[far]
        num = p ** (1 + s) * xi_vec(1 + s, prime_limit)
        den = p**s * (p - 1) + 1
        gr = np.exp(loggamma((kappa - s) / 2.0) - loggamma((kappa + s) / 2.0))
        out[far] = num / den * gr - 1.0 / s
    if near.any():
        out[near] = [j_kappa_p(kappa, p, complex(s)) for s in ss[near]]
    return out
