# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: unit/inverse tables, weighted exponential sums,
quadratic congruence root counts.

Call contracts match klsums._kernels_py; klsums.kernels picks whichever is
available at import time.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "compiled"

DEF TWO_PI = 6.283185307179586476925286766559

cdef long long C_MAX = (<long long> 1) << 31


cdef inline long long ext_inverse(long long a, long long c) nogil:
    # inverse of a mod c via extended Euclid; caller guarantees gcd(a,c)=1
    cdef long long old_r = a, r = c
    cdef long long old_s = 1, s = 0
    cdef long long q, tmp
    while r != 0:
        q = old_r / r
        tmp = old_r - q * r; old_r = r; r = tmp
        tmp = old_s - q * s; old_s = s; s = tmp
    old_s %= c
    if old_s < 0:
        old_s += c
    return old_s


cdef inline long long gcd_ll(long long a, long long b) nogil:
    cdef long long t
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


def units_and_inverses(long long c):
    """Units x mod c (ascending) and their inverses; ([0],[0]) for c = 1."""
    if c < 1 or c >= C_MAX:
        raise ValueError(f"kernel modulus must satisfy 1 <= c < 2**31, got {c}")
    if c == 1:
        z = np.zeros(1, dtype=np.int64)
        return z, z.copy()
    cdef long long x, count = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] units = np.empty(c, dtype=np.int64)
    cdef long long[::1] uv = units
    for x in range(1, c):
        if gcd_ll(x, c) == 1:
            uv[count] = x
            count += 1
    units = units[:count].copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] invs = np.empty(count, dtype=np.int64)
    cdef long long[::1] u2 = units
    cdef long long[::1] iv = invs
    cdef long long i
    with nogil:
        for i in range(count):
            iv[i] = ext_inverse(u2[i], c)
    return units, invs


def weighted_kloosterman_many(
    long long m,
    long long n,
    long long c,
    cnp.ndarray[cnp.int64_t, ndim=1] units,
    cnp.ndarray[cnp.int64_t, ndim=1] invs,
    weights,
    roots=None,
):
    """For each weight row w: sum_i w[i] * e_c(m*units[i] + n*invs[i])."""
    if c < 1 or c >= C_MAX:
        raise ValueError(f"kernel modulus must satisfy 1 <= c < 2**31, got {c}")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] w = np.ascontiguousarray(
        np.atleast_2d(np.asarray(weights, dtype=np.complex128))
    )
    cdef Py_ssize_t rows = w.shape[0]
    cdef Py_ssize_t size = units.shape[0]
    if w.shape[1] != size:
        raise ValueError("weight rows must align with the unit table")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(rows, dtype=np.complex128)
    cdef long long[::1] uv = units
    cdef long long[::1] iv = invs
    cdef double complex[:, ::1] wv = w
    cdef double complex[::1] ov = out
    cdef long long mm = m % c, nn = n % c
    if mm < 0:
        mm += c
    if nn < 0:
        nn += c
    cdef Py_ssize_t i, r
    cdef long long phase
    cdef double ang, cr, ci
    cdef double complex e
    cdef double *ctab
    cdef double *stab
    cdef long long k
    with nogil:
        ctab = <double *> malloc(c * sizeof(double))
        stab = <double *> malloc(c * sizeof(double))
    if ctab == NULL or stab == NULL:
        if ctab != NULL:
            free(ctab)
        if stab != NULL:
            free(stab)
        raise MemoryError()
    with nogil:
        for k in range(c):
            ang = TWO_PI * k / c
            ctab[k] = cos(ang)
            stab[k] = sin(ang)
        for i in range(size):
            phase = (mm * uv[i] + nn * iv[i]) % c
            cr = ctab[phase]
            ci = stab[phase]
            e = cr + 1j * ci
            for r in range(rows):
                ov[r] = ov[r] + wv[r, i] * e
        free(ctab)
        free(stab)
    return out


def kloosterman_direct(
    long long m,
    long long n,
    long long c,
    cnp.ndarray[cnp.int64_t, ndim=1] units,
    cnp.ndarray[cnp.int64_t, ndim=1] invs,
    roots=None,
):
    """sum over units x mod c of e_c(m*x + n*inv(x))."""
    if c < 1 or c >= C_MAX:
        raise ValueError(f"kernel modulus must satisfy 1 <= c < 2**31, got {c}")
    cdef long long[::1] uv = units
    cdef long long[::1] iv = invs
    cdef Py_ssize_t i, size = units.shape[0]
    cdef long long mm = m % c, nn = n % c
    if mm < 0:
        mm += c
    if nn < 0:
        nn += c
    cdef long long phase
    cdef double ang, re = 0.0, im = 0.0
    with nogil:
        for i in range(size):
            phase = (mm * uv[i] + nn * iv[i]) % c
            ang = TWO_PI * phase / c
            re += cos(ang)
            im += sin(ang)
    return complex(re, im)


def quadratic_root_count(long long alpha, long long beta, long long gamma, long long q):
    """#{x mod q : alpha*x^2 + beta*x + gamma == 0 (mod q)}."""
    if q < 1 or q >= C_MAX:
        raise ValueError(f"kernel modulus must satisfy 1 <= q < 2**31, got {q}")
    cdef long long a = alpha % q, b = beta % q, g = gamma % q
    if a < 0:
        a += q
    if b < 0:
        b += q
    if g < 0:
        g += q
    cdef long long x, v, count = 0
    with nogil:
        for x in range(q):
            v = ((a * x) % q * x + b * x + g) % q
            if v == 0:
                count += 1
    return count
