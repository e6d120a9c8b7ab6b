"""Exponential-sum families: Kloosterman sums, twisted and coset variants.

Every family has a literal summation path (the oracle) and, where structure
theory applies, a structural fast path; the two are cross-checked by the
verification suites.  Phase arguments are always reduced exactly in integers
before a root of unity is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .arith import ArithError, factorize, inverse_mod, totient, v_p
from .characters import (
    CharacterComponent,
    CharacterCoset,
    CharacterError,
    DirichletCharacter,
    _enumerate_allowing_two,
    conductor,
    dlog_table,
    enumerate_group,
    gauss_sum,
)
from .sumvalue import SumValue

DIRECT_PATH_LIMIT = 10_000  # plain Kloosterman sums factor above this modulus


class ExpSumError(ValueError):
    """Invalid input to an exponential-sum routine."""


# ---------------------------------------------------------------------------
# plain and twisted Kloosterman sums


def kloosterman(m: int, n: int, c: int, method: str = "auto") -> SumValue:
    """S(m,n;c) = sum over units x mod c of e_c(m*x + n*inv(x)).

    Symmetric in (m, n).  For c > DIRECT_PATH_LIMIT the sum is assembled as a
    product over prime powers p^e || c of S(d*m, d*n; p^e), with d the inverse
    of c/p^e mod p^e; ``method`` forces "direct" or "factored".
    """
    if c < 1:
        raise ExpSumError(f"modulus must be positive, got {c}")
    if method == "auto":
        method = "direct" if c <= DIRECT_PATH_LIMIT else "factored"
    if method == "direct":
        return SumValue.of_sum(kernels.kloosterman_direct(m, n, c), totient(c))
    if method != "factored":
        raise ExpSumError(f"unknown method {method!r}")
    value = 1 + 0j
    err = 0.0
    terms = 0
    for p, e in factorize(c).pairs:
        pe = p**e
        d = inverse_mod(c // pe, pe)
        part = kloosterman(d * m % pe, d * n % pe, pe, method="direct")
        err = err * abs(part.value) + part.err_radius * abs(value)
        value *= part.value
        terms += part.terms
    return SumValue(value, err + 1e-15, terms)


def _twisted_weights(chi: DirichletCharacter, units: np.ndarray) -> np.ndarray:
    # S_chi twists by chi-bar(x)
    return np.conj(chi.values(units))


def _twisted_induced(chi: DirichletCharacter, m: int, n: int, c: int) -> SumValue:
    """S over units mod c of chi-bar(x) e_c(mx + n*inv(x)); chi.modulus | c."""
    units, _ = kernels.units_and_inverses(c)
    w = _twisted_weights(chi, units)
    val = kernels.weighted_kloosterman_many(m, n, c, w[None, :])[0]
    return SumValue.of_sum(complex(val), len(units))


def twisted_kloosterman(
    chi: DirichletCharacter, m: int, n: int, c: int, method: str = "auto"
) -> SumValue:
    """S_chi(m,n;c) = sum over units x mod c of chi-bar(x) e_c(m*x + n*inv(x)).

    chi must be given to the modulus c.  The factored path multiplies the
    prime-power twisted sums S_{chi_i}(d_i*m, d_i*n; p_i^{e_i}).
    """
    if chi.modulus != c:
        raise ExpSumError(f"character modulus {chi.modulus} != sum modulus {c}")
    if method == "auto":
        method = "direct" if c <= DIRECT_PATH_LIMIT else "factored"
    if method == "direct":
        return _twisted_induced(chi, m, n, c)
    if method != "factored":
        raise ExpSumError(f"unknown method {method!r}")
    value = 1 + 0j
    err = 0.0
    terms = 0
    for comp in chi.components:
        pe = comp.prime_power
        d = inverse_mod(c // pe, pe)
        part = _twisted_induced(
            DirichletCharacter(pe, (comp,)), d * m % pe, d * n % pe, pe
        )
        err = err * abs(part.value) + part.err_radius * abs(value)
        value *= part.value
        terms += part.terms
    if not chi.components:  # modulus 1
        return SumValue.of_sum(1 + 0j, 1)
    return SumValue(value, err + 1e-15, terms)


def lift_character(chi: DirichletCharacter, c: int) -> DirichletCharacter:
    """The character mod c induced by chi (agrees with chi on units of c).

    c must be a multiple of chi.modulus with 4 not dividing c.
    """
    if c % chi.modulus != 0:
        raise CharacterError(f"{c} is not a multiple of {chi.modulus}")
    comps = []
    by_p = {comp.p: comp for comp in chi.components}
    for p, e in factorize(c).pairs:
        pe = p**e
        if p in by_p:
            comp = by_p[p]
            if p == 2:
                comps.append(CharacterComponent(2, e, 0))
                continue
            phi_small = comp.unit_order
            phi_big = p ** (e - 1) * (p - 1)
            g_big = int(
                np.argmax(dlog_table(pe) == 1)
            )  # the generator itself: dlog == 1
            d = int(dlog_table(comp.prime_power)[g_big % comp.prime_power])
            comps.append(
                CharacterComponent(p, e, comp.t * d * (phi_big // phi_small) % phi_big)
            )
        else:
            comps.append(CharacterComponent(p, e, 0))
    return DirichletCharacter(c, tuple(comps))


def kloosterman_fourier(chi: DirichletCharacter, m: int, c: int) -> SumValue:
    """S_chi(m,1;c) assembled from its multiplicative-character series:

        (1/phi(c)) * sum over psi mod c of psi-bar(m) tau(psi) tau(chi psi),

    valid when gcd(c, m) = 1.
    """
    if chi.modulus != c:
        raise ExpSumError(f"character modulus {chi.modulus} != sum modulus {c}")
    if math.gcd(c, m) != 1:
        raise ExpSumError(f"need gcd(c, m) = 1, got gcd({c}, {m}) > 1")
    total = 0j
    err = 0.0
    for psi in enumerate_group(c):
        t1 = gauss_sum(psi)
        t2 = gauss_sum(chi * psi)
        coeff = np.conj(psi(m))
        total += coeff * t1.value * t2.value
        err += t1.err_radius * abs(t2.value) + t2.err_radius * abs(t1.value)
    phi_c = totient(c)
    return SumValue(total / phi_c, (err / phi_c) + 1e-15, phi_c * 2 * c)


# ---------------------------------------------------------------------------
# same-sign / opposite-sign restricted sums


def salie_sum(
    psi: DirichletCharacter,
    m: int,
    n: int,
    r: int,
    j: int,
    sign: int,
    method: str = "direct",
) -> SumValue:
    """Restricted sum over x mod p^r with m*x^2 = sign*n (mod p^j), (x,p)=1,
    of psi^2(x) e_{p^r}(m*x + n*inv(x)).  psi lives mod p^k, r >= k >= 1,
    1 <= j < k, p odd, p coprime to m*n.

    method "direct" is the literal restricted sum; "structural" applies the
    vanishing window / twisted-collapse identities:
      sign=+1:  0 for k <= r < j+k;   S_{psi-bar^2}(m,n;p^r) for r >= j+k
      sign=-1:  0 for r > k
    """
    comp = psi.components[0] if len(psi.components) == 1 else None
    if comp is None or comp.p == 2:
        raise ExpSumError("psi must live mod an odd prime power")
    p, k = comp.p, comp.e
    if sign not in (1, -1):
        raise ExpSumError("sign must be +1 or -1")
    if m % p == 0 or n % p == 0:
        raise ExpSumError("m and n must be coprime to p")
    if not (1 <= j < k <= r):
        raise ExpSumError(f"need 1 <= j < k <= r, got j={j}, k={k}, r={r}")

    if method == "structural":
        if sign == 1:
            if r < j + k:
                return SumValue(0j, 0.0, 0)
            return twisted_kloosterman(
                lift_character(psi**2, p**r).conjugate(), m, n, p**r, method="direct"
            )
        if r > k:
            return SumValue(0j, 0.0, 0)
        return salie_sum(psi, m, n, r, j, sign, method="direct")
    if method != "direct":
        raise ExpSumError(f"unknown method {method!r}")

    pr = p**r
    pj = p**j
    units, invs = kernels.units_and_inverses(pr)
    mask = (m % pj * (units % pj) ** 2 + (-sign * n) % pj) % pj == 0
    xs, xi = units[mask], invs[mask]
    if xs.size == 0:
        return SumValue(0j, 0.0, 0)
    w = (psi**2).values(xs)
    phase = ((m % pr) * xs + (n % pr) * xi) % pr
    val = np.dot(w, np.exp(2j * np.pi * phase / pr))
    return SumValue.of_sum(complex(val), int(xs.size))


# ---------------------------------------------------------------------------
# coset sums


@dataclass(frozen=True)
class CosetSumParams:
    """Arguments (m, n; c) for a coset sum over psi*G_{p^j} inside mod p^k.

    c = b * p^r with p coprime to b and r >= k; m, n coprime to p.
    """

    coset: CharacterCoset
    m: int
    n: int
    c: int

    def __post_init__(self) -> None:
        p, k = self.coset.p, self.coset.k
        if self.m < 1 or self.n < 1 or self.c < 1:
            raise ExpSumError("m, n, c must be positive")
        if self.m % p == 0 or self.n % p == 0:
            raise ExpSumError("m and n must be coprime to p")
        if self.c % p**k != 0:
            raise ExpSumError(f"c = {self.c} must be divisible by p^k = {p**k}")

    @property
    def p(self) -> int:
        return self.coset.p

    @property
    def r(self) -> int:
        return v_p(self.c, self.p)

    @property
    def b(self) -> int:
        return self.c // self.p**self.r


def coset_sigma(params: CosetSumParams, method: str = "literal") -> SumValue:
    """sigma_{psi,eps}(m,n;c) = sum over coset members chi of
    chi(m) chi-bar(n) [1 + eps*chi(-1)] S_{chi-bar^2}(m,n;c).

    "literal" evaluates the double sum directly (the oracle); "structural"
    dispatches on r = v_p(c):

        r = k          split form (opposite-sign part only)
        k < r < j+k    0
        j+k <= r < 2k  psi(m) psi-bar(n) phi(p^j) S_{psi-bar^2}(m,n;c)
        r >= 2k        phi(p^j) S(m,n;c)
    """
    if method == "literal":
        return _coset_sigma_literal(params)
    if method != "structural":
        raise ExpSumError(f"unknown method {method!r}")
    coset = params.coset
    p, k, j = coset.p, coset.k, coset.j
    m, n, c, r, b = params.m, params.n, params.c, params.r, params.b
    psi = coset.base
    phi_pj = coset.subgroup_size()

    if k < r < j + k:
        return SumValue(0j, 0.0, 0)
    if r >= 2 * k:
        return kloosterman(m, n, c).scaled(phi_pj)
    prefactor = psi(m) * np.conj(psi(n)) * phi_pj
    if r >= j + k:
        # sigma = psi(m) psi-bar(n) phi(p^j) S_{psi-bar^2}(m,n;c), factored
        pr = p**r
        pbr = _inv_pow(p, r, b)
        s_b = kloosterman(pbr * m % b if b > 1 else 0, pbr * n % b if b > 1 else 0, b)
        bbar = inverse_mod(b, pr)
        s_p = _twisted_induced((psi**2).conjugate(), bbar * m % pr, bbar * n % pr, pr)
        val = s_b.value * s_p.value
        err = s_b.err_radius * abs(s_p.value) + s_p.err_radius * abs(s_b.value)
        return SumValue(val, err + 1e-15, s_b.terms + s_p.terms).scaled(prefactor)
    # r == k: the same-sign part vanishes, only the opposite-sign piece remains
    pr = p**r
    pbr = _inv_pow(p, r, b)
    s_b = kloosterman(pbr * m % b if b > 1 else 0, pbr * n % b if b > 1 else 0, b)
    bbar = inverse_mod(b, pr)
    km = salie_sum(psi, bbar * m % pr, bbar * n % pr, r, j, -1)
    eps_sign = coset.epsilon * psi(-1)
    val = prefactor * eps_sign * s_b.value * km.value
    err = abs(prefactor) * (
        s_b.err_radius * abs(km.value) + km.err_radius * abs(s_b.value)
    )
    return SumValue(val, err + 1e-15, s_b.terms + km.terms)


def _inv_pow(p: int, r: int, b: int) -> int:
    """inverse of p^r mod b (0 when b = 1)."""
    if b == 1:
        return 0
    return inverse_mod(pow(p, r, b), b)


@dataclass(frozen=True)
class CosetRows:
    """The chi^2 value matrix on the units mod c, shared across (m, n, eps).

    rows[i] holds chi_i^2(x) over the units of c (the twist weights of
    S_{chi-bar^2}); ts are the member exponent indices.
    """

    c: int
    q: int
    phi_q: int
    ts: tuple[int, ...]
    rows: np.ndarray
    roots: np.ndarray
    unit_count: int


def coset_rows(coset: CharacterCoset, c: int) -> CosetRows:
    q = coset.prime_power
    phi_q = totient(q)
    units, _ = kernels.units_and_inverses(c)
    pos = dlog_table(q)[units % q]
    roots = np.exp(2j * np.pi * np.arange(phi_q) / phi_q)
    ts = tuple(coset.member_indices())
    rows = np.empty((len(ts), units.size), dtype=np.complex128)
    for i, t in enumerate(ts):
        rows[i] = roots[(2 * t * pos) % phi_q]  # chi^2(x), the S_{chi-bar^2} twist
    return CosetRows(c, q, phi_q, ts, rows, roots, int(units.size))


def coset_sigma_from_rows(
    cache: CosetRows, m: int, n: int, epsilon: int
) -> SumValue:
    """Literal double sum using a prebuilt value matrix (oracle path)."""
    dl = dlog_table(cache.q)
    sums = kernels.weighted_kloosterman_many(m, n, cache.c, cache.rows)
    dm, dn = int(dl[m % cache.q]), int(dl[n % cache.q])
    total = 0j
    for i, t in enumerate(cache.ts):
        coeff = cache.roots[(t * (dm - dn)) % cache.phi_q] * (1 + epsilon * (-1) ** t)
        total += coeff * sums[i]
    return SumValue.of_sum(complex(total), len(cache.ts) * cache.unit_count)


def _coset_sigma_literal(params: CosetSumParams) -> SumValue:
    cache = coset_rows(params.coset, params.c)
    return coset_sigma_from_rows(cache, params.m, params.n, params.coset.epsilon)


@dataclass(frozen=True)
class SigmaSplit:
    """The split of a coset sum at r >= k into same/opposite-sign pieces.

    reconstruct() = psi(m) psi-bar(n) phi(p^j) * S(pbar^r m, pbar^r n; b)
                    * [same_sign + eps*psi(-1)*opposite_sign].
    """

    params: CosetSumParams
    same_sign: SumValue
    opposite_sign: SumValue
    kloosterman_b: SumValue

    def reconstruct(self) -> SumValue:
        psi = self.params.coset.base
        eps = self.params.coset.epsilon
        pre = psi(self.params.m) * np.conj(psi(self.params.n)) * self.params.coset.subgroup_size()
        inner = self.same_sign.value + eps * psi(-1) * self.opposite_sign.value
        inner_err = self.same_sign.err_radius + self.opposite_sign.err_radius
        val = pre * self.kloosterman_b.value * inner
        err = abs(pre) * (
            self.kloosterman_b.err_radius * abs(inner)
            + abs(self.kloosterman_b.value) * inner_err
        )
        return SumValue(
            val,
            err + 1e-15,
            self.same_sign.terms + self.opposite_sign.terms + self.kloosterman_b.terms,
        )


def sigma_split(params: CosetSumParams) -> SigmaSplit:
    """Split sigma at r >= k into the two restricted sums mod p^r."""
    coset = params.coset
    p, j = coset.p, coset.j
    m, n, b, r = params.m, params.n, params.b, params.r
    pr = p**r
    pbr = _inv_pow(p, r, b)
    s_b = kloosterman(pbr * m % b if b > 1 else 0, pbr * n % b if b > 1 else 0, b)
    bbar = inverse_mod(b, pr)
    kp = salie_sum(coset.base, bbar * m % pr, bbar * n % pr, r, j, +1)
    km = salie_sum(coset.base, bbar * m % pr, bbar * n % pr, r, j, -1)
    return SigmaSplit(params, kp, km, s_b)


# ---------------------------------------------------------------------------
# Fourier coefficients of the coset sum at r = k


def sigma_hat(
    psi: DirichletCharacter, j: int, eta: DirichletCharacter
) -> SumValue:
    """Fourier coefficient of the coset sum against the character eta mod b*q.

    Nonzero exactly when psi*eta_q-bar is primitive mod q and cond(eta_q^2)
    divides p^(k-j); the value is then

        eta_q(-1) eta_q^2(b) eta_b^2(q) tau(eta_b)^2 tau(psi eta_q)
            * phi(p^(j+k)) / tau(psi eta_q-bar).
    """
    comp = psi.components[0] if len(psi.components) == 1 else None
    if comp is None or comp.p == 2:
        raise ExpSumError("psi must live mod an odd prime power")
    p, k = comp.p, comp.e
    q = p**k
    if not 1 <= j < k:
        raise ExpSumError(f"need 1 <= j < k, got j={j}, k={k}")
    c = eta.modulus
    if c % q != 0:
        raise ExpSumError(f"eta's modulus {c} must be a multiple of q = {q}")
    b = c // q
    if b % p == 0:
        raise ExpSumError("b must be coprime to p")
    eta_q = eta.factor_mod(q)
    eta_b = eta.factor_mod(b)

    if conductor(psi * eta_q.conjugate()) != q:
        return SumValue(0j, 0.0, 0)
    if p**k // conductor(eta_q**2) < p**j:  # cond(eta_q^2) > p^(k-j)
        return SumValue(0j, 0.0, 0)

    t_b = gauss_sum(eta_b)
    t_num = gauss_sum(psi * eta_q)
    t_den = gauss_sum(psi * eta_q.conjugate())
    phi_jk = totient(p ** (j + k))
    front = eta_q(-1) * (eta_q**2)(b) * (eta_b**2)(q)
    value = front * t_b.value**2 * t_num.value * phi_jk / t_den.value
    # |t_den| = sqrt(q) is guaranteed by the primitivity guard
    rel = (
        2 * t_b.err_radius / max(abs(t_b.value), 1e-300)
        + t_num.err_radius / max(abs(t_num.value), 1e-300)
        + t_den.err_radius / math.sqrt(q)
    )
    return SumValue(value, abs(value) * rel + 1e-12, 2 * c)


def sigma_hat_inversion(coset: CharacterCoset, m: int, b: int) -> SumValue:
    """Reassemble sigma_{psi,eps}(m,1;b*q) from the Fourier coefficients:

        (eps/phi(c)) * sum over eta mod c with v_p(cond(eta^2)) <= k-j
                       of eta-bar(m) sigma_hat(eta).

    Requires gcd(m, b) = 1 and p coprime to m*b.
    """
    p, k, j = coset.p, coset.k, coset.j
    q = coset.prime_power
    if math.gcd(m, b) != 1 or m % p == 0 or b % p == 0:
        raise ExpSumError("need gcd(m,b)=1 and p coprime to m and b")
    c = b * q
    total = 0j
    err = 0.0
    count = 0
    for eta in _enumerate_allowing_two(c):
        if v_p(conductor(eta**2), p) > k - j:
            continue
        sh = sigma_hat(coset.base, j, eta)
        total += np.conj(eta(m)) * sh.value
        err += sh.err_radius
        count += 1
    phi_c = totient(c)
    return SumValue(coset.epsilon * total / phi_c, err / phi_c + 1e-15, count)


# ---------------------------------------------------------------------------
# quadratic congruence counting


M_COUNT_BRUTE_LIMIT = 1_000_000


def _legendre(u: int, p: int) -> int:
    s = pow(u % p, (p - 1) // 2, p)
    return -1 if s == p - 1 else int(s)


def _sqrt_count(d: int, p: int, e: int) -> int:
    """#{y mod p^e : y^2 = d}, p odd."""
    pe = p**e
    d %= pe
    if d == 0:
        return p ** (e // 2)
    v = v_p(d, p)
    if v % 2 == 1:
        return 0
    u = d // p**v
    return 0 if _legendre(u, p) != 1 else 2 * p ** (v // 2)


def _count_prime_power(alpha: int, beta: int, gamma: int, p: int, e: int) -> int:
    """#{x mod p^e : alpha x^2 + beta x + gamma = 0}, p odd, via lifting."""
    pe = p**e
    a, b, g = alpha % pe, beta % pe, gamma % pe
    if a == 0 and b == 0 and g == 0:
        return pe
    delta = min(v_p(a, p) if a else e, v_p(b, p) if b else e, v_p(g, p) if g else e, e)
    if delta > 0:
        return p**delta * _count_prime_power(
            a // p**delta, b // p**delta, g // p**delta, p, e - delta
        )
    if a % p != 0:
        # complete the square: (2a x + b)^2 = b^2 - 4ag, the substitution is a bijection
        return _sqrt_count(b * b - 4 * a * g, p, e)
    if b % p != 0:
        return 1  # unit linear slope: unique Hensel lift of the single root mod p
    return 0  # a, b = 0 mod p but g a unit


def m_count(alpha: int, beta: int, gamma: int, q: int) -> int:
    """#{x mod q : alpha x^2 + beta x + gamma = 0 (mod q)}.

    Brute force for q <= 1e6; odd prime powers beyond use Hensel structure;
    composite q multiplies the prime-power counts (CRT).
    """
    if q < 1:
        raise ExpSumError(f"modulus must be positive, got {q}")
    if q <= M_COUNT_BRUTE_LIMIT:
        return kernels.quadratic_root_count(alpha, beta, gamma, q)
    out = 1
    for p, e in factorize(q).pairs:
        pe = p**e
        if pe <= M_COUNT_BRUTE_LIMIT:
            out *= kernels.quadratic_root_count(alpha, beta, gamma, pe)
        elif p == 2:
            raise ExpSumError("2-adic counting beyond the brute-force limit is unsupported")
        else:
            out *= _count_prime_power(alpha, beta, gamma, p, e)
    return out
