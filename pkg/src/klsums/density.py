"""Main terms of the one-level density asymptotics and the nonvanishing
arithmetic.

Group-density weights are realized as functionals on (phi, phi_hat) via
Plancherel, never as pointwise densities.  Prime sums are exact (summation by
parts between primes); the remaining integrals go through the quadrature
engines, with truncation radii tolerance-derived but capped, and the capped
tail reported as part of each term's error estimate.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .arith import divisor_count, factorize, inverse_mod, primes_up_to, totient
from .characters import CharacterCoset, DirichletCharacter, conductor
from .expsums import CosetSumParams, ExpSumError, _twisted_induced, salie_sum
from .quadrature import QuadResult, adaptive_simpson, gl_panels
from .specfun import a_factor_tail, bessel_j, bessel_j_vec, digamma, digamma_vec, j_kappa_p_vec
from .sumvalue import SumValue
from .testfun import TestFunction

SIEVE_LIMIT_ENV = "EXPSUM_SIEVE_LIMIT"
DEFAULT_SIEVE_LIMIT = 10_000_000

SYMMETRY_TYPES = ("U", "O", "SO(even)", "SO(odd)")


class SieveLimitError(RuntimeError):
    """A prime sum would need primes beyond the sieve cap."""


class DensityError(ValueError):
    """Invalid density-computation parameters."""


def sieve_limit() -> int:
    raw = os.environ.get(SIEVE_LIMIT_ENV, "")
    if raw:
        try:
            return int(float(raw))
        except ValueError as exc:
            raise DensityError(f"bad {SIEVE_LIMIT_ENV}: {raw!r}") from exc
    return DEFAULT_SIEVE_LIMIT


@lru_cache(maxsize=4)
def _primes_cached(limit: int) -> np.ndarray:
    return primes_up_to(limit)


def _primes_below(x: float) -> np.ndarray:
    cap = sieve_limit()
    if x > cap:
        raise SieveLimitError(f"prime sum needs primes up to {x:.3g} > cap {cap}")
    limit = int(x)
    ps = _primes_cached(max(64, 1 << (limit.bit_length()))) if limit > 0 else _primes_cached(64)
    return ps[ps <= limit]


# ---------------------------------------------------------------------------
# fourth root of unity i^kappa, handled exactly


def i_power(kappa: int) -> complex:
    return (1j) ** (kappa % 4)


# ---------------------------------------------------------------------------
# group-density functionals


def wg_functional(phi: TestFunction, symmetry: str) -> float:
    """Integral of phi against the group density, via Plancherel:

        U         -> phi_hat(0)
        O         -> phi_hat(0) + phi(0)/2
        SO(even)  -> phi_hat(0) + (1/2) integral of phi_hat over [-1, 1]
        SO(odd)   -> phi_hat(0) + phi(0) - (1/2) integral over [-1, 1]
    """
    if symmetry not in SYMMETRY_TYPES:
        raise DensityError(f"unknown symmetry type {symmetry!r}")
    base = phi.phi_hat(0.0)
    if symmetry == "U":
        return base
    if symmetry == "O":
        return base + 0.5 * phi.phi(0.0)
    inner = phi.integrate_phi_hat(-1.0, 1.0)
    if symmetry == "SO(even)":
        return base + 0.5 * inner
    return base + phi.phi(0.0) - 0.5 * inner


# ---------------------------------------------------------------------------
# term containers


@dataclass(frozen=True)
class TermValue:
    value: float
    quad_error: float = 0.0
    trunc_error: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "quad_error": self.quad_error,
            "trunc_error": self.trunc_error,
        }


# ---------------------------------------------------------------------------
# the digamma-weighted integral


def integral_I(
    kappa: int,
    phi: TestFunction,
    R: float,
    tol: float = 1e-9,
    t_max: float = 1e4,
) -> TermValue:
    """Integral over x of Psi(kappa/2 + 2 pi i x / log R) phi(x).

    Real for real even phi (the imaginary parts cancel); the imaginary
    residual is checked below 1e-8 before being discarded.  The truncation
    radius is tolerance-derived from the phi envelope but capped at t_max;
    the capped tail enters trunc_error.
    """
    if R <= 1:
        raise DensityError("R must exceed 1")
    log_r = math.log(R)
    delta = 2.0 * math.pi / log_r
    a = kappa / 2.0

    # tolerance-derived radius from the phi envelope, capped at t_max
    t_cut = min(t_max, max(8.0, phi.envelope_const * 4.0 / tol))
    width = min(1.0, max(0.5, 1.0 / (2.0 * phi.theta)))

    def f(x: float) -> complex:
        return digamma(a + 1j * delta * x) * phi.phi(x)

    quad = adaptive_simpson(f, -t_cut, t_cut, tol=tol, min_panels=int(2 * t_cut / width))
    tail = _phi_tail_estimate(phi, t_cut) * (abs(digamma(a + 1j * delta * t_cut)) + 1.0)
    if abs(quad.value.imag) > 1e-8 * max(1.0, abs(quad.value.real)):
        raise DensityError(f"imaginary residual {quad.value.imag} exceeds 1e-8")
    return TermValue(quad.value.real, quad.error, tail)


def _phi_tail_estimate(phi: TestFunction, t_cut: float) -> float:
    """Estimate of the integral of |phi| beyond +-t_cut (x^-2 envelope)."""
    return 2.0 * phi.envelope_const / t_cut


def integral_I_series(kappa: int, phi: TestFunction, R: float, n_terms: int,
                      psi_derivs: list[float]) -> float:
    """Truncated large-R expansion of the digamma-weighted integral:

        sum_{n < N} Psi^(2n)(kappa/2) phi_hat^(2n)(0) / ((2n)! (log R)^(2n)),

    with remainder O((log R)^(-2N)).  psi_derivs supplies Psi^(2n)(kappa/2);
    requires smoothness of phi_hat at 0 (N <= 2 through the derivative API).
    """
    log_r = math.log(R)
    total = 0.0
    for n in range(n_terms):
        total += (
            psi_derivs[n]
            * phi.phi_hat_deriv(2 * n, 0.0)
            / (math.factorial(2 * n) * log_r ** (2 * n))
        )
    return total


# ---------------------------------------------------------------------------
# prime sums: the diagonal and the Chebyshev-weighted integral


def s_diagonal(phi: TestFunction, R: float, eta: DirichletCharacter) -> float:
    """Direct prime sum: sum over primes l of Re[eta^2(l)] log(l)/l *
    phi_hat(2 log l / log R)."""
    log_r = math.log(R)
    x_max = R ** (phi.theta / 2.0)
    ps = _primes_below(x_max)
    eta2 = eta**2
    total = 0.0
    for ell in ps:
        w = phi.phi_hat(2.0 * math.log(ell) / log_r)
        if w == 0.0:
            continue
        total += (eta2(int(ell)).real) * math.log(ell) / ell * w
    return total


def integral_J(
    q: int,
    phi: TestFunction,
    R: float,
    chi: DirichletCharacter | None = None,
) -> TermValue:
    """The Chebyshev-weighted integral against Phi_R'(x), evaluated exactly by
    summation by parts over primes (the integrand is piecewise smooth).

    Principal mode (chi None): integral over [1, inf) of
        Phi_R'(x) [theta_{chi_0}(x) - x],
    with chi_0 the principal character mod q; equals

        phi_hat(0) + (log R / 2) * integral_0^inf phi_hat
        - sum_{l prime, l not dividing q} log(l) Phi_R(l).

    Twisted mode: integral of Phi_R'(x) Re[theta_chi(x)], which is
        - sum_l Re[chi(l)] log(l) Phi_R(l).
    """
    log_r = math.log(R)
    x_max = R ** (phi.theta / 2.0)
    ps = _primes_below(x_max)

    def phi_r(x: float) -> float:
        return phi.phi_hat(2.0 * math.log(x) / log_r) / x

    if chi is not None:
        total = 0.0
        for ell in ps:
            re = chi(int(ell)).real
            if re != 0.0:
                total -= re * math.log(ell) * phi_r(float(ell))
        return TermValue(total)

    prime_part = 0.0
    for ell in ps:
        if q % int(ell) != 0:
            prime_part += math.log(ell) * phi_r(float(ell))
    half_mass = phi.integrate_phi_hat(0.0, phi.theta)
    value = phi.phi_hat(0.0) + (log_r / 2.0) * half_mass - prime_part
    return TermValue(value)


# ---------------------------------------------------------------------------
# the oscillatory prime-power kernel integral


def integral_L(
    kappa: int,
    p: int,
    phi: TestFunction,
    R: float,
    t_max: float = 200.0,
    prime_limit: int = 5_000,
    check_imag: bool = False,
) -> TermValue:
    """Integral over y of e(-y) * K(4 pi i y / log R) * phi(y), K the analytic
    prime-power kernel.  Real for real even phi and even kappa: by default
    the conjugate symmetry of the integrand is exploited (half-line, doubled
    real part); check_imag=True integrates the full line instead and verifies
    the imaginary residual below 1e-8 relative before discarding it.

    prime_limit truncates the kernel's Euler-product factor inside the
    quadrature; the corresponding envelope joins the reported trunc_error.
    """
    if R <= 1:
        raise DensityError("R must exceed 1")
    log_r = math.log(R)
    t_cut = min(t_max, max(8.0, phi.envelope_const * 1e8))

    def f_vec(ys: np.ndarray) -> np.ndarray:
        out = np.empty(ys.shape, dtype=np.complex128)
        for lo in range(0, ys.size, 512):  # chunked: the kernel builds big grids
            yc = ys[lo : lo + 512]
            ss = 4j * math.pi * yc / log_r
            kern = j_kappa_p_vec(kappa, p, ss, prime_limit)
            phis = np.array([phi.phi(float(y)) for y in yc])
            out[lo : lo + 512] = np.exp(-2j * math.pi * yc) * kern * phis
        return out

    width = min(0.5, 0.5 / max(1.0, phi.theta))
    if check_imag:
        quad = gl_panels(f_vec, -t_cut, t_cut, panel_width=width)
        if abs(quad.value.imag) > 1e-8 * max(1.0, abs(quad.value.real)):
            raise DensityError(f"imaginary residual {quad.value.imag} exceeds 1e-8")
        value, quad_err = quad.value.real, quad.error
    else:
        quad = gl_panels(f_vec, 0.0, t_cut, panel_width=width)
        value, quad_err = 2.0 * quad.value.real, 2.0 * quad.error
    # kernel grows ~ log|y| on the imaginary axis; fold into the tail estimate,
    # together with the Euler-factor truncation envelope
    tail = _phi_tail_estimate(phi, t_cut) * (math.log(4 * math.pi * t_cut / log_r) + 3.0)
    tail += a_factor_tail(1.0, prime_limit) * (abs(value) + 1.0)
    return TermValue(value, quad_err, tail)


# ---------------------------------------------------------------------------
# the special main term and its contour cross-check


def n_main(kappa: int, phi: TestFunction) -> complex:
    """Closed form (i^kappa / 2) [phi(0) - integral of phi_hat over [-1, 1]];
    zero whenever theta <= 1 (all the transform mass sits inside [-1, 1])."""
    inner = phi.integrate_phi_hat(-1.0, 1.0)
    return i_power(kappa) / 2.0 * (phi.phi(0.0) - inner)


def n_main_contour(
    kappa: int,
    phi: TestFunction,
    sigma: float = 1e-3,
    t_max: float = 4000.0,
) -> complex:
    """Contour quadrature of the same main term along Re(s) = sigma:

        (i^kappa e^(-2 pi sigma) / 2 pi) *
            integral over t of e^(-2 pi i t) phi(i sigma - t) / (sigma + i t).
    """
    if phi.phi_complex is None:
        raise DensityError("contour cross-check needs phi_complex")

    def f(t: float) -> complex:
        return (
            np.exp(-2j * math.pi * t)
            * phi.phi_complex(1j * sigma - t)
            / (sigma + 1j * t)
        )

    def f_vec(ts: np.ndarray) -> np.ndarray:
        vals = np.array([phi.phi_complex(1j * sigma - float(t)) for t in ts])
        return np.exp(-2j * math.pi * ts) * vals / (sigma + 1j * ts)

    # the 1/(sigma + i t) spike at t = 0 needs adaptive resolution at scale
    # sigma; the oscillatory wings go through fixed GL panels
    w = 2.0
    core = adaptive_simpson(f, -w, w, tol=1e-11, min_panels=32)
    wings = gl_panels(f_vec, w, t_max, panel_width=0.25).value
    wings += gl_panels(f_vec, -t_max, -w, panel_width=0.25).value
    total = core.value + wings
    return i_power(kappa) * math.exp(-2.0 * math.pi * sigma) / (2.0 * math.pi) * total


# ---------------------------------------------------------------------------
# prime-power sums against the Bessel kernel


def _prime_powers_below(x: float) -> list[tuple[int, int, float]]:
    """(m, prime, log prime) for prime powers m = l^e <= x."""
    ps = _primes_below(x)
    out = []
    for ell in ps:
        m = int(ell)
        logl = math.log(m)
        while m <= x:
            out.append((m, int(ell), logl))
            m *= int(ell)
    out.sort()
    return out


def q_sum(
    chi: DirichletCharacter,
    kappa: int,
    phi: TestFunction,
    R: float,
) -> SumValue:
    """Finite prime-power sum sum_m chi(m) Lambda(m) m^(-1/2)
    J_{kappa-1}(4 pi sqrt(m) / c) phi_hat(log m / log R), m <= R^theta."""
    c = chi.modulus
    log_r = math.log(R)
    x_max = R**phi.theta
    total = 0j
    count = 0
    for m, _ell, logl in _prime_powers_below(x_max):
        w = phi.phi_hat(math.log(m) / log_r)
        if w == 0.0:
            continue
        cv = chi(m)
        if cv == 0:
            continue
        total += cv * logl / math.sqrt(m) * bessel_j(kappa - 1, 4.0 * math.pi * math.sqrt(m) / c) * w
        count += 1
    return SumValue.of_sum(total, max(count, 1))


def q_main(c: int, kappa: int, phi: TestFunction, R: float, tol: float = 1e-9) -> TermValue:
    """Integral_0^inf x^(-1/2) J_{kappa-1}(4 pi sqrt(x)/c) phi_hat(log x/log R) dx,
    computed on the exact support x in [R^-theta, R^theta] via x = R^u."""
    log_r = math.log(R)

    def f(u: float) -> complex:
        x_half = R ** (u / 2.0)
        return x_half * log_r * bessel_j(kappa - 1, 4.0 * math.pi * x_half / c) * phi.phi_hat(u)

    quad = adaptive_simpson(f, -phi.theta, phi.theta, tol=tol, min_panels=8)
    return TermValue(quad.value.real, quad.error, 0.0)


# ---------------------------------------------------------------------------
# truncated trace-formula error sums


def _divisor_tail(threshold: float) -> float:
    """Bound on sum_{a > A} d(a) a^(-3/2) via partial summation."""
    a = max(1.0, threshold)
    return 3.0 * (math.log(a) + 3.0) / math.sqrt(a)


@dataclass(frozen=True)
class ETermResult:
    value: SumValue
    tail_bound: float
    pieces: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "tail_bound": self.tail_bound,
            "pieces": {k: v.to_json() for k, v in self.pieces.items()},
        }


def e_term_thin(
    m: int,
    kappa: int,
    chi: DirichletCharacter,
    truncation: int,
) -> ETermResult:
    """Truncated diagonal-error sum of the trace formula for the thin family:

        2 pi i^(-kappa) * sum over c = a q <= truncation of
            c^(-1) S_{chi-bar^2}(m, 1; c) J_{kappa-1}(4 pi sqrt(m) / c),

    with the tail past the truncation bounded via |S| <= c^(1/2) q^(1/2)
    (m,1,c)^(1/2) d(c) and |J_{kappa-1}(x)| <= x.
    """
    q = chi.modulus
    if conductor(chi**2) != q:
        raise DensityError("thin-mode character must have primitive square")
    chibar2 = (chi**2).conjugate()
    total = 0j
    err = 0.0
    count = 0
    for c in range(q, truncation + 1, q):
        s = _twisted_induced(chibar2, m, 1, c)
        jv = bessel_j(kappa - 1, 4.0 * math.pi * math.sqrt(m) / c)
        total += s.value * jv / c
        err += s.err_radius / c
        count += s.terms
    pref = 2.0 * math.pi * i_power(-kappa)
    value = SumValue(pref * total, 2.0 * math.pi * err, count)
    a_min = truncation / q
    tail = (
        2.0
        * math.pi
        * (4.0 * math.pi * math.sqrt(m) * divisor_count(q) / q)
        * _divisor_tail(a_min)
    )
    return ETermResult(value, tail)


def e_term_coset(
    m: int,
    kappa: int,
    coset: CharacterCoset,
    truncation: int,
) -> ETermResult:
    """Truncated non-diagonal sum for the coset family: the opposite-sign
    piece over moduli b*q with p coprime to b, plus the twisted piece over
    multiples of p^(j+k), both cut at the truncation."""
    p, k, j = coset.p, coset.k, coset.j
    q = coset.prime_power
    psi = coset.base
    eps = coset.epsilon
    if m % p == 0:
        raise DensityError("m must be coprime to p")

    # opposite-sign piece: b ranges over integers coprime to p, c = b*q
    total_b = 0j
    err_b = 0.0
    terms_b = 0
    b_max = truncation // q
    for b in range(1, b_max + 1):
        if b % p == 0:
            continue
        qbar = inverse_mod(q % b, b) if b > 1 else 0
        bbar = inverse_mod(b, q)
        s_b = kernels.kloosterman_direct(qbar * m % b, qbar, b) if b > 1 else 1.0
        km = salie_sum(psi, bbar * m % q, bbar, k, j, -1)
        jv = bessel_j(kappa - 1, 4.0 * math.pi * math.sqrt(m) / (b * q))
        total_b += s_b * km.value * jv / (b * q)
        err_b += km.err_radius / (b * q)
        terms_b += km.terms + totient(b)
    piece_b = SumValue(
        2.0 * math.pi * i_power(-kappa) * eps * psi(-m) * total_b,
        2.0 * math.pi * err_b,
        terms_b,
    )

    # twisted piece: c over multiples of p^(j+k)
    pjk = p ** (j + k)
    psibar2 = (psi**2).conjugate()
    total_c = 0j
    err_c = 0.0
    terms_c = 0
    for c in range(pjk, truncation + 1, pjk):
        s = _twisted_induced(psibar2, m, 1, c)
        jv = bessel_j(kappa - 1, 4.0 * math.pi * math.sqrt(m) / c)
        total_c += s.value * jv / c
        err_c += s.err_radius / c
        terms_c += s.terms
    piece_c = SumValue(
        2.0 * math.pi * i_power(-kappa) * psi(m) * total_c, 2.0 * math.pi * err_c, terms_c
    )

    tail_b = (
        2.0 * math.pi * (8.0 * math.pi * math.sqrt(m) * p ** (k - j) / q**2)
        * _divisor_tail(max(1.0, b_max))
    )
    tail_c = (
        2.0
        * math.pi
        * (4.0 * math.pi * math.sqrt(m) * math.sqrt(q) * (j + k + 1) / pjk)
        * _divisor_tail(max(1.0, truncation / pjk))
    )
    value = piece_b.plus(piece_c)
    return ETermResult(value, tail_b + tail_c, {"opposite_sign": piece_b, "twisted": piece_c})


# ---------------------------------------------------------------------------
# parameters and report assembly


@dataclass(frozen=True)
class DensityParams:
    """Level data and flags for a density report.

    Theorem 1 (thin family): q is the level parameter; eta_mode selects the
    quadratic (orthogonal leading term) or non-quadratic (unitary) shape, the
    latter requiring the actual character eta.  Theorem 2 (coset family):
    (p, k, j, epsilon) with q = p^k.
    """

    kappa: int
    q: int
    p: int | None = None
    k: int | None = None
    j: int | None = None
    epsilon: int | None = None
    eta_mode: str = "quadratic"
    eta: DirichletCharacter | None = None
    chi: DirichletCharacter | None = None
    truncation: int | None = None

    def __post_init__(self) -> None:
        if self.kappa < 2 or self.kappa % 2 != 0:
            raise DensityError("kappa must be an even integer >= 2")
        if self.q < 7:
            raise DensityError("q must be >= 7 so that R = (q/2pi)^2 > 1")
        if self.eta_mode not in ("quadratic", "non-quadratic"):
            raise DensityError(f"unknown eta_mode {self.eta_mode!r}")
        if self.p is not None:
            if self.k is None or self.j is None or self.epsilon is None:
                raise DensityError("coset parameters need p, k, j, epsilon")
            if not 1 <= self.j < self.k:
                raise DensityError("need 1 <= j < k")
            if self.p**self.k != self.q:
                raise DensityError("q must equal p^k")
            if self.epsilon not in (-1, 1):
                raise DensityError("epsilon must be +1 or -1")

    @property
    def R(self) -> float:
        return (self.q / (2.0 * math.pi)) ** 2

    @property
    def log_R(self) -> float:
        return 2.0 * math.log(self.q / (2.0 * math.pi))


@dataclass(frozen=True)
class DensityReport:
    theorem: int
    symmetry_type: str
    leading_term: TermValue
    hatphi_term: TermValue | None
    I_term: TermValue
    J_term: TermValue
    L_term: TermValue | None
    N_term: TermValue | None
    log_R: float
    support_limit: float
    params: dict
    truncations: dict

    def total(self) -> float:
        out = self.leading_term.value + self.I_term.value + self.J_term.value
        if self.hatphi_term is not None:
            out += self.hatphi_term.value
        if self.L_term is not None:
            out += self.L_term.value
        return out

    def to_json(self) -> dict:
        def term(t: TermValue | None):
            return None if t is None else t.to_json()

        return {
            "theorem": self.theorem,
            "symmetry_type": self.symmetry_type,
            "leading_term": term(self.leading_term),
            "hatphi_term": term(self.hatphi_term),
            "I_term": term(self.I_term),
            "J_term": term(self.J_term),
            "L_term": term(self.L_term),
            "N_term": term(self.N_term),
            "total_of_terms": self.total(),
            "log_R": self.log_R,
            "support_limit": self.support_limit,
            "params": self.params,
            "truncations": self.truncations,
        }


def assemble_report(
    theorem: int,
    params: DensityParams,
    phi: TestFunction,
    i_t_max: float = 1e4,
    l_t_max: float = 2000.0,
) -> DensityReport:
    """Assemble the leading and lower-order main terms for the stated theorem.

    Theorem 1 (quadratic mode):   W(O)   + (2/logR)[phi_hat(0) + I - J]
    Theorem 1 (non-quadratic):    W(U)   + (2/logR)[I - J_twisted(eta^2)]
    Theorem 2:                    W(G)   + (2/logR)[phi_hat(0) + I - J]
                                         - (2 i^kappa eps / logR) L
    with G = SO(even) when i^kappa eps = 1, SO(odd) when i^kappa eps = -1.
    The special main term N is reported as a diagnostic; its constant part is
    already folded into W(G).
    """
    R = params.R
    log_r = params.log_R
    scale = 2.0 / log_r

    if theorem == 1:
        quadratic = params.eta_mode == "quadratic"
        if not quadratic and params.eta is None:
            raise DensityError("non-quadratic mode needs the character eta")
        symmetry = "O" if quadratic else "U"
        support_limit = 1.0
        i_term = integral_I(params.kappa, phi, R, t_max=i_t_max)
        if quadratic:
            j_term = integral_J(params.q, phi, R)
            hatphi = TermValue(scale * phi.phi_hat(0.0))
        else:
            j_term = integral_J(params.q, phi, R, chi=params.eta**2)
            hatphi = None
        leading = TermValue(wg_functional(phi, symmetry))
        report = DensityReport(
            theorem=1,
            symmetry_type=symmetry,
            leading_term=leading,
            hatphi_term=hatphi,
            I_term=TermValue(scale * i_term.value, scale * i_term.quad_error, scale * i_term.trunc_error),
            J_term=TermValue(-scale * j_term.value, scale * j_term.quad_error, scale * j_term.trunc_error),
            L_term=None,
            N_term=None,
            log_R=log_r,
            support_limit=support_limit,
            params={"kappa": params.kappa, "q": params.q, "eta_mode": params.eta_mode,
                    "theta": phi.theta},
            truncations={"i_t_max": i_t_max},
        )
        return report

    if theorem != 2:
        raise DensityError("theorem must be 1 or 2")
    if params.p is None:
        raise DensityError("theorem 2 needs coset parameters (p, k, j, epsilon)")
    ik_eps = i_power(params.kappa).real * params.epsilon
    symmetry = "SO(even)" if ik_eps > 0 else "SO(odd)"
    support_limit = 1.0 + params.j / params.k
    i_term = integral_I(params.kappa, phi, R, t_max=i_t_max)
    j_term = integral_J(params.q, phi, R)
    l_term = integral_L(params.kappa, params.p, phi, R, t_max=l_t_max)
    n_value = n_main(params.kappa, phi)
    leading = TermValue(wg_functional(phi, symmetry))
    lscale = 2.0 * ik_eps / log_r
    return DensityReport(
        theorem=2,
        symmetry_type=symmetry,
        leading_term=leading,
        hatphi_term=TermValue(scale * phi.phi_hat(0.0)),
        I_term=TermValue(scale * i_term.value, scale * i_term.quad_error, scale * i_term.trunc_error),
        J_term=TermValue(-scale * j_term.value, scale * j_term.quad_error, scale * j_term.trunc_error),
        L_term=TermValue(-lscale * l_term.value, abs(lscale) * l_term.quad_error,
                         abs(lscale) * l_term.trunc_error),
        N_term=TermValue(n_value.real),
        log_R=log_r,
        support_limit=support_limit,
        params={"kappa": params.kappa, "p": params.p, "k": params.k, "j": params.j,
                "epsilon": params.epsilon, "theta": phi.theta},
        truncations={"i_t_max": i_t_max, "l_t_max": l_t_max},
    )


# ---------------------------------------------------------------------------
# nonvanishing arithmetic (closed forms at the optimization pair)


def ils_wg_closed_form(symmetry: str, theta: float) -> float:
    """Closed form of the group-density functional at the optimization pair:

        U -> 1/theta                 O        -> 1/theta + 1/2
        SO(even) -> 2/theta - 1/(2 theta^2)   (theta >= 1)
        SO(odd)  -> 1 + 1/(2 theta^2)         (theta >= 1)
    """
    if symmetry not in SYMMETRY_TYPES:
        raise DensityError(f"unknown symmetry type {symmetry!r}")
    if theta <= 0:
        raise DensityError("theta must be positive")
    if symmetry == "U":
        return 1.0 / theta
    if symmetry == "O":
        return 1.0 / theta + 0.5
    if theta < 1.0:
        raise DensityError("SO closed forms need theta >= 1")
    if symmetry == "SO(even)":
        return 2.0 / theta - 1.0 / (2.0 * theta * theta)
    return 1.0 + 1.0 / (2.0 * theta * theta)


def nonvanishing(symmetry: str, theta: float, mode: str) -> float:
    """Lower bound on the weighted nonvanishing proportion:

        even mode: 1 - (1/2) * functional
        odd mode:  3/2 - (1/2) * functional

    with the functional given by the optimization-pair closed forms.
    """
    if mode not in ("even", "odd"):
        raise DensityError(f"mode must be 'even' or 'odd', got {mode!r}")
    val = ils_wg_closed_form(symmetry, theta)
    return (1.0 if mode == "even" else 1.5) - 0.5 * val


# ---------------------------------------------------------------------------
# slow-convergence expansion constants (diagnostic only)


def r_expansion_constant(
    q: int, order: int, x_cut: float, phi_hat_free: bool = True
) -> tuple[float, float]:
    """(log x)^order-weighted tail constants of the Chebyshev deviation:

        integral over [1, X] of (log x)^order [theta_{chi_0}(x) - x] / x^2.

    These defining integrals converge slowly; the second member of the pair
    reports the change from X/2 to X as an explicit truncation diagnostic.
    """

    def upto(x_hi: float) -> float:
        ps = _primes_below(x_hi)
        total = 0.0
        # integral of (log x)^j / x^2 from a to b, via u = log x:
        # int u^j e^(-u) du = -e^(-u) sum_{i<=j} j!/i! u^i
        def anti(u: float) -> float:
            s = 0.0
            fact = math.factorial(order)
            for i in range(order + 1):
                s += fact / math.factorial(i) * u**i
            return -math.exp(-u) * s

        theta_val = 0.0
        prev = 1.0
        for ell in list(ps) + [int(x_hi) + 1]:
            hi = min(float(ell), x_hi)
            if hi > prev:
                total += theta_val * (anti(math.log(hi)) - anti(math.log(prev)))
            if float(ell) <= x_hi and q % int(ell) != 0:
                theta_val += math.log(ell)
            prev = hi
            if prev >= x_hi:
                break
        # subtract integral of (log x)^j / x from 1 to X
        total -= math.log(x_hi) ** (order + 1) / (order + 1)
        return total

    full = upto(x_cut)
    half = upto(x_cut / 2.0)
    return full, abs(full - half)
