"""Dirichlet characters modulo odd prime powers and odd composites.

A character mod N = prod p_i^{e_i} (all p_i odd) is stored per component as
an exponent index t_i against the smallest primitive root g_i of p_i^{e_i}:
chi(g_i^a) = e(t_i * a / phi(p_i^{e_i})).  Discrete-log tables are built
eagerly per modulus and memoized process-wide (build is lock-protected; all
evaluation afterwards is pure).

The (generator, index) labeling is an artifact convention; nothing downstream
depends on which labeling is used, only on the group structure.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ArithError, Factorization, factorize, inverse_mod, is_prime, totient, Residue
from .sumvalue import SumValue

DLOG_MODULUS_CAP = 10_000_000


class CharacterError(ValueError):
    """Invalid character construction or operation."""


# ---------------------------------------------------------------------------
# discrete-log tables per odd prime power


@lru_cache(maxsize=None)
def smallest_primitive_root(pe: int) -> int:
    """Smallest primitive root of the odd prime power pe (1 for pe = 2)."""
    if pe == 2:
        return 1  # (Z/2)^x is trivial
    fac = factorize(pe)
    if len(fac.pairs) != 1 or fac.pairs[0][0] == 2:
        raise CharacterError(f"{pe} is not an odd prime power")
    p, e = fac.pairs[0]
    phi = p ** (e - 1) * (p - 1)
    test_exps = [phi // ell for ell, _ in factorize(phi).pairs]
    g = 2
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, t, pe) != 1 for t in test_exps):
            return g
        g += 1


_dlog_lock = threading.Lock()
_dlog_tables: dict[int, np.ndarray] = {}


def dlog_table(pe: int) -> np.ndarray:
    """dlog[x] = a with g^a = x mod pe (g the smallest primitive root).

    Non-units carry -1.  Built once per modulus; modulus capped at 1e7.
    """
    with _dlog_lock:
        table = _dlog_tables.get(pe)
        if table is not None:
            return table
        if pe > DLOG_MODULUS_CAP:
            raise CharacterError(f"discrete-log table cap exceeded: {pe} > {DLOG_MODULUS_CAP}")
        if pe == 2:
            table = np.array([-1, 0], dtype=np.int64)
            _dlog_tables[pe] = table
            return table
        g = smallest_primitive_root(pe)
        phi = totient(pe)
        table = np.full(pe, -1, dtype=np.int64)
        x = 1
        for a in range(phi):
            table[x] = a
            x = x * g % pe
        _dlog_tables[pe] = table
        return table


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class CharacterComponent:
    """Character on (Z/p^e)^x: index t against the smallest primitive root.

    p = 2 is allowed only as the trivial component (e = 1, t = 0), so that
    moduli of the form 2N with N odd can carry the lifted character group.
    """

    p: int
    e: int
    t: int

    @property
    def prime_power(self) -> int:
        return self.p**self.e

    @property
    def unit_order(self) -> int:
        if self.p == 2:
            return 1
        return self.p ** (self.e - 1) * (self.p - 1)

    def conductor(self) -> int:
        """Smallest p^f through which this component factors."""
        if self.t == 0:
            return 1
        v = 0
        t = self.t
        while t % self.p == 0:
            t //= self.p
            v += 1
        return self.p ** (self.e - min(v, self.e - 1))


class DirichletCharacter:
    """A Dirichlet character on (Z/NZ)^x for odd N >= 1."""

    __slots__ = ("modulus", "components", "_phase_den", "_phase_mults")

    def __init__(self, modulus: int, components: tuple[CharacterComponent, ...]):
        if modulus % 4 == 0:
            raise CharacterError(f"modulus {modulus} divisible by 4 not supported")
        prod = 1
        for comp in components:
            if comp.p == 2 and (comp.e != 1 or comp.t != 0):
                raise CharacterError("the factor-2 component must be trivial")
            if not 0 <= comp.t < comp.unit_order:
                raise CharacterError("component index out of range")
            prod *= comp.prime_power
        if prod != modulus:
            raise CharacterError("components do not multiply to the modulus")
        self.modulus = modulus
        self.components = tuple(sorted(components, key=lambda comp: comp.p))
        # common phase denominator: chi(x) = e(num(x) / den)
        den = 1
        for comp in self.components:
            den = den * comp.unit_order // math.gcd(den, comp.unit_order)
        self._phase_den = den
        self._phase_mults = tuple(den // comp.unit_order for comp in self.components)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_indices(cls, modulus: int, indices: dict[int, int] | None = None) -> "DirichletCharacter":
        """Character mod odd N from {p: t} component indices (missing -> 0)."""
        indices = indices or {}
        comps = []
        for p, e in factorize(modulus).pairs:
            order = 1 if p == 2 else p ** (e - 1) * (p - 1)
            comps.append(CharacterComponent(p, e, indices.get(p, 0) % order))
        return cls(modulus, tuple(comps))

    @classmethod
    def principal(cls, modulus: int) -> "DirichletCharacter":
        return cls.from_indices(modulus)

    # -- evaluation ----------------------------------------------------------

    def phase_numerator(self, n: int) -> int | None:
        """num with chi(n) = e(num / phase_denominator); None off the units."""
        num = 0
        for comp, mult in zip(self.components, self._phase_mults):
            pe = comp.prime_power
            a = int(dlog_table(pe)[n % pe])
            if a < 0:
                return None
            num += comp.t * a * mult
        return num % self._phase_den

    @property
    def phase_denominator(self) -> int:
        return self._phase_den

    def __call__(self, n: int) -> complex:
        num = self.phase_numerator(n)
        if num is None:
            return 0j
        return complex(np.exp(2j * np.pi * num / self._phase_den))

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; zero off the units."""
        xs = np.asarray(xs, dtype=np.int64)
        num = np.zeros(xs.shape, dtype=np.int64)
        ok = np.ones(xs.shape, dtype=bool)
        for comp, mult in zip(self.components, self._phase_mults):
            pe = comp.prime_power
            a = dlog_table(pe)[xs % pe]
            ok &= a >= 0
            num += comp.t * np.where(a < 0, 0, a) * mult
        num %= self._phase_den
        out = np.exp(2j * np.pi * num / self._phase_den)
        out[~ok] = 0.0
        return out

    # -- structure -----------------------------------------------------------

    def is_principal(self) -> bool:
        return all(comp.t == 0 for comp in self.components)

    def parity(self) -> int:
        """chi(-1), exactly (+1 or -1)."""
        sign = 1
        for comp in self.components:
            # -1 = g^(phi/2), so chi_i(-1) = (-1)^t
            if comp.t % 2 == 1:
                sign = -sign
        return sign

    def order(self) -> int:
        out = 1
        for comp in self.components:
            o = comp.unit_order // math.gcd(comp.unit_order, comp.t) if comp.t else 1
            out = out * o // math.gcd(out, o)
        return out

    def conjugate(self) -> "DirichletCharacter":
        comps = tuple(
            CharacterComponent(c.p, c.e, (-c.t) % c.unit_order) for c in self.components
        )
        return DirichletCharacter(self.modulus, comps)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus == self.modulus:
            comps = tuple(
                CharacterComponent(a.p, a.e, (a.t + b.t) % a.unit_order)
                for a, b in zip(self.components, other.components)
            )
            return DirichletCharacter(self.modulus, comps)
        if math.gcd(self.modulus, other.modulus) == 1:
            return DirichletCharacter(
                self.modulus * other.modulus, self.components + other.components
            )
        raise CharacterError("can only multiply characters of equal or coprime moduli")

    def __pow__(self, k: int) -> "DirichletCharacter":
        comps = tuple(
            CharacterComponent(c.p, c.e, (c.t * k) % c.unit_order) for c in self.components
        )
        return DirichletCharacter(self.modulus, comps)

    def factor_mod(self, d: int) -> "DirichletCharacter":
        """The sub-product of components with prime power dividing d."""
        comps = tuple(c for c in self.components if d % c.prime_power == 0)
        prod = 1
        for c in comps:
            prod *= c.prime_power
        if prod != d:
            raise CharacterError(f"{d} is not a unitary divisor of {self.modulus}")
        return DirichletCharacter(d, comps)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.components == other.components
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.components))

    def __repr__(self) -> str:
        idx = ",".join(f"{c.p}^{c.e}:{c.t}" for c in self.components)
        return f"DirichletCharacter(mod {self.modulus}; {idx or 'principal'})"

    # -- serialization (CLI round-tripping) -----------------------------------

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "components": [{"p": c.p, "e": c.e, "t": c.t} for c in self.components],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DirichletCharacter":
        try:
            modulus = int(data["modulus"])
            comps = tuple(
                CharacterComponent(int(c["p"]), int(c["e"]), int(c["t"]))
                for c in data["components"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CharacterError(f"malformed character spec: {exc}") from exc
        return cls(modulus, comps)


def enumerate_group(modulus: int) -> list[DirichletCharacter]:
    """All phi(N) characters mod odd N, principal first."""
    if modulus % 2 == 0:
        raise CharacterError(f"even modulus {modulus} not supported")
    return _enumerate_allowing_two(modulus)


def _enumerate_allowing_two(modulus: int) -> list[DirichletCharacter]:
    """Character group for modulus N or 2N (N odd); the 2-part is trivial."""
    if modulus % 4 == 0:
        raise CharacterError(f"modulus {modulus} divisible by 4 not supported")
    fac = factorize(modulus)
    chars: list[DirichletCharacter] = []

    def build(i: int, comps: tuple[CharacterComponent, ...]) -> None:
        if i == len(fac.pairs):
            chars.append(DirichletCharacter(modulus, comps))
            return
        p, e = fac.pairs[i]
        order = 1 if p == 2 else p ** (e - 1) * (p - 1)
        for t in range(order):
            build(i + 1, comps + (CharacterComponent(p, e, t),))

    build(0, ())
    return chars


def conductor(chi: DirichletCharacter) -> int:
    """Smallest modulus through which chi factors (1 for principal)."""
    out = 1
    for comp in chi.components:
        out *= comp.conductor()
    return out


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi) == chi.modulus


@lru_cache(maxsize=65536)
def gauss_sum(chi: DirichletCharacter) -> SumValue:
    """tau(chi) = sum over x mod q of chi(x) e_q(x).  Memoized (characters
    are immutable and hashable; whole-group sweeps reuse every value)."""
    q = chi.modulus
    xs = np.arange(q, dtype=np.int64)
    vals = chi.values(xs)
    phases = np.exp(2j * np.pi * xs / q)
    return SumValue.of_sum(complex(np.dot(vals, phases)), q)


# ---------------------------------------------------------------------------
# character cosets mod p^k


@dataclass(frozen=True)
class CharacterCoset:
    """The coset psi * (characters of conductor dividing p^j), inside mod p^k.

    Constructible only when psi^2 is primitive mod p^k, which forces every
    member to have conductor p^k.  epsilon is the parity sign used by the
    projector [1 + epsilon*chi(-1)].
    """

    base: DirichletCharacter
    subgroup_exponent: int  # j
    epsilon: int

    def __post_init__(self) -> None:
        comps = self.base.components
        if len(comps) != 1:
            raise CharacterError("coset base must live mod a single odd prime power")
        p, k = comps[0].p, comps[0].e
        j = self.subgroup_exponent
        if not 1 <= j < k:
            raise CharacterError(f"need 1 <= j < k, got j={j}, k={k}")
        if self.epsilon not in (-1, 1):
            raise CharacterError("epsilon must be +1 or -1")
        if conductor(self.base**2) != p**k:
            raise CharacterError("base character must have primitive square")

    @property
    def p(self) -> int:
        return self.base.components[0].p

    @property
    def k(self) -> int:
        return self.base.components[0].e

    @property
    def j(self) -> int:
        return self.subgroup_exponent

    @property
    def prime_power(self) -> int:
        return self.p**self.k

    def subgroup_size(self) -> int:
        return totient(self.p**self.j)

    def member_indices(self) -> list[int]:
        """Exponent indices t of all members psi * xi, xi of conductor <= p^j."""
        comp = self.base.components[0]
        phi = comp.unit_order
        step = self.p ** (self.k - self.j)  # index of the annihilator subgroup
        return [(comp.t + s * step) % phi for s in range(self.subgroup_size())]

    def members(self, parity_filter: int | None = None) -> list[DirichletCharacter]:
        out = []
        for t in self.member_indices():
            chi = DirichletCharacter(
                self.prime_power, (CharacterComponent(self.p, self.k, t),)
            )
            if parity_filter is None or chi.parity() == parity_filter:
                out.append(chi)
        return out


def coset_enumerate(
    coset: CharacterCoset, parity_filter: int | None = None
) -> list[DirichletCharacter]:
    """The phi(p^j) coset members (optionally filtered by chi(-1))."""
    return coset.members(parity_filter)


def characters_with_primitive_square(p: int, k: int) -> list[DirichletCharacter]:
    """All psi mod p^k with psi^2 primitive, in index order."""
    if not is_prime(p) or p == 2:
        raise CharacterError(f"{p} must be an odd prime")
    pe = p**k
    out = []
    for chi in enumerate_group(pe):
        if conductor(chi**2) == pe:
            out.append(chi)
    return out


# ---------------------------------------------------------------------------
# additive parameters on 1 + p^m Z


def postnikov_ell(chi: DirichletCharacter) -> Residue:
    """The additive residue expressing chi-bar on the subgroup 1 + p^ceil(e/2) Z.

    For modulus p^e with p odd and e >= 2, returns ell mod p^m where
    m = e/2 (e even) or (e+1)/2 (e odd), such that for all z:

        e even:  chi-bar(1 + z*p^(e/2))     = e(ell*z / p^(e/2))
        e odd:   chi-bar(1 + z*p^((e-1)/2)) = e(ell*z / p^((e+1)/2)
                                                + (p-1)*ell*z^2 / (2p))

    The candidate is solved exactly from the character's exponent index and
    then verified exhaustively over all z; failure to verify is a hard error.
    For e = 1 the residue is defined as 0 (the subgroup is trivial).
    """
    comps = chi.components
    if len(comps) != 1 or comps[0].p == 2:
        raise CharacterError("postnikov_ell needs a character mod an odd prime power")
    p, e, t = comps[0].p, comps[0].e, comps[0].t
    if e == 1:
        return Residue(0, 1)
    pe = p**e
    phi = comps[0].unit_order
    m = (e + 1) // 2
    pm = p**m
    table = dlog_table(pe)

    if e % 2 == 0:
        # chi-bar(1 + p^m) = e(-t*a/phi) with a = dlog(1+p^m); match e(ell/p^m)
        a = int(table[(1 + pm) % pe])
        # -t*a/phi = ell/p^m (mod 1)  =>  ell = -t*a*p^m/phi mod p^m
        num = (-t * a) % phi
        if (num * pm) % phi != 0:
            raise CharacterError("no additive parameter: value is not a p^m-th root of unity")
        ell = (num * pm // phi) % pm
    else:
        # z = 1: chi-bar(1 + p^(m-1)) = e(ell * w / p^m), w = 1 + ((p-1)/2) p^(m-1)
        a = int(table[(1 + p ** (m - 1)) % pe])
        num = (-t * a) % phi
        if (num * pm) % phi != 0:
            raise CharacterError("no additive parameter: value is not a p^m-th root of unity")
        rhs = (num * pm // phi) % pm
        w = (1 + (p - 1) // 2 * p ** (m - 1)) % pm
        ell = rhs * inverse_mod(w, pm) % pm

    _verify_postnikov(p, e, t, ell)
    return Residue(ell, pm)


def _verify_postnikov(p: int, e: int, t: int, ell: int) -> None:
    pe = p**e
    phi = p ** (e - 1) * (p - 1)
    m = (e + 1) // 2
    pm = p**m
    table = dlog_table(pe)
    base = p ** (e - m) if e % 2 == 0 else p ** (m - 1)
    for z in range(pm):
        a = int(table[(1 + z * base) % pe])
        lhs = (-t * a) % phi  # chi-bar(1+z*base) = e(lhs/phi)
        if e % 2 == 0:
            rhs_num, rhs_den = ell * z, pm
        else:
            # ell*z/p^m + (p-1)*ell*z^2/(2p), over denominator p^m
            rhs_num = ell * z + (p - 1) // 2 * ell * z * z * p ** (m - 1)
            rhs_den = pm
        # compare e(lhs/phi) with e(rhs_num/rhs_den) exactly
        if (lhs * rhs_den - rhs_num * phi) % (phi * rhs_den) != 0:
            raise CharacterError(
                f"additive parameter verification failed at p={p}, e={e}, t={t}, z={z}"
            )
