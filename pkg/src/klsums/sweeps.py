"""Verification sweep suites.

Each suite cross-checks a structural identity or bound against a literal
oracle over a seeded parameter grid and returns a report dict:

    {sweep_id, suite, spec, tuples_tested, failures, max_deviation, entries}

Entries are listed for every tuple in canonical order; exit semantics are
decided by the caller from ``failures``.  Per-cell RNG streams are derived
from (seed, cell key) with crc32, so a sharded run produces byte-identical
reports to a serial one.
"""

from __future__ import annotations

import math
import zlib
from multiprocessing import get_context
from typing import Iterable

import numpy as np

from .arith import moebius, totient
from .bounds import avg_weil_sweep, flrt_bound, weil_bound
from .characters import (
    CharacterCoset,
    DirichletCharacter,
    characters_with_primitive_square,
    conductor,
    enumerate_group,
    gauss_sum,
)
from .density import (
    ils_wg_closed_form,
    integral_J,
    n_main,
    n_main_contour,
    nonvanishing,
    s_diagonal,
    wg_functional,
)
from .expsums import (
    CosetSumParams,
    coset_rows,
    coset_sigma,
    coset_sigma_from_rows,
    kloosterman_fourier,
    sigma_hat,
    sigma_hat_inversion,
    twisted_kloosterman,
)
from . import kernels
from .report import SweepSpec
from .specfun import digamma, j_kappa_p, xi_function, zeta_em
from .sumvalue import SumValue
from .testfun import ils_pair

SUITES = (
    "coset-structure",
    "coset-fourier",
    "kloosterman-fourier",
    "weil-flrt",
    "weil-avg",
    "density-identities",
)


class SweepError(ValueError):
    """Infeasible sweep parameters."""


def _cell_rng(seed: int, key: tuple) -> np.random.Generator:
    material = f"{seed}|{key}".encode()
    return np.random.default_rng(zlib.crc32(material))


def _report(suite: str, spec: SweepSpec, entries: list[dict]) -> dict:
    failures = [e for e in entries if not e["pass"]]
    max_dev = max((e.get("deviation", 0.0) for e in entries), default=0.0)
    return {
        "sweep_id": f"{suite}-seed{spec.seed}",
        "suite": suite,
        "spec": spec.to_json(),
        "tuples_tested": len(entries),
        "failures": failures,
        "max_deviation": max_dev,
        "entries": entries,
    }


# ---------------------------------------------------------------------------
# coset-structure: literal double sum vs structural dispatch


def _coset_structure_cell(args: tuple) -> list[dict]:
    (seed, p, k, j, psi_t, b_list, mn_max, mn_samples, tol_scale) = args
    q = p**k
    psi = DirichletCharacter.from_indices(q, {p: psi_t})
    base_coset = CharacterCoset(psi, j, +1)
    phi_pj = totient(p**j)
    coprime = [x for x in range(1, mn_max + 1) if x % p != 0]
    entries = []
    for b in b_list:
        if b % p == 0:
            continue  # the coset-sum hypotheses need p coprime to b
        for r in range(k, 2 * k + 2):
            c = b * p**r
            rng = _cell_rng(seed, (p, k, j, psi_t, b, r))
            cache = coset_rows(base_coset, c)
            for idx in range(mn_samples):
                m = int(rng.choice(coprime))
                n = int(rng.choice(coprime))
                eps = 1 if idx % 2 == 0 else -1
                coset = CharacterCoset(psi, j, eps)
                params = CosetSumParams(coset, m, n, c)
                literal = coset_sigma_from_rows(cache, m, n, eps)
                structural = coset_sigma(params, method="structural")
                tol = tol_scale * 1e-6 * phi_pj * c
                dev = abs(literal.value - structural.value)
                regime = (
                    "split" if r == k
                    else "vanishing" if r < j + k
                    else "twisted" if r < 2 * k
                    else "plain"
                )
                entries.append(
                    {
                        "p": p, "k": k, "j": j, "psi_index": psi_t, "b": b, "r": r,
                        "m": m, "n": n, "epsilon": eps, "regime": regime,
                        "deviation": dev, "tolerance": tol, "pass": dev <= tol,
                    }
                )
    return entries


def run_coset_structure(spec: SweepSpec) -> dict:
    p_list = spec.params.get("p_list", [3, 5])
    k_list = spec.params.get("k_list", [2, 3])
    j_list = spec.params.get("j_list")  # default: all 1 <= j < k
    b_list = spec.params.get("b_list", [1, 2, 4, 5, 7])
    mn_max = spec.params.get("mn_max", 20)
    psi_samples = spec.params.get("psi_samples", 20)
    mn_samples = spec.params.get("mn_samples", 3)
    if not p_list or not k_list or not b_list or mn_samples < 1:
        raise SweepError("empty parameter range")

    cells = []
    for p in sorted(p_list):
        for k in sorted(k_list):
            js = j_list if j_list else list(range(1, k))
            for j in sorted(js):
                if not 1 <= j < k:
                    raise SweepError(f"infeasible j={j} for k={k}")
                psis = characters_with_primitive_square(p, k)
                rng = _cell_rng(spec.seed, (p, k, j))
                take = min(psi_samples, len(psis))
                chosen = sorted(
                    int(i) for i in rng.choice(len(psis), size=take, replace=False)
                )
                for i in chosen:
                    psi_t = psis[i].components[0].t
                    cells.append(
                        (spec.seed, p, k, j, psi_t, tuple(sorted(b_list)),
                         mn_max, mn_samples, spec.tolerance_scale)
                    )

    entries: list[dict] = []
    if spec.jobs > 1:
        with get_context("fork").Pool(spec.jobs) as pool:
            for chunk in pool.map(_coset_structure_cell, cells):
                entries.extend(chunk)
    else:
        for cell in cells:
            entries.extend(_coset_structure_cell(cell))
    entries.sort(key=lambda e: (e["p"], e["k"], e["j"], e["psi_index"], e["b"], e["r"],
                                e["m"], e["n"], e["epsilon"]))
    return _report("coset-structure", spec, entries)


# ---------------------------------------------------------------------------
# kloosterman-fourier: series decomposition vs direct twisted sum


def run_kloosterman_fourier(spec: SweepSpec) -> dict:
    c_list = spec.params.get("c_list", [9, 27, 25, 125])
    m_max = spec.params.get("m_max", 30)
    if not c_list or m_max < 1:
        raise SweepError("empty parameter range")
    entries = []
    for c in sorted(c_list):
        chars = enumerate_group(c)
        tau = [gauss_sum(ch) for ch in chars]
        phi_c = totient(c)
        # index lookup for products chi*psi
        index = {ch: i for i, ch in enumerate(chars)}
        for ci, chi in enumerate(chars):
            for m in range(1, m_max + 1):
                if math.gcd(m, c) != 1:
                    continue
                total = 0j
                for pi, psi in enumerate(chars):
                    total += np.conj(psi(m)) * tau[pi].value * tau[index[chi * psi]].value
                fourier = total / phi_c
                direct = twisted_kloosterman(chi, m, 1, c)
                dev = abs(fourier - direct.value)
                tol = spec.tolerance_scale * 1e-6 * c
                entries.append(
                    {"c": c, "chi_index": ci, "m": m,
                     "deviation": dev, "tolerance": tol, "pass": dev <= tol}
                )
    return _report("kloosterman-fourier", spec, entries)


# ---------------------------------------------------------------------------
# coset-fourier: principal coefficient and inversion at r = k


def run_coset_fourier(spec: SweepSpec) -> dict:
    p = spec.params.get("p", 3)
    k_list = spec.params.get("k_list", [2, 3])
    j = spec.params.get("j", 1)
    b_list = spec.params.get("b_list", [1, 2, 5])
    psi_samples = spec.params.get("psi_samples", 6)
    m_samples = spec.params.get("m_samples", 6)
    entries = []
    for k in sorted(k_list):
        if not 1 <= j < k:
            raise SweepError(f"infeasible j={j} for k={k}")
        q = p**k
        psis = characters_with_primitive_square(p, k)
        rng = _cell_rng(spec.seed, ("coset-fourier", p, k, j))
        take = min(psi_samples, len(psis))
        chosen = sorted(int(i) for i in rng.choice(len(psis), size=take, replace=False))
        for i in chosen:
            psi = psis[i]
            psi_t = psi.components[0].t
            for b in sorted(b_list):
                if b % p == 0:
                    continue
                scale = b * p ** (j + k)
                tol = spec.tolerance_scale * 1e-6 * scale
                # principal coefficient is exact: mu(b)^2 phi(p^(j+k))
                sh = sigma_hat(psi, j, DirichletCharacter.principal(b * q))
                expect = moebius(b) ** 2 * totient(p ** (j + k))
                dev = abs(sh.value - expect)
                entries.append(
                    {"check": "principal", "p": p, "k": k, "j": j, "psi_index": psi_t,
                     "b": b, "m": 0, "epsilon": 0,
                     "deviation": dev, "tolerance": tol, "pass": dev <= tol}
                )
                # inversion reproduces the literal sum at r = k
                coprime = [x for x in range(1, 30) if math.gcd(x, b * p) == 1]
                ms = sorted(int(rng.choice(coprime)) for _ in range(m_samples))
                for eps in (1, -1):
                    coset = CharacterCoset(psi, j, eps)
                    for m in ms:
                        inv = sigma_hat_inversion(coset, m, b)
                        lit = coset_sigma(CosetSumParams(coset, m, 1, b * q), "literal")
                        dev = abs(inv.value - lit.value)
                        entries.append(
                            {"check": "inversion", "p": p, "k": k, "j": j,
                             "psi_index": psi_t, "b": b, "m": m, "epsilon": eps,
                             "deviation": dev, "tolerance": tol, "pass": dev <= tol}
                        )
    entries.sort(key=lambda e: (e["check"], e["k"], e["psi_index"], e["b"], e["epsilon"], e["m"]))
    return _report("coset-fourier", spec, entries)


# ---------------------------------------------------------------------------
# weil-flrt: pointwise envelope never violated


def run_weil_flrt(spec: SweepSpec) -> dict:
    c_list = spec.params.get("c_list", [27, 81, 125, 225])
    mn_max = spec.params.get("mn_max", 30)
    entries = []
    for c in sorted(c_list):
        chars = enumerate_group(c)
        units, _ = kernels.units_and_inverses(c)
        rows = np.stack([np.conj(ch.values(units)) for ch in chars])
        bounds_cache: list[dict[tuple[int, int], float]] = [dict() for _ in chars]
        worst = 0.0
        worst_tuple = None
        violations = 0
        for m in range(1, mn_max + 1):
            for n in range(1, mn_max + 1):
                sums = np.abs(kernels.weighted_kloosterman_many(m, n, c, rows))
                for ci, chi in enumerate(chars):
                    bound = flrt_bound(chi, m, n)
                    ratio = float(sums[ci]) / bound
                    if ratio > worst:
                        worst, worst_tuple = ratio, (ci, m, n)
                    if float(sums[ci]) > bound + 1e-7 * c:
                        violations += 1
        entries.append(
            {"c": c, "characters": len(chars), "pairs": mn_max * mn_max,
             "max_ratio": worst, "worst_tuple": list(worst_tuple),
             "violations": violations, "deviation": worst,
             "tolerance": 1.0, "pass": violations == 0}
        )
    return _report("weil-flrt", spec, entries)


# ---------------------------------------------------------------------------
# weil-avg: on-average ratios admit one sweep-wide constant


def run_weil_avg(spec: SweepSpec) -> dict:
    c_list = spec.params.get("c_list", [27, 125, 343])
    ab_list = spec.params.get("ab_list", [(1, 100), (50, 200)])
    eps0 = spec.params.get("eps0", 0.1)
    entries = []
    constant = 0.0
    for c in sorted(c_list):
        for A, B in ab_list:
            if not 1 <= A <= B:
                raise SweepError(f"infeasible window ({A}, {B})")
            results = avg_weil_sweep(c, A, B, eps0)
            ratios = [r.ratio for _, r in results]
            constant = max(constant, max(ratios))
            entries.append(
                {"c": c, "A": A, "B": B, "eps0": eps0,
                 "characters": len(results), "max_ratio": max(ratios),
                 "mean_ratio": float(np.mean(ratios)),
                 "deviation": max(ratios), "tolerance": float("inf"),
                 "pass": all(math.isfinite(r) for r in ratios)}
            )
    report = _report("weil-avg", spec, entries)
    report["constant_estimate"] = constant
    return report


# ---------------------------------------------------------------------------
# density-identities: closed forms and cross-checks


def run_density_identities(spec: SweepSpec) -> dict:
    entries = []

    def check(name: str, dev: float, tol: float, **extra) -> None:
        entries.append({"check": name, "deviation": float(dev), "tolerance": tol,
                        "pass": dev <= tol, **extra})

    # group functionals at the optimization pair
    for theta in (1.0, 1.5, 2.0):
        phi = ils_pair(theta)
        for G in ("U", "O", "SO(even)", "SO(odd)"):
            dev = abs(wg_functional(phi, G) - ils_wg_closed_form(G, theta))
            check("wg-closed-form", dev, 1e-10, theta=theta, symmetry=G)

    # nonvanishing values at theta = 2
    check("nonvanishing-even", abs(nonvanishing("SO(even)", 2.0, "even") - 9 / 16), 1e-12)
    check("nonvanishing-odd", abs(nonvanishing("SO(odd)", 2.0, "odd") - 15 / 16), 1e-12)

    # algebraic identity across the support grid
    worst = 0.0
    for theta in np.linspace(1.0, 2.0, 41):
        lhs = 1.0 - 0.5 * (2.0 / theta - 1.0 / (2.0 * theta * theta))
        rhs = (1.0 - 1.0 / (2.0 * theta)) ** 2
        worst = max(worst, abs(lhs - rhs))
    check("even-bound-identity", worst, 1e-12)

    # special main term: closed form vs contour quadrature
    for theta in (1.0, 1.5, 2.0):
        phi = ils_pair(theta)
        closed = n_main(2, phi)
        contour = n_main_contour(2, phi, sigma=1e-3)
        check("n-main-contour", abs(closed - contour), 1e-4, theta=theta)
    check("n-main-zero-below-1", abs(n_main(2, ils_pair(0.9))), 1e-10)

    # diagonal identity at desk scale
    for q in (7, 11):
        phi = ils_pair(0.8)
        R = (q / (2 * math.pi)) ** 2
        eta = DirichletCharacter.from_indices(q, {q: (q - 1) // 2})
        lhs = s_diagonal(phi, R, eta)
        rhs = phi.phi(0.0) * math.log(R) / 4.0 + phi.phi_hat(0.0) - integral_J(q, phi, R).value
        check("diagonal-quadratic", abs(lhs - rhs), 1e-8, q=q)
        eta_nq = DirichletCharacter.from_indices(q, {q: 1})
        lhs = s_diagonal(phi, R, eta_nq)
        rhs = -integral_J(q, phi, R, chi=eta_nq**2).value
        check("diagonal-nonquadratic", abs(lhs - rhs), 1e-8, q=q)

    # special-function spot checks
    dev = abs(digamma(3.5) - (digamma(2.5) + 1 / 2.5))
    check("digamma-recurrence", dev, 1e-10)
    z = 0.3
    dev = abs((digamma(1 - z) - digamma(z)) - math.pi / math.tan(math.pi * z))
    check("digamma-reflection", dev, 1e-10)
    for kappa in (2, 4):
        for p in (3, 5):
            dev = abs(j_kappa_p(kappa, p, 1e-4) - j_kappa_p(kappa, p, -1e-4))
            check("prime-kernel-continuity", dev, 1e-4, kappa=kappa, p=p)

    return _report("density-identities", spec, entries)


RUNNERS = {
    "coset-structure": run_coset_structure,
    "coset-fourier": run_coset_fourier,
    "kloosterman-fourier": run_kloosterman_fourier,
    "weil-flrt": run_weil_flrt,
    "weil-avg": run_weil_avg,
    "density-identities": run_density_identities,
}


def run_suite(spec: SweepSpec) -> dict:
    if spec.suite not in RUNNERS:
        raise KeyError(spec.suite)
    return RUNNERS[spec.suite](spec)
