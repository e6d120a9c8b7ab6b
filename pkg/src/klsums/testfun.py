"""Even Schwartz test-function pairs (phi, phi-hat) with compactly supported
transform, given analytically together with derivative access."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import adaptive_simpson


class TestFunctionError(ValueError):
    """Invariant violation in a test-function pair."""


@dataclass(frozen=True)
class TestFunction:
    """An even test function phi with Fourier transform phi_hat supported in
    [-theta, theta]; phi_hat_deriv(n, y) gives the n-th derivative (n <= 2).

    phi_complex, when provided, evaluates the analytic continuation of phi
    (needed by the contour cross-check of the special main term).
    """

    phi: Callable[[float], float]
    phi_hat: Callable[[float], float]
    theta: float
    phi_hat_deriv: Callable[[int, float], float]
    phi_complex: Callable[[complex], complex] | None = None
    label: str = ""
    #: |phi(x)| <= envelope_const / x^2 for large |x| (tail estimates)
    envelope_const: float = field(default=1.0)

    def check_invariants(self, samples: int = 41, tol: float = 1e-8) -> None:
        """Evenness and support checks at sample points; phi(0) = integral of
        phi_hat by quadrature."""
        for x in np.linspace(0.1, 3 * self.theta + 1, samples):
            if abs(self.phi(x) - self.phi(-x)) > tol:
                raise TestFunctionError(f"phi not even at x = {x}")
            if abs(self.phi_hat(x) - self.phat_even(x)) > tol:
                raise TestFunctionError(f"phi_hat not even at y = {x}")
        for y in np.linspace(self.theta * 1.01, self.theta * 2 + 1, samples):
            if abs(self.phi_hat(y)) > 1e-12:
                raise TestFunctionError(f"phi_hat not supported in [-theta, theta] at {y}")
        total = self.integrate_phi_hat(-self.theta, self.theta)
        if abs(total - self.phi(0)) > 1e-7 * max(1.0, abs(self.phi(0))):
            raise TestFunctionError(
                f"phi(0) = {self.phi(0)} != integral of phi_hat = {total}"
            )

    def phat_even(self, y: float) -> float:
        return self.phi_hat(-y)

    def integrate_phi_hat(self, a: float, b: float, tol: float = 1e-11) -> float:
        """Quadrature of phi_hat over [a, b] (kinks at 0, +-theta split off)."""
        a = max(a, -self.theta)
        b = min(b, self.theta)
        if b <= a:
            return 0.0
        knots = sorted({a, b, *(k for k in (-self.theta, 0.0, self.theta) if a < k < b)})
        total = 0.0
        for left, right in zip(knots[:-1], knots[1:]):
            total += adaptive_simpson(
                lambda y: self.phi_hat(y), left, right, tol=tol, min_panels=4
            ).value.real
        return total


def ils_pair(theta: float) -> TestFunction:
    """The classical optimization pair:

        phi(x)    = (sin(pi theta x) / (pi theta x))^2
        phi_hat(y) = (1/theta) (1 - |y|/theta)  for |y| <= theta, else 0.

    phi(0) = 1 and the integral of phi_hat is 1.  phi_hat has a kink at 0 and
    at +-theta; phi_hat_deriv returns the symmetric convention 0 at y = 0.
    """
    if theta <= 0:
        raise TestFunctionError("theta must be positive")

    pt = math.pi * theta

    def phi(x: float) -> float:
        w = pt * x
        if abs(w) < 1e-6:
            return 1.0 - w * w / 3.0
        s = math.sin(w) / w
        return s * s

    def phi_hat(y: float) -> float:
        a = abs(y)
        if a > theta:
            return 0.0
        return (1.0 - a / theta) / theta

    def phi_hat_deriv(n: int, y: float) -> float:
        if n == 0:
            return phi_hat(y)
        if n == 1:
            if abs(y) >= theta or y == 0.0:
                return 0.0
            return -math.copysign(1.0, y) / (theta * theta)
        if n == 2:
            return 0.0
        raise TestFunctionError("derivatives available for n <= 2 only")

    def phi_complex(z: complex) -> complex:
        w = pt * z
        if abs(w) < 1e-6:
            return 1.0 - w * w / 3.0
        s = cmath.sin(w) / w
        return s * s

    return TestFunction(
        phi=phi,
        phi_hat=phi_hat,
        theta=theta,
        phi_hat_deriv=phi_hat_deriv,
        phi_complex=phi_complex,
        label=f"ils(theta={theta})",
        envelope_const=1.0 / (pt * pt),
    )


def gaussian_pair(theta: float = 4.0) -> TestFunction:
    """Self-dual Gaussian pair phi(x) = phi_hat(x) = exp(-pi x^2).

    The transform is only numerically supported in [-theta, theta]
    (|phi_hat| < 1e-21 beyond theta = 4); used where the smoothness of
    phi_hat matters (asymptotic-expansion checks).
    """

    def phi(x: float) -> float:
        return math.exp(-math.pi * x * x)

    def phi_hat_deriv(n: int, y: float) -> float:
        g = math.exp(-math.pi * y * y)
        if n == 0:
            return g
        if n == 1:
            return -2.0 * math.pi * y * g
        if n == 2:
            return (4.0 * math.pi**2 * y * y - 2.0 * math.pi) * g
        raise TestFunctionError("derivatives available for n <= 2 only")

    def phi_complex(z: complex) -> complex:
        return cmath.exp(-math.pi * z * z)

    return TestFunction(
        phi=phi,
        phi_hat=phi,
        theta=theta,
        phi_hat_deriv=phi_hat_deriv,
        phi_complex=phi_complex,
        label=f"gaussian(theta={theta})",
        envelope_const=1.0,
    )
