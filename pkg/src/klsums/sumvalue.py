"""Complex sum values carrying an a-priori absolute error radius."""

from __future__ import annotations

from dataclasses import dataclass

#: per-term double-precision phase accumulation allowance
TERM_EPS = 1e-12


@dataclass(frozen=True)
class SumValue:
    """A complex double plus an a-priori absolute error radius.

    ``err_radius`` defaults to TERM_EPS times the number of summed terms;
    equality testing uses |a - b| <= err_a + err_b + tol.
    """

    value: complex
    err_radius: float
    terms: int = 0

    @classmethod
    def of_sum(cls, value: complex, terms: int) -> "SumValue":
        return cls(complex(value), TERM_EPS * max(1, terms), terms)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __abs__(self) -> float:
        return abs(self.value)

    def close_to(self, other: "SumValue | complex", tol: float = 0.0) -> bool:
        if isinstance(other, SumValue):
            return abs(self.value - other.value) <= self.err_radius + other.err_radius + tol
        return abs(self.value - complex(other)) <= self.err_radius + tol

    def scaled(self, factor: complex) -> "SumValue":
        return SumValue(self.value * factor, self.err_radius * abs(factor), self.terms)

    def plus(self, other: "SumValue") -> "SumValue":
        return SumValue(
            self.value + other.value,
            self.err_radius + other.err_radius,
            self.terms + other.terms,
        )

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "err_radius": self.err_radius,
            "terms": self.terms,
        }


def default_tolerance(terms: int) -> float:
    """Comparison tolerance between independently computed sums."""
    return 1e-6 * max(1, terms)
