"""Leading-order symbolic terms kappa * q^a * log^b(q) * loglog^c(q).

Every weight and summand the package cares about is, for large q, a positive
constant times a power of q, a power of log q, and a power of log log q.
Tracking that leading monomial exactly turns convergence of the block series
into a three-level Bertrand test:

  sum q^a log^b q loglog^c q   converges iff
    a < -1, or (a = -1 and b < -1), or (a = -1 and b = -1 and c < -1).

Products, powers, minima (asymptotic = lexicographic on (a, b, c)), and the
substitution r -> log(1/r) for log factors all stay inside the class, so the
classification is exact rather than a finite-block heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Monomial:
    """kappa * q^a * (log q)^b * (log log q)^c with kappa > 0."""

    coeff: float
    a: float
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not self.coeff > 0:
            raise ValueError("leading coefficients are positive by convention")

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(
            self.coeff * other.coeff,
            self.a + other.a,
            self.b + other.b,
            self.c + other.c,
        )

    def __pow__(self, e: float) -> "Monomial":
        return Monomial(self.coeff**e, self.a * e, self.b * e, self.c * e)

    def scaled(self, k: float) -> "Monomial":
        if not k > 0:
            raise ValueError("scale must be positive")
        return Monomial(self.coeff * k, self.a, self.b, self.c)

    @property
    def exponents(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def eval(self, q: float) -> float:
        lq = math.log(q)
        return self.coeff * q**self.a * lq**self.b * math.log(lq) ** self.c

    def describe(self) -> str:
        parts = [f"{self.coeff:g}"]
        if self.a:
            parts.append(f"q^{self.a:g}")
        if self.b:
            parts.append(f"log^{self.b:g}(q)")
        if self.c:
            parts.append(f"loglog^{self.c:g}(q)")
        return " * ".join(parts)


def asymptotic_min(terms: list[Monomial]) -> Monomial:
    """The term that is eventually smallest: lexicographic on (a, b, c).

    On exponent ties the smaller coefficient wins; the ratio of two tied
    monomials tends to the coefficient ratio, so the min is eventually a
    constant multiple of either and the smaller constant is the sharp one.
    """
    if not terms:
        raise ValueError("need at least one term")
    return min(terms, key=lambda t: (t.a, t.b, t.c, t.coeff))


def log_inverse_of(term: Monomial) -> Monomial:
    """Leading monomial of log(1/f(q)) when f has leading term `term`, f -> 0.

    For f ~ kappa q^a log^b q (a < 0, or a = 0 and b < 0):
      log(1/f) ~ -a log q       if a < 0
      log(1/f) ~ -b log log q   if a = 0, b < 0
    """
    if term.a < 0:
        return Monomial(-term.a, 0.0, 1.0, 0.0)
    if term.a == 0 and term.b < 0:
        return Monomial(-term.b, 0.0, 0.0, 1.0)
    raise ValueError("log(1/f) needs f -> 0, i.e. a < 0 or (a = 0, b < 0)")


def power_log_of(term: Monomial, s: float, p: float) -> Monomial:
    """Leading monomial of r^s log^p(1/r) at r = f(q) with leading term `term`."""
    base = term**s
    if p == 0:
        return base
    return base * (log_inverse_of(term) ** p)


@dataclass(frozen=True)
class SeriesClassification:
    converges: bool
    term: Monomial
    reason: str


def classify_series(term: Monomial) -> SeriesClassification:
    """Convergence of sum_q term(q) by the three-level Bertrand test."""
    a, b, c = term.a, term.b, term.c
    if a < -1:
        return SeriesClassification(True, term, f"q-exponent {a:g} < -1")
    if a > -1:
        return SeriesClassification(False, term, f"q-exponent {a:g} > -1")
    if b < -1:
        return SeriesClassification(True, term, f"q^-1 with log exponent {b:g} < -1")
    if b > -1:
        return SeriesClassification(False, term, f"q^-1 with log exponent {b:g} > -1")
    if c < -1:
        return SeriesClassification(
            True, term, f"q^-1 log^-1 with loglog exponent {c:g} < -1"
        )
    return SeriesClassification(
        False, term, f"q^-1 log^-1 with loglog exponent {c:g} >= -1"
    )
