"""Number policy: exact rationals or high-precision floats.

Hofbauer vertex endpoints are forward images of breakpoints, so rational
parameters are kept exact to avoid spurious vertex duplication.  Irrational
parameters (golden mean, cubic roots) are realized as mpmath floats and all
comparisons go through the policy tolerance.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath

DEFAULT_PREC = int(os.environ.get("HOFBAUER_PREC_BITS", "128"))
DEFAULT_TOL = 1e-24

mpmath.mp.prec = max(mpmath.mp.prec, DEFAULT_PREC)

Scalar = Union[Fraction, mpmath.mpf]


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class CapExceeded(RuntimeError):
    """A configured resource cap (depth, length, trials, vertices) was hit."""


@dataclass(frozen=True)
class NumberPolicy:
    mode: str = "exact"
    prec: int = DEFAULT_PREC
    tol: float = 0.0

    def __post_init__(self):
        if self.mode not in ("exact", "approx"):
            raise ValueError(f"unknown number mode {self.mode!r}")
        if self.mode == "approx" and not self.tol > 0:
            raise ValueError("approx mode needs a positive tolerance")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def convert(self, value) -> Scalar:
        if self.exact:
            if isinstance(value, mpmath.mpf):
                raise DomainError("cannot place an mpf value in an exact map")
            return Fraction(value)
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        if isinstance(value, float):
            # read floats as the decimal they print as, so 1.8 means 18/10
            return mpmath.mpf(repr(value))
        return mpmath.mpf(value)

    # comparisons ---------------------------------------------------------
    def eq(self, a, b) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.tol

    def lt(self, a, b) -> bool:
        """Strictly less, beyond tolerance."""
        if self.exact:
            return a < b
        return b - a > self.tol

    def le(self, a, b) -> bool:
        return not self.lt(b, a)

    def positive_width(self, lo, hi, factor: float = 10.0) -> bool:
        """Nonempty open interval test; approx mode demands width > factor*tol."""
        if self.exact:
            return lo < hi
        return hi - lo > factor * self.tol


EXACT = NumberPolicy()
APPROX = NumberPolicy(mode="approx", prec=DEFAULT_PREC, tol=DEFAULT_TOL)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer or a finite decimal string exactly."""
    return Fraction(text.strip())


def realize_algebraic(minpoly: Sequence, bracket: Sequence, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Root of a polynomial (ascending coefficients) isolated in ``bracket``.

    Bisection at ``prec`` bits; requires a sign change over the bracket.
    """
    coeffs = [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator for c in minpoly]

    def p(t):
        return mpmath.polyval(coeffs[::-1], t)

    with mpmath.workprec(prec + 16):
        lo, hi = mpmath.mpf(str(bracket[0])), mpmath.mpf(str(bracket[1]))
        plo, phi = p(lo), p(hi)
        if plo == 0:
            return +lo
        if phi == 0:
            return +hi
        if plo * phi > 0:
            raise DomainError(f"no sign change of {list(minpoly)} on {list(bracket)}")
        for _ in range(prec + 8):
            mid = (lo + hi) / 2
            pm = p(mid)
            if pm == 0:
                lo = hi = mid
                break
            if (pm > 0) == (phi > 0):
                hi, phi = mid, pm
            else:
                lo, plo = mid, pm
        root = (lo + hi) / 2
    return +root


def to_float(x) -> float:
    return float(x)


def scalar_to_str(x: Scalar) -> str:
    """Lossless text form "p/q" (mpf values are dyadic rationals)."""
    if not isinstance(x, Fraction):
        man, exp = mpmath.mpf(x).man_exp
        x = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def scalar_from_str(text: str, policy: NumberPolicy) -> Scalar:
    return policy.convert(Fraction(text))
