"""Exact scalar types: rationals and canonical dyadic rationals.

Every quantity in this package is an exact rational.  ``Rat`` is
``fractions.Fraction``; ``Dyadic`` is the subring of rationals whose
denominator is a power of two, kept in a canonical (mantissa, exponent)
form so equality and hashing are structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

Rat = Fraction

__all__ = [
    "Rat",
    "Dyadic",
    "dyadic_floor",
    "to_rat",
    "is_dyadic",
    "rat_str",
    "parse_rat",
]


def is_dyadic(a: Rat) -> bool:
    """True when ``a`` has a power-of-two denominator."""
    d = a.denominator
    return d & (d - 1) == 0


@dataclass(frozen=True, order=False)
class Dyadic:
    """mantissa * 2**-exponent with exponent >= 0.

    Canonical form: exponent == 0, or mantissa is odd.  Zero is (0, 0).
    """

    mantissa: int
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 0:
            raise ValueError("exponent must be >= 0")
        if self.exponent > 0 and self.mantissa % 2 == 0:
            raise ValueError(f"non-canonical dyadic ({self.mantissa}, {self.exponent})")

    @staticmethod
    def make(mantissa: int, exponent: int) -> "Dyadic":
        """Build from any (mantissa, exponent) pair, normalising."""
        if exponent < 0:
            mantissa <<= -exponent
            exponent = 0
        while exponent > 0 and mantissa % 2 == 0:
            mantissa //= 2
            exponent -= 1
        return Dyadic(mantissa, exponent)

    @staticmethod
    def from_rat(a: Rat) -> "Dyadic":
        if not is_dyadic(a):
            raise ValueError(f"{a} is not dyadic")
        return Dyadic.make(a.numerator, a.denominator.bit_length() - 1)

    @staticmethod
    def from_int(n: int) -> "Dyadic":
        return Dyadic(n, 0)

    def to_rat(self) -> Rat:
        return Fraction(self.mantissa, 1 << self.exponent)

    # Dyadics are closed under +, -, *; division is deliberately absent.
    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exponent, other.exponent)
        m = (self.mantissa << (e - self.exponent)) + (other.mantissa << (e - other.exponent))
        return Dyadic.make(m, e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic.make(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def _cmp_key(self) -> Rat:
        return self.to_rat()

    def __lt__(self, other: "Dyadic") -> bool:
        return self._cmp_key() < other._cmp_key()

    def __le__(self, other: "Dyadic") -> bool:
        return self._cmp_key() <= other._cmp_key()

    def __gt__(self, other: "Dyadic") -> bool:
        return self._cmp_key() > other._cmp_key()

    def __ge__(self, other: "Dyadic") -> bool:
        return self._cmp_key() >= other._cmp_key()

    def __str__(self) -> str:
        return f"{self.mantissa}*2^-{self.exponent}"

    @staticmethod
    def parse(s: str) -> "Dyadic":
        m = re.fullmatch(r"(-?\d+)\*2\^-(\d+)", s.strip())
        if m is None:
            raise ValueError(f"bad dyadic literal {s!r}")
        return Dyadic.make(int(m.group(1)), int(m.group(2)))


def dyadic_floor(a: Rat, n: int) -> Dyadic:
    """Largest multiple of 2**-n that is <= a (floor toward minus infinity)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    # Fraction.__floor__ rounds toward minus infinity, which is what we need
    # for negative a as well.
    m = (a.numerator << n) // a.denominator
    return Dyadic.make(m, n)


def to_rat(d: Dyadic) -> Rat:
    return d.to_rat()


def rat_str(a: Rat) -> str:
    """Serialise a rational as 'p/q' with q > 0, always including the slash."""
    return f"{a.numerator}/{a.denominator}"


def parse_rat(s: str) -> Rat:
    m = re.fullmatch(r"(-?\d+)\s*/\s*(\d+)", s.strip())
    if m is not None:
        return Fraction(int(m.group(1)), int(m.group(2)))
    return Fraction(s.strip())
