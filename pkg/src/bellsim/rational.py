"""Exact complex-rational scalars.

Every coefficient appearing in the generator algebra lies in Q + iQ (in
fact in {0, ±1, ±1/2, ±1/4} times {1, i}), so all algebraic identities
are decided in exact arithmetic.  Floating point enters only when a
coefficient is exported with :func:`CRat.__complex__`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RatLike = Union["CRat", Fraction, int]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot build an exact rational from {value!r}")


@dataclass(frozen=True)
class CRat:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(re, im=0) -> "CRat":
        return CRat(_frac(re), _frac(im))

    @staticmethod
    def coerce(value: RatLike) -> "CRat":
        if isinstance(value, CRat):
            return value
        return CRat(_frac(value))

    def __add__(self, other: RatLike) -> "CRat":
        other = CRat.coerce(other)
        return CRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: RatLike) -> "CRat":
        other = CRat.coerce(other)
        return CRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: RatLike) -> "CRat":
        return CRat.coerce(other) - self

    def __mul__(self, other: RatLike) -> "CRat":
        other = CRat.coerce(other)
        return CRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: RatLike) -> "CRat":
        other = CRat.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero CRat")
        return CRat(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def __neg__(self) -> "CRat":
        return CRat(-self.re, -self.im)

    def conjugate(self) -> "CRat":
        return CRat(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = CRat()
ONE = CRat.of(1)
I = CRat.of(0, 1)
HALF = CRat.of(Fraction(1, 2))
QUARTER = CRat.of(Fraction(1, 4))
