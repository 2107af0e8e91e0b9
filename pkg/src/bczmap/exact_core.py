"""Exact scalar types: reduced rationals, Farey-triangle points, half-integers.

Rationals are plain :class:`fractions.Fraction` values; it already keeps
``gcd(|num|, den) == 1`` and ``den > 0`` after every operation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd
from typing import Union

Rational = Fraction
Number = Union[int, Fraction]


def rational_reduce(num: int, den: int) -> Fraction:
    """Return ``num/den`` in lowest terms with a positive denominator."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(num, den)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/7"`` to a Fraction.

    Floats are rejected: every quantity here must be exact.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Fraction(value)


@dataclass(frozen=True, slots=True)
class FareyPoint:
    """A point ``(x_num/den, y_num/den)`` with a shared positive denominator."""

    x_num: int
    y_num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("den must be positive")

    @classmethod
    def from_rationals(cls, a: Number, b: Number) -> "FareyPoint":
        a, b = as_fraction(a), as_fraction(b)
        den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        return cls(a.numerator * (den // a.denominator),
                   b.numerator * (den // b.denominator), den)

    @property
    def a(self) -> Fraction:
        return Fraction(self.x_num, self.den)

    @property
    def b(self) -> Fraction:
        return Fraction(self.y_num, self.den)

    def swapped(self) -> "FareyPoint":
        return FareyPoint(self.y_num, self.x_num, self.den)

    def normalized(self) -> "FareyPoint":
        """Same point over the smallest possible shared denominator."""
        g = gcd(gcd(self.x_num, self.y_num), self.den)
        return FareyPoint(self.x_num // g, self.y_num // g, self.den // g)

    def __str__(self):
        return f"({self.a}, {self.b})"


def in_farey_triangle(p: FareyPoint) -> bool:
    """``0 < a <= 1``, ``0 < b <= 1`` and ``a + b > 1``, by integer comparison."""
    d = p.den
    return 0 < p.x_num <= d and 0 < p.y_num <= d and p.x_num + p.y_num > d


def in_golden_region(a: Number, b: Number) -> bool:
    """True iff ``b/a`` lies in ``[(sqrt5 - 1)/2, (sqrt5 + 1)/2]``.

    With ``x = b/a > 0`` the two bounds are ``x^2 + x - 1 >= 0`` and
    ``x^2 - x - 1 <= 0``; multiplying through by ``a^2`` keeps it exact.
    """
    a, b = as_fraction(a), as_fraction(b)
    if a <= 0 or b <= 0:
        raise ValueError("golden-region test needs a > 0 and b > 0")
    return b * b + a * b - a * a >= 0 and b * b - a * b - a * a <= 0


@total_ordering
class HalfInteger:
    """An exact element of ``(1/2)Z`` stored as twice its value."""

    __slots__ = ("twice_value",)

    def __init__(self, twice_value: int):
        self.twice_value = int(twice_value)

    @classmethod
    def from_number(cls, value: Number) -> "HalfInteger":
        q = as_fraction(value) * 2
        if q.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(q.numerator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def _coerce(self, other):
        if isinstance(other, HalfInteger):
            return other.twice_value
        if isinstance(other, int):
            return 2 * other
        return NotImplemented

    def __add__(self, other):
        t = self._coerce(other)
        if t is NotImplemented:
            return NotImplemented
        return HalfInteger(self.twice_value + t)

    __radd__ = __add__

    def __sub__(self, other):
        t = self._coerce(other)
        if t is NotImplemented:
            return NotImplemented
        return HalfInteger(self.twice_value - t)

    def __rsub__(self, other):
        t = self._coerce(other)
        if t is NotImplemented:
            return NotImplemented
        return HalfInteger(t - self.twice_value)

    def __neg__(self):
        return HalfInteger(-self.twice_value)

    def __abs__(self):
        return HalfInteger(abs(self.twice_value))

    def __eq__(self, other):
        if isinstance(other, HalfInteger):
            return self.twice_value == other.twice_value
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, HalfInteger):
            return self.twice_value < other.twice_value
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __float__(self):
        return self.twice_value / 2

    def __repr__(self):
        return f"HalfInteger({self.to_fraction()})"

    def __str__(self):
        return str(self.to_fraction())
