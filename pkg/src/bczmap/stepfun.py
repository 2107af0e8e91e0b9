"""Rectangle step functions on the Farey triangle and their exact integrals.

A step function is a sum of ``value * 1[(x0, x1] x (y0, y1]]`` terms. The
integral is taken against ``dm = 2 da db`` on the triangle ``a + b > 1``,
so a constant 1 integrates to exactly 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_core import FareyPoint, as_fraction


@dataclass(frozen=True)
class Rectangle:
    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction
    value: Fraction

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError(f"degenerate rectangle: {self}")

    def contains(self, a: Fraction, b: Fraction) -> bool:
        return self.x0 < a <= self.x1 and self.y0 < b <= self.y1


def _clipped_length(a: Fraction, y0: Fraction, y1: Fraction) -> Fraction:
    # length of {b in (y0, y1] : b > 1 - a}
    lo = max(y0, 1 - a)
    return max(Fraction(0), y1 - lo)


def triangle_area(r: Rectangle) -> Fraction:
    """Lebesgue area of the rectangle intersected with the Farey triangle."""
    x0, x1 = max(r.x0, Fraction(0)), min(r.x1, Fraction(1))
    y0, y1 = max(r.y0, Fraction(0)), min(r.y1, Fraction(1))
    if x0 >= x1 or y0 >= y1:
        return Fraction(0)
    # the integrand in a is piecewise linear with kinks at 1 - y1 and 1 - y0
    cuts = sorted({x0, x1} | {c for c in (1 - y1, 1 - y0) if x0 < c < x1})
    area = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        area += (hi - lo) * (_clipped_length(lo, y0, y1) + _clipped_length(hi, y0, y1)) / 2
    return area


class StepFunction:
    """Finite sum of rectangle indicators with rational heights."""

    def __init__(self, rectangles: Sequence[Rectangle]):
        self.rectangles = tuple(rectangles)
        # integer cross-multiplication data for evaluation on lattice points
        self._int_rects = [
            (r.x0.numerator, r.x0.denominator, r.x1.numerator, r.x1.denominator,
             r.y0.numerator, r.y0.denominator, r.y1.numerator, r.y1.denominator, r.value)
            for r in self.rectangles
        ]

    @classmethod
    def parse(cls, spec: str) -> "StepFunction":
        """Parse ``"x0,x1,y0,y1,value;..."`` with rational fields such as ``1/2``."""
        rects = []
        for chunk in spec.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            fields = [f.strip() for f in chunk.split(",")]
            if len(fields) != 5:
                raise ValueError(f"expected x0,x1,y0,y1,value in {chunk!r}")
            try:
                rects.append(Rectangle(*(as_fraction(f) for f in fields)))
            except (TypeError, ZeroDivisionError) as exc:
                raise ValueError(f"bad rectangle {chunk!r}: {exc}") from None
        if not rects:
            raise ValueError("empty step-function spec")
        return cls(rects)

    def __call__(self, p: FareyPoint) -> Fraction:
        return self.at_numerators(p.x_num, p.y_num, p.den)

    def at_numerators(self, x: int, y: int, den: int) -> Fraction:
        total = Fraction(0)
        for x0n, x0d, x1n, x1d, y0n, y0d, y1n, y1d, v in self._int_rects:
            # x0 < x/den <= x1 and y0 < y/den <= y1, all by cross-multiplying
            if (x0n * den < x * x0d and x * x1d <= x1n * den
                    and y0n * den < y * y0d and y * y1d <= y1n * den):
                total += v
        return total

    def sum_over(self, points, den: int) -> Fraction:
        """Exact sum of f over ``(x, y)`` numerator pairs, via per-rectangle hit counts."""
        hits = [0] * len(self._int_rects)
        rects = list(enumerate(self._int_rects))
        for x, y in points:
            for j, (x0n, x0d, x1n, x1d, y0n, y0d, y1n, y1d, _) in rects:
                if (x0n * den < x * x0d and x * x1d <= x1n * den
                        and y0n * den < y * y0d and y * y1d <= y1n * den):
                    hits[j] += 1
        return sum((h * r[8] for h, r in zip(hits, self._int_rects) if h), Fraction(0))

    def integral(self) -> Fraction:
        """Exact integral against dm = 2 da db over the triangle."""
        return sum((2 * r.value * triangle_area(r) for r in self.rectangles), Fraction(0))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return StepFunction(self.rectangles + other.rectangles)

    def __repr__(self):
        return f"StepFunction({len(self.rectangles)} rectangles)"
