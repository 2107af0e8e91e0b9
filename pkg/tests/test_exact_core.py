import math
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from bczmap.exact_core import (FareyPoint, HalfInteger, as_fraction, in_farey_triangle,
                               in_golden_region, rational_reduce)


@pytest.mark.parametrize("num, den, want", [(6, 4, Fraction(3, 2)), (-3, -9, Fraction(1, 3)),
                                            (0, 7, Fraction(0, 1))])
def test_rational_reduce_examples(num, den, want):
    r = rational_reduce(num, den)
    assert (r.numerator, r.denominator) == (want.numerator, want.denominator)


def test_rational_reduce_zero_denominator():
    with pytest.raises(ZeroDivisionError, match="zero denominator"):
        rational_reduce(1, 0)


@given(st.integers(), st.integers().filter(bool), st.integers(), st.integers().filter(bool))
def test_rationals_stay_reduced(n1, d1, n2, d2):
    x, y = rational_reduce(n1, d1), rational_reduce(n2, d2)
    for r in (x, y, x + y, x - y, x * y):
        assert r.denominator > 0 and gcd(abs(r.numerator), r.denominator) == 1


def test_as_fraction_rejects_floats():
    assert as_fraction("3/7") == Fraction(3, 7)
    with pytest.raises(TypeError):
        as_fraction(0.5)


@pytest.mark.parametrize("a, b, inside", [
    (Fraction(1, 2), 1, True),
    (Fraction(1, 2), Fraction(1, 2), False),
    (Fraction(1, 3), 1, True),
    (Fraction(2, 3), Fraction(2, 3), True),
    (1, 1, True),
    (Fraction(1, 3), Fraction(1, 2), False),
])
def test_in_farey_triangle(a, b, inside):
    assert in_farey_triangle(FareyPoint.from_rationals(a, b)) is inside


def test_farey_point_helpers():
    p = FareyPoint.from_rationals(Fraction(1, 2), Fraction(2, 3))
    assert (p.x_num, p.y_num, p.den) == (3, 4, 6)
    assert p.swapped().a == Fraction(2, 3)
    assert FareyPoint(6, 8, 12).normalized() == p
    with pytest.raises(ValueError):
        FareyPoint(1, 1, 0)


def test_golden_region_examples():
    assert in_golden_region(Fraction(1, 5), Fraction(1, 5))
    assert not in_golden_region(Fraction(1, 10), 1)
    # ratio 3/2 sits below (sqrt5 + 1)/2 ~ 1.618, so the point is inside
    assert in_golden_region(Fraction(2, 3), 1)
    assert 1.5 < (math.sqrt(5) + 1) / 2
    with pytest.raises(ValueError):
        in_golden_region(0, 1)


def _float_golden(a, b):
    x = b / a
    return (math.sqrt(5) - 1) / 2 <= x <= (math.sqrt(5) + 1) / 2


def _near_bound(a, b):
    x = float(b / a)
    return min(abs(x - (math.sqrt(5) - 1) / 2), abs(x - (math.sqrt(5) + 1) / 2)) < 1e-9


def test_golden_region_against_floats():
    rng = random.Random(5)
    checked = 0
    for _ in range(10_000):
        a = Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6))
        # half the draws near ratio 1 so both outcomes are exercised
        if rng.random() < 0.5:
            b = a * Fraction(rng.randint(500_000, 1_700_000), 10 ** 6)
        else:
            b = Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6))
        if _near_bound(a, b):
            continue
        assert in_golden_region(a, b) == _float_golden(a, b)
        checked += 1
    assert checked > 9_900


def test_golden_region_exact_at_fibonacci_ratios():
    # F_{k+1}/F_k alternates around the golden ratio and floats cannot tell late terms apart
    f = [1, 1]
    while len(f) < 80:
        f.append(f[-1] + f[-2])
    for k in range(2, 79):
        inside = k % 2 == 0   # F_{k+1}/F_k < phi exactly when k is even
        assert in_golden_region(f[k], f[k + 1]) == inside


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6))
def test_half_integer_group_laws(x, y, z):
    a, b, c = HalfInteger(x), HalfInteger(y), HalfInteger(z)
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a - b).to_fraction() == Fraction(x - y, 2)
    assert a.to_fraction() == Fraction(x, 2)
    assert abs(-a) == abs(a)


def test_half_integer_misc():
    h = HalfInteger.from_number(Fraction(-3, 2))
    assert h.twice_value == -3 and h + 2 == HalfInteger(1) and 2 - h == Fraction(7, 2)
    assert h < 0 and float(h) == -1.5 and str(h) == "-3/2"
    with pytest.raises(ValueError):
        HalfInteger.from_number(Fraction(1, 3))
