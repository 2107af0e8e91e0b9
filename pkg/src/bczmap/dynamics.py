"""The BCZ map on the Farey triangle, its itinerary, and cocycle series.

All iteration runs on integer numerators over a fixed shared denominator:
``T(x/d, y/d) = (y/d, (k*y - x)/d)`` with ``k = (d + x) // y``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Literal, Sequence

from .exact_core import FareyPoint, HalfInteger, in_farey_triangle
from .farey import _check_order, farey_length, farey_stream

PointFunction = Callable[[FareyPoint], Fraction]

SAMPLE_DEN = 10 ** 6 + 3


class InvariantViolation(AssertionError):
    """A proved identity or bound failed; ``witness`` holds the evidence."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


def itinerary(x_num: int, y_num: int, den: int) -> int:
    """k(a, b) = floor((1 + a) / b) on numerators over ``den``."""
    return (den + x_num) // y_num


@dataclass(frozen=True)
class StepRecord:
    point: FareyPoint
    k: int
    k_t: int
    k_hat: HalfInteger
    r: Fraction


@dataclass
class CocycleSeries:
    n: int
    terms: list
    kind: Literal["theta", "iota", "custom"]

    def abs_sum(self):
        return sum((abs(t) for t in self.terms), start=type(self.terms[0])(0))


def _require_triangle(p: FareyPoint) -> None:
    if not in_farey_triangle(p):
        raise ValueError(f"not in Farey triangle: {p}")


def return_time(p: FareyPoint) -> Fraction:
    """R(a, b) = 1 / (ab)."""
    return Fraction(p.den * p.den, p.x_num * p.y_num)


def khat(p: FareyPoint) -> Fraction:
    """(k(a,b) + k(b,a)) / 2 as an exact rational."""
    return Fraction(itinerary(p.x_num, p.y_num, p.den) + itinerary(p.y_num, p.x_num, p.den), 2)


def khat_minus_3(p: FareyPoint) -> Fraction:
    return khat(p) - 3


def step_record(p: FareyPoint) -> StepRecord:
    _require_triangle(p)
    k = itinerary(p.x_num, p.y_num, p.den)
    k_t = itinerary(p.y_num, p.x_num, p.den)
    return StepRecord(p, k, k_t, HalfInteger(k + k_t), return_time(p))


def bcz_step(p: FareyPoint) -> tuple[FareyPoint, StepRecord]:
    rec = step_record(p)
    nxt = FareyPoint(p.y_num, rec.k * p.y_num - p.x_num, p.den)
    return nxt, rec


def bcz_step_inverse(p: FareyPoint) -> FareyPoint:
    """T^{-1}(a, b) = swap(T(swap(a, b)))."""
    _require_triangle(p)
    q, _ = bcz_step(p.swapped())
    return q.swapped()


def orbit_stream(start: FareyPoint, steps: int) -> Iterator[StepRecord]:
    """StepRecords for T^0(start), ..., T^{steps-1}(start)."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    p = start
    for _ in range(steps):
        p, rec = bcz_step(p)
        yield rec


def orbit_numerators(x: int, y: int, den: int, steps: int) -> Iterator[tuple[int, int]]:
    """Bare ``(x_num, y_num)`` pairs along the orbit; no validation, no records."""
    for _ in range(steps):
        yield x, y
        x, y = y, itinerary(x, y, den) * y - x


def periodic_start(n: int) -> FareyPoint:
    """The point (1/n, 1) whose orbit walks the order-n Farey denominators."""
    _check_order(n)
    return FareyPoint(1, n, n)


def theta_twice(n: int) -> Iterator[int]:
    """Yield ``2*theta_i`` for i = 1..A_n, where theta_i sums khat - 3 along the orbit."""
    a_n = farey_length(n).a_n
    x, y, acc = 1, n, 0
    for _ in range(a_n):
        k = itinerary(x, y, n)
        acc += k + itinerary(y, x, n) - 6
        yield acc
        x, y = y, k * y - x


def theta_series(n: int) -> CocycleSeries:
    return CocycleSeries(n, [HalfInteger(t) for t in theta_twice(n)], "theta")


def theta_abs_sum(n: int) -> tuple[Fraction, Fraction]:
    """Streaming ``(sum |theta_i|, theta_{A_n})`` without storing the series."""
    total = last = 0
    for t in theta_twice(n):
        total += t if t >= 0 else -t
        last = t
    return Fraction(total, 2), Fraction(last, 2)


def iota_series(n: int) -> CocycleSeries:
    """iota_i = n^2 (p_i A_n - i q_i) / (q_i A_n), each term from its closed form."""
    a_n = farey_length(n).a_n
    n2 = n * n
    terms = [Fraction(n2 * (p * a_n - i * q), q * a_n)
             for p, q, i in farey_stream(n) if i > 0]
    return CocycleSeries(n, terms, "iota")


def iota_abs_sum(n: int) -> Fraction:
    """Exact sum |iota_i|, grouping numerators by denominator q so only n fractions are added."""
    a_n = farey_length(n).a_n
    by_q = [0] * (n + 1)
    for p, q, i in farey_stream(n):
        if i:
            by_q[q] += abs(p * a_n - i * q)
    s = sum((Fraction(v, q) for q, v in enumerate(by_q) if v), Fraction(0))
    return s * n * n / a_n


def cocycle(n: int, i1: int, i2: int, p: FareyPoint) -> tuple[Fraction, Fraction]:
    """Both sides of chi(i1 + i2, p) = chi(i2, T^{i1} p) + chi(i1, p).

    chi(i, p) sums R(T^{j-1} p) - n^2/A_n over j = 1..i.
    """
    if i1 < 0 or i2 < 0:
        raise ValueError("cocycle indices must be >= 0")
    _require_triangle(p)
    centre = Fraction(n * n, farey_length(n).a_n)

    def chi(i, start):
        total = Fraction(0)
        for x, y in orbit_numerators(start.x_num, start.y_num, start.den, i):
            total += Fraction(start.den ** 2, x * y) - centre
        return total

    q = p
    for _ in range(i1):
        q, _ = bcz_step(q)
    return chi(i1 + i2, p), chi(i2, q) + chi(i1, p)


def f_n_functional(g: PointFunction, n: int) -> Fraction:
    """L1 norm of the mean-centred partial sums of g along the orbit of (1/n, 1).

    Two passes over the orbit (mean, then partial sums) keep memory O(1).
    """
    a_n = farey_length(n).a_n
    start = periodic_start(n)

    def values():
        for x, y in orbit_numerators(start.x_num, start.y_num, n, a_n):
            yield g(FareyPoint(x, y, n))

    mean = sum(values(), Fraction(0)) / a_n
    total = Fraction(0)
    partial = Fraction(0)
    for v in values():
        partial += v - mean
        total += abs(partial)
    return total


# Per-(k, k^T) bounds on R - khat: (lower, lower_inclusive, upper); upper is strict.
_CASE_BOUNDS = {
    (2, 2): (Fraction(-1), True, Fraction(2)),
    (2, 1): (Fraction(-1, 2), False, Fraction(7, 12)),
    (3, 2): (Fraction(-5, 12), True, Fraction(5, 3)),
    (3, 1): (Fraction(-1, 2), True, Fraction(19, 15)),
    (4, 2): (Fraction(4, 15), True, Fraction(3, 2)),
}


def case_bounds(k: int, k_t: int):
    """The bucket-specific interval for R - khat, or None if only the global one applies."""
    key = (max(k, k_t), min(k, k_t))
    if key in _CASE_BOUNDS:
        return _CASE_BOUNDS[key]
    if key[1] == 1 and key[0] >= 4:
        return Fraction(-1, 2), True, Fraction(3, 2) + Fraction(2, key[0])
    return None


def random_triangle_point(rng: random.Random, den: int = SAMPLE_DEN) -> FareyPoint:
    """Uniform draw from the den x den grid, rejecting points outside the triangle."""
    while True:
        x = rng.randint(1, den)
        y = rng.randint(1, den)
        if x + y > den:
            return FareyPoint(x, y, den)


@dataclass
class BucketStats:
    count: int = 0
    min: Fraction | None = None
    max: Fraction | None = None

    def add(self, v: Fraction) -> None:
        self.count += 1
        if self.min is None or v < self.min:
            self.min = v
        if self.max is None or v > self.max:
            self.max = v


@dataclass
class BoundsReport:
    samples: int
    buckets: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "samples": self.samples,
            "buckets": {f"{k},{kt}": {"count": s.count, "min": str(s.min), "max": str(s.max)}
                        for (k, kt), s in sorted(self.buckets.items())},
        }


def check_r_minus_khat(p: FareyPoint) -> Fraction:
    """R - khat at p, raising InvariantViolation if a global or per-case bound fails."""
    rec = step_record(p)
    diff = rec.r - rec.k_hat.to_fraction()
    if not (-1 <= diff < 2):
        raise InvariantViolation("-1 <= R - khat < 2 violated",
                                 {"point": str(p), "value": str(diff)})
    bounds = case_bounds(rec.k, rec.k_t)
    if bounds is not None:
        lo, inclusive, hi = bounds
        ok_lo = diff >= lo if inclusive else diff > lo
        if not (ok_lo and diff < hi):
            raise InvariantViolation(
                f"case bound for (k, k^T) = ({rec.k}, {rec.k_t}) violated",
                {"point": str(p), "value": str(diff), "bounds": [str(lo), str(hi)]})
    return diff


def r_minus_khat_bounds_check(samples: int, seed: int = 0,
                              den: int = SAMPLE_DEN,
                              extra: Sequence[FareyPoint] = ()) -> BoundsReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = random.Random(seed)
    report = BoundsReport(samples + len(extra))
    points = list(extra) + [random_triangle_point(rng, den) for _ in range(samples)]
    for p in points:
        diff = check_r_minus_khat(p)
        k = itinerary(p.x_num, p.y_num, p.den)
        k_t = itinerary(p.y_num, p.x_num, p.den)
        report.buckets.setdefault((k, k_t), BucketStats()).add(diff)
    return report
