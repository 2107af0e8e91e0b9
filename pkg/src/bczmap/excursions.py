"""Excursions of the BCZ map and the energy functional.

An excursion is an orbit segment whose two endpoint x-coordinates are
strictly smaller than every x-coordinate in between. Each pair
``(a, b)`` in ``(0, 1]^2`` determines exactly one: start from
``(a, b + floor((1 - b)/a) * a)`` and iterate until the x-coordinate
first equals ``b``.

Everything runs on integer numerators over ``L = lcm(den a, den b)``.
The partial sums of ``khat - 3`` are kept doubled so they stay integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterator

from . import dynamics as _dyn
from .dynamics import InvariantViolation
from .exact_core import FareyPoint, HalfInteger, as_fraction, in_golden_region
from .farey import _check_order, farey_stream

MATERIALIZE_LIMIT = 10 ** 6


@dataclass(frozen=True)
class ModuliPoint:
    """Endpoint pair ``(a, b)`` with ``0 < a, b <= 1``."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = as_fraction(self.a), as_fraction(self.b)
        if not (0 < a <= 1 and 0 < b <= 1):
            raise ValueError(f"moduli point must lie in (0,1]^2, got ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def den(self) -> int:
        da, db = self.a.denominator, self.b.denominator
        return da * db // gcd(da, db)

    def numerators(self) -> tuple[int, int, int]:
        """``(A, B, L)`` with ``a = A/L`` and ``b = B/L``."""
        L = self.den
        return (self.a.numerator * (L // self.a.denominator),
                self.b.numerator * (L // self.b.denominator), L)

    def swapped(self) -> "ModuliPoint":
        return ModuliPoint(self.b, self.a)

    def __str__(self):
        return f"({self.a}, {self.b})"


@dataclass(frozen=True)
class ExcursionSummary:
    """Streaming statistics; the zeta fields are doubled (integers)."""

    length: int
    zeta_s2: int
    zeta_first2: int
    zeta_penult2: int | None     # zeta_{s-1}; None when s = 1
    interior_max2: int | None    # over zeta_2 .. zeta_{s-2}
    interior_min2: int | None
    energy2: int                 # 2 * sum_{i=1..s} |zeta_i|
    second_x: int                # a_1 (or a_s when s = 1)
    penult_x: int                # a_{s-1}
    min_interior_x: int | None   # only tracked when verifying


@dataclass(frozen=True)
class Excursion:
    """The excursion of a moduli point.

    ``xs`` holds the numerators of ``a_0 .. a_{s+1}`` over ``start.den``,
    so the i-th point is ``(xs[i], xs[i+1])``. When the length exceeds the
    materialization limit, ``xs`` and ``zeta_twice`` are None and only
    ``summary`` is available.
    """

    moduli: ModuliPoint
    start: FareyPoint
    length: int
    xs: tuple | None
    zeta_twice: tuple | None
    summary: ExcursionSummary

    @property
    def den(self) -> int:
        return self.start.den

    @property
    def materialized(self) -> bool:
        return self.xs is not None

    def _need_points(self):
        if self.xs is None:
            raise ValueError(f"excursion of length {self.length} was streamed; points not kept")

    @property
    def points(self) -> tuple:
        """``(a_i, b_i)`` for i = 0..s as FareyPoints."""
        self._need_points()
        d = self.den
        return tuple(FareyPoint(self.xs[i], self.xs[i + 1], d) for i in range(self.length + 1))

    @property
    def zeta(self) -> tuple:
        """``zeta_1 .. zeta_s`` for f = khat - 3."""
        self._need_points()
        return tuple(HalfInteger(z) for z in self.zeta_twice)

    def x(self, i: int) -> Fraction:
        self._need_points()
        return Fraction(self.xs[i], self.den)

    @property
    def zeta_s(self) -> Fraction:
        return Fraction(self.summary.zeta_s2, 2)

    @property
    def energy(self) -> Fraction:
        return Fraction(self.summary.energy2, 2)


def _walk(A: int, B: int, L: int, keep: bool, track_depth: bool,
          materialize_limit: int = MATERIALIZE_LIMIT):
    """Run the excursion from x = A to x = B over denominator L.

    Returns ``(xs, zetas, summary)``; the lists are None if not kept.
    """
    itin = _dyn.itinerary
    b0 = B + ((L - B) // A) * A
    # s <= 1/(ab) for every excursion; overrunning it means the map is broken
    cap = (L * L) // (A * B) + 1
    x, y = A, b0
    xs = [x] if keep else None
    zetas = [] if keep else None
    s = acc = energy = 0
    first = penult = lag1 = lag2 = None
    imax = imin = None
    deep = max(A, B)
    min_int = None
    while True:
        px = x
        k = itin(x, y, L)
        acc += k + itin(y, x, L) - 6
        s += 1
        x, y = y, k * y - x
        energy += acc if acc >= 0 else -acc
        if s == 1:
            first = acc
        if s >= 4:
            # zeta_{s-2} is now known to be interior
            if imax is None:
                imax = imin = lag2
            elif lag2 > imax:
                imax = lag2
            elif lag2 < imin:
                imin = lag2
        lag2, lag1 = lag1, acc
        if keep:
            xs.append(x)
            zetas.append(acc)
            if s > materialize_limit:
                keep = False
                xs = zetas = None
        if x == B:
            break
        if track_depth and (min_int is None or x < min_int):
            min_int = x
        if s >= cap or y <= 0 or x <= 0:
            raise InvariantViolation("excursion did not close within 1/(ab) steps",
                                     {"a": f"{A}/{L}", "b": f"{B}/{L}", "steps": s})
    if keep:
        xs.append(y)
    penult = lag2 if s >= 2 else None
    summary = ExcursionSummary(
        length=s, zeta_s2=acc, zeta_first2=first, zeta_penult2=penult,
        interior_max2=imax, interior_min2=imin, energy2=energy,
        second_x=b0, penult_x=px, min_interior_x=min_int)
    if track_depth and min_int is not None and min_int <= deep:
        raise InvariantViolation("interior point not deeper than endpoints",
                                 {"a": f"{A}/{L}", "b": f"{B}/{L}", "min_interior": f"{min_int}/{L}"})
    return xs, zetas, summary


def _check_endpoints(A: int, B: int, L: int, summary: ExcursionSummary) -> None:
    a1 = ((L - B) // A) * A + B
    a_last = A + ((L - A) // B) * B
    s = summary.length
    if s == 1:
        # no interior: a_1 = b directly, so both formulas must collapse
        ok = a1 == B and a_last == A
    else:
        ok = summary.second_x == a1 and summary.penult_x == a_last
    if not ok:
        raise InvariantViolation("endpoint formula for a_1 or a_{s-1} failed",
                                 {"a": f"{A}/{L}", "b": f"{B}/{L}", "s": s})


def _as_moduli(m) -> ModuliPoint:
    if isinstance(m, ModuliPoint):
        return m
    a, b = m
    return ModuliPoint(a, b)


def build_excursion(m, verify_interior: bool = False,
                    materialize_limit: int = MATERIALIZE_LIMIT) -> Excursion:
    """Construct the unique excursion from x = m.a to x = m.b.

    The endpoint formulas for a_1 and a_{s-1} are always checked. With
    ``verify_interior`` the depth of every interior point and the coprime
    pair count are checked too, which costs O(s) extra.
    """
    m = _as_moduli(m)
    A, B, L = m.numerators()
    xs, zetas, summary = _walk(A, B, L, True, verify_interior, materialize_limit)
    _check_endpoints(A, B, L, summary)
    if verify_interior:
        count = coprime_pair_count(A, B, L)
        if count != summary.length - 1:
            raise InvariantViolation("s - 1 differs from the coprime pair count",
                                     {"moduli": str(m), "s": summary.length, "count": count})
    start = FareyPoint(A, summary.second_x, L)
    return Excursion(m, start, summary.length,
                     tuple(xs) if xs is not None else None,
                     tuple(zetas) if zetas is not None else None, summary)


def start_and_length(m) -> tuple[FareyPoint, int]:
    """``(T^0 point, s)`` without keeping the orbit; for long excursions."""
    m = _as_moduli(m)
    A, B, L = m.numerators()
    _, _, summary = _walk(A, B, L, False, False)
    return FareyPoint(A, summary.second_x, L), summary.length


def coprime_pair_count(A: int, B: int, L: int) -> int:
    """#{(u, v) coprime, u, v >= 1 : u*A + v*B <= L} by direct scan."""
    total = 0
    u = 1
    while u * A + B <= L:
        vmax = (L - u * A) // B
        total += sum(1 for v in range(1, vmax + 1) if gcd(u, v) == 1)
        u += 1
    return total


def primitive_points(m) -> list[tuple[int, int]]:
    """Coprime ``(u, v)`` with ``u*a + v*b <= 1``, ordered by increasing v/u.

    This is an independent double-loop enumeration, kept as a cross-check
    on the orbit construction rather than as a production path.
    """
    m = _as_moduli(m)
    A, B, L = m.numerators()
    pairs = []
    for u in range(1, (L - B) // A + 1):
        for v in range(1, (L - u * A) // B + 1):
            if gcd(u, v) == 1:
                pairs.append((u, v))
    pairs.sort(key=lambda uv: uv[1] / uv[0])
    for (u1, v1), (u2, v2) in zip(pairs, pairs[1:]):
        # floats only order the list; strictness is confirmed exactly
        if not v1 * u2 < v2 * u1:
            raise InvariantViolation("primitive points not strictly ordered by v/u",
                                     {"pairs": [[u1, v1], [u2, v2]]})
    return pairs


def excursion_length_estimate(m) -> tuple[int, float]:
    """Exact length s and the ratio ``s * ab * pi^2 / 3`` (tends to 1)."""
    m = _as_moduli(m)
    A, B, L = m.numerators()
    _, _, summary = _walk(A, B, L, False, False)
    s = summary.length
    if s * A * B > L * L:
        raise InvariantViolation("s > 1/(ab)", {"moduli": str(m), "s": s})
    return s, s * float(m.a * m.b) * math.pi ** 2 / 3


def reverse_excursion(e: Excursion) -> Excursion:
    """The excursion of ``(b, a)``, checked against e read backwards.

    Reversal maps the i-th point ``(a_i, a_{i+1})`` to ``(a_{s-i}, a_{s-1-i})``.
    Since khat is symmetric, the reversed partial sums are
    ``zeta'_i = zeta_s - zeta_{s-i}``.
    """
    r = build_excursion(e.moduli.swapped())
    if r.length != e.length or r.summary.zeta_s2 != e.summary.zeta_s2:
        raise InvariantViolation("reversed excursion has a different length or total",
                                 {"moduli": str(e.moduli), "s": e.length, "s_rev": r.length})
    if e.materialized and r.materialized:
        s = e.length
        if r.den != e.den or list(r.xs[:s + 1]) != list(reversed(e.xs[:s + 1])):
            raise InvariantViolation("reversed excursion does not retrace the x-coordinates",
                                     {"moduli": str(e.moduli)})
        z, zr = e.zeta_twice, r.zeta_twice
        for i in range(1, s + 1):
            back = z[s - 1 - i] if i < s else 0
            if zr[i - 1] != z[s - 1] - back:
                raise InvariantViolation("reversed partial sums do not match",
                                         {"moduli": str(e.moduli), "i": i})
    return r


def _ratio_sum(e: Excursion) -> Fraction:
    a, b = e.moduli.a, e.moduli.b
    return b / a + a / b


def reset_sum_check(e: Excursion) -> tuple[Fraction, Fraction, Fraction]:
    """``(lower, zeta_s, upper)`` with lower < zeta_s < upper enforced.

    The interval is ``(rho + 1/rho - 4, rho + 1/rho - 2)`` for the endpoint
    ratio rho; also enforces ``|zeta_s| < rho + 1/rho``.
    """
    t = _ratio_sum(e)
    lo, hi = t - 4, t - 2
    z = e.zeta_s
    if not lo < z < hi:
        raise InvariantViolation("reset-control interval violated",
                                 {"moduli": str(e.moduli), "zeta_s": str(z),
                                  "interval": [str(lo), str(hi)]})
    if not abs(z) < t:
        raise InvariantViolation("|zeta_s| < a_s/a_0 + a_0/a_s violated",
                                 {"moduli": str(e.moduli), "zeta_s": str(z)})
    return lo, z, hi


def reset_ok(A: int, B: int, zeta_s2: int) -> bool:
    """Integer form of the reset interval and its absolute-value corollary."""
    AB = A * B
    sq = 2 * (A * A + B * B)
    return sq - 8 * AB < zeta_s2 * AB < sq - 4 * AB and abs(zeta_s2) * AB < sq


def monotonicity_ok(A: int, B: int, L: int, sm: ExcursionSummary) -> bool:
    """zeta_{s-1} < zeta_m < zeta_1 on [2, s-2], plus the two endpoint bounds.

    The endpoint bounds are zeta_1 <= 1/a_0 - 2 and
    zeta_{s-1} > -1/a_0 - 2/a_s + 2, both multiplied out to integers.
    """
    if sm.length < 4:
        raise ValueError("excursion too short for monotonicity")
    lo, hi = sm.zeta_penult2, sm.zeta_first2
    if not (lo < sm.interior_min2 and sm.interior_max2 < hi):
        return False
    if not hi * A <= 2 * L - 4 * A:
        return False
    return lo * A * B > -2 * L * B - 4 * L * A + 4 * A * B


def monotonicity_check(e: Excursion) -> bool:
    A, B, L = e.moduli.numerators()
    if e.den != L:
        raise AssertionError("excursion denominator mismatch")
    return monotonicity_ok(A, B, L, e.summary)


def theta_reset_at_r_i(n: int, i: int) -> Fraction:
    """theta at the index r_i of the Farey term 1/i, with its interval enforced.

    r_i is found by scanning the Farey sequence; theta is accumulated along
    the orbit of (1/n, 1). The excursion from 1/n to i/n gives the same
    number by a second route, and the two are compared.
    """
    _check_order(n)
    if not 1 <= i <= n:
        raise ValueError(f"i must satisfy 1 <= i <= n, got i={i}, n={n}")
    r = next(f.index for f in farey_stream(n) if f.p == 1 and f.q == i)
    theta2 = 0
    x, y = 1, n
    itin = _dyn.itinerary
    for _ in range(r):
        k = itin(x, y, n)
        theta2 += k + itin(y, x, n) - 6
        x, y = y, k * y - x
    theta = Fraction(theta2, 2)
    via = build_excursion(ModuliPoint(Fraction(1, n), Fraction(i, n)))
    if via.length != r or via.zeta_s != theta:
        raise InvariantViolation("theta_{r_i} disagrees with the excursion total",
                                 {"n": n, "i": i, "r_i": r, "theta": str(theta),
                                  "excursion": [via.length, str(via.zeta_s)]})
    lo, hi = i + Fraction(1, i) - 4, i + Fraction(1, i) - 2
    if not lo < theta < hi:
        raise InvariantViolation("theta_{r_i} outside its interval",
                                 {"n": n, "i": i, "theta": str(theta), "interval": [str(lo), str(hi)]})
    return theta


PointFunction = Callable[[FareyPoint], Fraction]


def excursion_values(f: PointFunction, e: Excursion) -> Iterator:
    """f at the s points T^0(a_0, b_0), ..., T^{s-1}(a_0, b_0)."""
    for x, y in _dyn.orbit_numerators(e.start.x_num, e.start.y_num, e.den, e.length):
        yield f(FareyPoint(x, y, e.den))


def zeta_series(f: PointFunction, e: Excursion) -> list:
    out, acc = [], 0
    for v in excursion_values(f, e):
        acc = acc + v
        out.append(acc)
    return out


def energy(f: PointFunction | None, m) -> Fraction:
    """E(f; a, b) = sum_{i=1..s} |zeta_i|. ``f=None`` means khat - 3."""
    e = m if isinstance(m, Excursion) else build_excursion(m)
    if f is None or f is _dyn.khat_minus_3:
        return e.energy
    total = Fraction(0)
    acc = Fraction(0)
    for v in excursion_values(f, e):
        acc += v
        total += abs(acc)
    return total


def _exceeds_sqrt5_plus_2(x: Fraction) -> bool:
    # x > sqrt5 + 2  <=>  x - 2 > 0 and (x - 2)^2 > 5
    return x > 2 and (x - 2) ** 2 > 5


def energy_bound_checks(m, d) -> dict:
    """Check E <= 2 d^5 and, in the golden region, 2a + b < 1 and a + 2b < 1."""
    m = _as_moduli(m)
    d = as_fraction(d)
    if d < 1:
        raise ValueError("d must be >= 1")
    e = build_excursion(m)
    E = e.energy
    big = max(1 / m.a, 1 / m.b)
    report = {"moduli": str(m), "energy": str(E), "d": str(d),
              "d_bound_applies": big <= d, "golden": in_golden_region(m.a, m.b),
              "slim_applies": False}
    if big <= d:
        bound = 2 * d ** 5
        report["d_bound"] = str(bound)
        if not E <= bound:
            raise InvariantViolation("E(a,b) <= 2 d^5 violated", report)
    if _exceeds_sqrt5_plus_2(big) and report["golden"]:
        report["slim_applies"] = True
        if not (2 * m.a + m.b < 1 and m.a + 2 * m.b < 1):
            raise InvariantViolation("2a + b < 1 and a + 2b < 1 violated", report)
    return report


def is_sub_excursion(e: Excursion, i1: int, i2: int) -> bool:
    """True when every x strictly between indices i1 < i2 exceeds both ends."""
    e._need_points()
    if not 0 <= i1 < i2 <= e.length:
        return False
    xs = e.xs
    top = max(xs[i1], xs[i2])
    return all(xs[i] > top for i in range(i1 + 1, i2))


def sub_excursions(e: Excursion) -> list[tuple[int, int]]:
    """Every index pair delimiting a sub-excursion, found by direct scan."""
    e._need_points()
    xs, s = e.xs, e.length
    out = []
    for i1 in range(s):
        low = None  # min x strictly inside (i1, i2)
        for i2 in range(i1 + 1, s + 1):
            if low is None or low > max(xs[i1], xs[i2]):
                out.append((i1, i2))
            if low is None or xs[i2] < low:
                low = xs[i2]
            if low <= xs[i1]:
                break
    return out


def sub_excursion_inequality_check(e: Excursion, i1: int, i2: int) -> bool:
    """sum_{m=i1+1..i2} |zeta_m| <= (i2 - i1) |zeta_{i1}| + E(c, d).

    (c, d) = (a_{i1}, a_{i2}), and its excursion is built independently
    and must retrace the segment. zeta_0 is 0.
    """
    if not is_sub_excursion(e, i1, i2):
        raise ValueError(f"indices ({i1}, {i2}) do not delimit a sub-excursion")
    c, d = e.x(i1), e.x(i2)
    sub = build_excursion(ModuliPoint(c, d))
    scale = sub.den
    seg = [Fraction(x, e.den) for x in e.xs[i1:i2 + 1]]
    if sub.length != i2 - i1 or [Fraction(x, scale) for x in sub.xs[:sub.length + 1]] != seg:
        raise InvariantViolation("sub-excursion does not match the excursion of its endpoints",
                                 {"moduli": str(e.moduli), "i1": i1, "i2": i2})
    z = (0,) + e.zeta_twice
    lhs = Fraction(sum(abs(z[m]) for m in range(i1 + 1, i2 + 1)), 2)
    rhs = (i2 - i1) * Fraction(abs(z[i1]), 2) + sub.energy
    return lhs <= rhs


def reversed_tail_check(m) -> tuple[Fraction, Fraction]:
    """Tail energy after the point a + b, against E(b, a + b).

    With t_1 the index where a_{t_1} = a + b, returns
    ``(sum_{m=t_1+1..s-1} |sum_{j=m..s-1} (khat - 3)|, E(b, a + b))`` and
    requires the first not to exceed the second.
    """
    m = _as_moduli(m)
    if m.a + m.b > 1:
        raise ValueError("a + b > 1: the point a + b is not on the excursion")
    e = build_excursion(m)
    e._need_points()
    A, B, L = m.numerators()
    t1 = e.xs.index(A + B, 1)
    s = e.length
    z = (0,) + e.zeta_twice
    # sum_{j=m..s-1} f_j = zeta_s - zeta_m (1-based partials, f_j at index j)
    lhs = Fraction(sum(abs(z[s] - z[mm]) for mm in range(t1 + 1, s)), 2)
    rhs = energy(None, ModuliPoint(m.b, m.a + m.b))
    if not lhs <= rhs:
        raise InvariantViolation("reversed tail exceeds E(b, a+b)",
                                 {"moduli": str(m), "lhs": str(lhs), "rhs": str(rhs)})
    return lhs, rhs


def reduced_fractions(max_den: int) -> list[tuple[int, int]]:
    """All p/q in (0, 1] with q <= max_den, as (p, q) pairs."""
    return [(p, q) for q in range(1, max_den + 1) for p in range(1, q + 1) if gcd(p, q) == 1]


@dataclass
class SweepStats:
    points: int = 0
    steps: int = 0
    monotonicity_cases: int = 0
    oracle_cases: int = 0
    violations: list = None

    def __post_init__(self):
        if self.violations is None:
            self.violations = []

    def as_dict(self) -> dict:
        return {"points": self.points, "steps": self.steps,
                "monotonicity_cases": self.monotonicity_cases,
                "oracle_cases": self.oracle_cases,
                "violations": len(self.violations),
                "witnesses": self.violations[:20]}


def _oracle_interior(A: int, B: int, L: int, coprime_to: dict) -> list[int]:
    """u*A + v*B over coprime (u, v) with value <= L, ordered by v/u.

    Sorting on the float v/u is exact here: distinct ratios with u, v <= D
    differ by at least 1/D^2, far above double rounding.
    """
    pairs = []
    u = 1
    while u * A + B <= L:
        vmax = (L - u * A) // B
        for v in coprime_to[u]:
            if v > vmax:
                break
            pairs.append((v / u, u * A + v * B))
        u += 1
    pairs.sort()
    return [x for _, x in pairs]


def check_moduli(A: int, B: int, L: int, stats: SweepStats, coprime_to: dict | None = None) -> None:
    """Every excursion invariant at one moduli point; failures go to stats."""
    stats.points += 1
    where = f"({A}/{L}, {B}/{L})"
    try:
        xs, _, sm = _walk(A, B, L, coprime_to is not None, True)
        _check_endpoints(A, B, L, sm)
    except (InvariantViolation, ZeroDivisionError) as exc:
        stats.violations.append({"moduli": where, "check": "construction", "error": str(exc)})
        return
    s = sm.length
    stats.steps += s
    if not s * A * B <= L * L or (s * A * B == L * L and not (A == B == L)):
        stats.violations.append({"moduli": where, "check": "s <= 1/(ab)", "s": s})
    if not reset_ok(A, B, sm.zeta_s2):
        stats.violations.append({"moduli": where, "check": "reset", "zeta_s": str(Fraction(sm.zeta_s2, 2))})
    if s >= 4:
        stats.monotonicity_cases += 1
        if not monotonicity_ok(A, B, L, sm):
            stats.violations.append({"moduli": where, "check": "monotonicity"})
    if coprime_to is not None:
        stats.oracle_cases += 1
        if _oracle_interior(A, B, L, coprime_to) != xs[1:s]:
            stats.violations.append({"moduli": where, "check": "primitive points", "s": s})


def exhaustive_sweep(max_den: int, oracle: bool = True) -> SweepStats:
    """Check all moduli points whose coordinates have denominators <= max_den."""
    fr = reduced_fractions(max_den)
    coprime_to = None
    if oracle:
        coprime_to = {u: [v for v in range(1, max_den + 1) if gcd(u, v) == 1]
                      for u in range(1, max_den + 1)}
    stats = SweepStats()
    for p1, q1 in fr:
        for p2, q2 in fr:
            L = q1 * q2 // gcd(q1, q2)
            check_moduli(p1 * (L // q1), p2 * (L // q2), L, stats, coprime_to)
    return stats


def random_moduli(rng, max_den: int) -> ModuliPoint:
    """Denominator uniform in [1, max_den], numerator uniform in [1, den]."""
    q1, q2 = rng.randint(1, max_den), rng.randint(1, max_den)
    return ModuliPoint(Fraction(rng.randint(1, q1), q1), Fraction(rng.randint(1, q2), q2))


def random_sweep(samples: int, max_den: int, rng) -> SweepStats:
    """Reset and monotonicity checks at random moduli points (no pair oracle)."""
    stats = SweepStats()
    for _ in range(samples):
        A, B, L = random_moduli(rng, max_den).numerators()
        check_moduli(A, B, L, stats)
    return stats
