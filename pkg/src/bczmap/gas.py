"""Generalized arithmetic sequences (GAS).

A positive sequence is a GAS when every interior term divides the sum of
its two neighbours, i.e. ``(a[i-1] + a[i+1]) / a[i]`` is a positive
integer. The cyclic variant wraps indices around. Indices in this module
are 0-based.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .dynamics import InvariantViolation
from .exact_core import as_fraction


class GasError(ValueError):
    """A sequence is not a (cyclic) GAS; ``index`` is the first failing position."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class GasSeq:
    terms: tuple
    cyclic: bool

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class ItinerarySeq:
    values: tuple


def _neighbours(n: int, i: int, cyclic: bool):
    if cyclic:
        return (i - 1) % n, (i + 1) % n
    return i - 1, i + 1


def _first_failure(a: Sequence[int], cyclic: bool) -> int | None:
    n = len(a)
    if cyclic and n >= 2:
        for i in range(n):
            if (a[i - 1] + a[(i + 1) % n]) % a[i]:
                return i
        return None
    for i in range(1, n - 1):
        if (a[i - 1] + a[i + 1]) % a[i]:
            return i
    return None


def _exact(x):
    return x if type(x) is int or type(x) is Fraction else as_fraction(x)


def validate_gas(seq: Iterable, cyclic: bool = False) -> GasSeq:
    """Check positivity and divisibility; terms may be ints or Fractions."""
    terms = tuple(_exact(t) for t in seq)
    for i, t in enumerate(terms):
        if t <= 0:
            raise GasError(f"term {i} is not positive: {t}", i)
    bad = _first_failure(_integer_terms(terms), cyclic)
    if bad is not None:
        n = len(terms)
        l, r = _neighbours(n, bad, cyclic)
        raise GasError(f"a[{bad}] = {terms[bad]} does not divide {terms[l]} + {terms[r]}", bad)
    return GasSeq(terms, cyclic)


def itinerary(seq: GasSeq) -> ItinerarySeq:
    """k_i = (a[i-1] + a[i+1]) / a[i] over the interior (every index when cyclic)."""
    n = len(seq)
    t = seq.terms
    if seq.cyclic:
        if n < 1:
            raise ValueError("empty sequence")
        idx = range(n)
    else:
        if n < 3:
            raise ValueError("a non-cyclic itinerary needs at least 3 terms")
        idx = range(1, n - 1)
    out = []
    for i in idx:
        l, r = _neighbours(n, i, seq.cyclic)
        out.append(int((t[l] + t[r]) / t[i]))
    return ItinerarySeq(tuple(out))


def _is_strict_max(t, i, cyclic) -> bool:
    n = len(t)
    if cyclic:
        if n < 2:
            return False
        return t[i] > t[(i - 1) % n] and t[i] > t[(i + 1) % n]
    return 0 < i < n - 1 and t[i] > t[i - 1] and t[i] > t[i + 1]


def find_local_maxima(seq: GasSeq) -> list[int]:
    """Strict local maxima; each must equal the sum of its two neighbours."""
    t = seq.terms
    n = len(t)
    out = []
    for i in range(n):
        if _is_strict_max(t, i, seq.cyclic):
            l, r = _neighbours(n, i, seq.cyclic)
            if t[i] != t[l] + t[r]:
                raise InvariantViolation("local maximum is not the sum of its neighbours",
                                         {"index": i, "terms": [str(x) for x in t[max(0, i - 2):i + 3]]})
            out.append(i)
    return out


def eliminate(seq: GasSeq, m: int) -> GasSeq:
    """Drop the local maximum at index m; the result must still be a GAS."""
    n = len(seq)
    if seq.cyclic:
        if n < 2:
            raise ValueError("cyclic elimination needs at least 2 terms")
    elif n < 3:
        raise ValueError("non-cyclic elimination needs at least 3 terms")
    if not _is_strict_max(seq.terms, m, seq.cyclic):
        raise ValueError(f"index {m} is not a local maximum")
    out = seq.terms[:m] + seq.terms[m + 1:]
    try:
        return validate_gas(out, seq.cyclic)
    except GasError as exc:
        raise InvariantViolation("closure failed after elimination",
                                 {"index": m, "failing": exc.index}) from exc


def _integer_terms(seq: Sequence) -> list[int]:
    """Scale rationals to integers; the k-quotients are scale invariant."""
    if all(type(x) is int for x in seq):
        return list(seq)
    fr = [Fraction(_exact(x)) for x in seq]
    den = 1
    for f in fr:
        den = den * f.denominator // gcd(den, f.denominator)
    return [f.numerator * (den // f.denominator) for f in fr]


def _k(l: int, m: int, r: int):
    s = l + r
    return s // m if s % m == 0 else Fraction(s, m)


def h_value(seq: Sequence) -> Fraction:
    """Sum of (k_{i+1} + k_i)/2 - 3 over the n-3 consecutive windows of four terms."""
    a = _integer_terms(seq)
    n = len(a)
    if n < 4:
        raise ValueError("h needs at least 4 terms")
    ks = [_k(a[i - 1], a[i], a[i + 1]) for i in range(1, n - 1)]
    return Fraction(sum(ks[:-1]) + sum(ks[1:]), 2) - 3 * (n - 3)


def h_hat_value(seq: Sequence) -> Fraction:
    """The cyclic version of h: n windows, indices taken mod n."""
    a = _integer_terms(seq)
    n = len(a)
    if n < 1:
        raise ValueError("h_hat needs at least 1 term")
    ks = [_k(a[i - 1], a[i], a[(i + 1) % n]) for i in range(n)]
    # window i pairs k_i with k_{i+1}; cyclically each k appears in two windows
    return Fraction(sum(ks[i] + ks[(i + 1) % n] for i in range(n)), 2) - 3 * n


def reduce_to_simplest(seq: GasSeq) -> tuple[GasSeq, Fraction]:
    """Eliminate largest strict local maxima until none is left.

    Cyclic input preserves h_hat. Non-cyclic input preserves h, and only
    terms with at least three others on each side are eligible; those six
    border terms never move, so eligibility is fixed up front. Ties go to
    the leftmost index. Each step checks the local-maximum identity and
    re-validates the two divisibility conditions it touches.
    """
    t = _integer_terms(seq.terms)
    n = len(t)
    cyclic = seq.cyclic
    if not cyclic and n < 4:
        raise ValueError("h needs at least 4 terms")
    prev = [(i - 1) % n for i in range(n)]
    nxt = [(i + 1) % n for i in range(n)]
    alive = [True] * n
    if cyclic:
        eligible = [True] * n
    else:
        eligible = [3 <= i <= n - 4 for i in range(n)]
    size = n

    def strict_max(i):
        if size < 2 or not eligible[i] or not alive[i]:
            return False
        return t[i] > t[prev[i]] and t[i] > t[nxt[i]]

    heap = [(-t[i], i) for i in range(n) if strict_max(i)]
    heapq.heapify(heap)
    while heap and size >= 2:
        _, m = heapq.heappop(heap)
        if not strict_max(m):
            continue
        l, r = prev[m], nxt[m]
        if t[m] != t[l] + t[r]:
            raise InvariantViolation("local maximum is not the sum of its neighbours",
                                     {"index": m, "value": str(t[m])})
        alive[m] = False
        nxt[l], prev[r] = r, l
        size -= 1
        for j in (l, r):
            if cyclic or 0 < j < n - 1:
                lj, rj = prev[j], nxt[j]
                if (t[lj] + t[rj]) % t[j]:
                    raise InvariantViolation("closure failed after elimination",
                                             {"eliminated": m, "failing": j})
            if strict_max(j):
                heapq.heappush(heap, (-t[j], j))
    out = validate_gas([seq.terms[i] for i in range(n) if alive[i]], cyclic)
    value = h_hat_value(out.terms) if cyclic else h_value(out.terms)
    return out, value


def negative_cf_from_cf(cf: Iterable[int], terminating: bool = True,
                        depth: int | None = None) -> list[int]:
    """Negative continued-fraction digits [b0; b1, ...] from a regular CF [a0; a1, ...].

    b0 = a0 + 1, then for each i >= 1: a_{2i-1} - 1 twos followed by
    a_{2i} + 2. With ``terminating=True`` the input is the full expansion
    of a rational: a final even-index digit a_{2i} contributes a_{2i} + 1
    and a final odd-index digit a_{2i-1} contributes a_{2i-1} - 1 twos.
    Otherwise the input is a prefix of an infinite expansion and only the
    digits it determines are emitted. ``depth`` caps the output length.
    """
    it = iter(cf)
    try:
        a0 = int(next(it))
    except StopIteration:
        raise ValueError("empty continued fraction") from None
    if a0 < 0:
        raise ValueError("a0 must be >= 0")
    out = [a0 + 1]
    rest = []
    for a in it:
        a = int(a)
        if a < 1:
            raise ValueError("partial quotients after a0 must be >= 1")
        rest.append(a)
        if depth is not None and len(rest) > 2 * depth:
            break
    if terminating and not rest:
        out[0] = a0
    pairs = len(rest) // 2
    for i in range(pairs):
        odd, even = rest[2 * i], rest[2 * i + 1]
        last = terminating and 2 * i + 2 == len(rest)
        out.extend([2] * (odd - 1))
        out.append(even + 1 if last else even + 2)
    if terminating and len(rest) % 2 == 1:
        out.extend([2] * (rest[-1] - 1))
    if depth is not None:
        out = out[:depth]
    return out


def negative_cf_value(ncf: Sequence[int]) -> Fraction:
    """b0 - 1/(b1 - 1/(... - 1/bn))."""
    v = Fraction(ncf[-1])
    for b in reversed(ncf[:-1]):
        v = b - 1 / v
    return v


def negative_cf_convergents(ncf: Sequence[int]) -> list[tuple[int, int]]:
    """Convergents (r_n, s_n) via r_{n+1} = b_{n+1} r_n - r_{n-1}.

    The denominators always form a GAS; the numerators do too when b0 >= 1
    (otherwise they are not all positive).
    """
    if not ncf:
        raise ValueError("empty negative continued fraction")
    for i, b in enumerate(ncf[1:], start=1):
        if b < 2:
            raise ValueError(f"digit b{i} = {b} < 2")
    r_prev, r = 1, ncf[0]
    s_prev, s = 0, 1
    out = [(r, s)]
    for b in ncf[1:]:
        r_prev, r = r, b * r - r_prev
        s_prev, s = s, b * s - s_prev
        out.append((r, s))
    validate_gas([s for _, s in out])
    if ncf[0] >= 1:
        validate_gas([r for r, _ in out])
    return out
