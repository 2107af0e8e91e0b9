"""Streaming Farey sequences of order n and their length A_n."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

MAX_ORDER = 2 ** 31

# |A_n - 3n^2/pi^2| <= WALFISZ_C * n log n (log log n)^{4/3} for n >= WALFISZ_FROM.
# Fitted on n <= 2*10^5, where the worst ratio is about 0.166 (at n = 19).
WALFISZ_C = 0.2
WALFISZ_FROM = 16


class FareyFraction(NamedTuple):
    p: int
    q: int
    index: int


@dataclass(frozen=True)
class FareyLength:
    n: int
    a_n: int


def _check_order(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"Farey order must be an integer >= 1, got {n!r}")
    if n > MAX_ORDER:
        raise ValueError(f"Farey order {n} exceeds the supported maximum 2**31")


def farey_stream(n: int) -> Iterator[FareyFraction]:
    """Yield 0/1, 1/n, ..., 1/1 in increasing order using O(1) memory."""
    _check_order(n)
    p0, q0, p1, q1 = 0, 1, 1, n
    yield FareyFraction(p0, q0, 0)
    i = 1
    while True:
        yield FareyFraction(p1, q1, i)
        if p1 == 1 and q1 == 1:
            return
        k = (n + q0) // q1
        p0, q0, p1, q1 = p1, q1, k * p1 - p0, k * q1 - q0
        i += 1


def denominator_stream(n: int) -> Iterator[int]:
    """Denominators q_0 = 1, q_1 = n, ..., q_{A_n} = 1 of the order-n sequence."""
    _check_order(n)
    q0, q1 = 1, n
    yield q0
    while True:
        yield q1
        if q1 == 1:
            return
        q0, q1 = q1, ((n + q0) // q1) * q1 - q0


def totients(n: int) -> list[int]:
    """Euler phi(0..n) by an Eratosthenes-style sieve, O(n log log n)."""
    phi = list(range(n + 1))
    for p in range(2, n + 1):
        if phi[p] == p:  # p is prime: nothing smaller has touched it yet
            for m in range(p, n + 1, p):
                phi[m] -= phi[m] // p
    return phi


def farey_length(n: int) -> FareyLength:
    """A_n = sum_{k<=n} phi(k), the number of terms of order n minus one."""
    _check_order(n)
    return FareyLength(n, sum(totients(n)[1:]))


def walfisz_ratio(n: int) -> float:
    """|A_n - 3n^2/pi^2| / (n log n (log log n)^{4/3}), meaningful for n >= 16."""
    if n < WALFISZ_FROM:
        raise ValueError(f"the Walfisz scale needs n >= {WALFISZ_FROM}")
    a_n = farey_length(n).a_n
    scale = n * math.log(n) * math.log(math.log(n)) ** (4 / 3)
    return abs(a_n - 3 * n * n / math.pi ** 2) / scale
