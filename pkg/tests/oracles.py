"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package: each function recomputes its answer
from definitions (sorting, brute-force gcd scans, Fraction floors).
"""
from fractions import Fraction
from math import floor, gcd


def farey_brute(n):
    return sorted({Fraction(p, q) for q in range(1, n + 1) for p in range(q + 1)})


def totient_sum_brute(n):
    return sum(1 for k in range(1, n + 1) for j in range(1, k + 1) if gcd(j, k) == 1)


def bcz(a, b):
    k = floor((1 + a) / b)
    return b, k * b - a


def khat_brute(a, b):
    return Fraction(floor((1 + a) / b) + floor((1 + b) / a), 2)


def theta_brute(n):
    qs = [f.denominator for f in farey_brute(n)]
    out, acc = [], Fraction(0)
    for i in range(len(qs) - 1):
        acc += khat_brute(Fraction(qs[i], n), Fraction(qs[i + 1], n)) - 3
        out.append(acc)
    return out


def iota_brute(n):
    fr = farey_brute(n)
    a_n = len(fr) - 1
    return [n * n * (fr[i] - Fraction(i, a_n)) for i in range(1, a_n + 1)]


def excursion_brute(a, b):
    """x-coordinates a_0..a_s of the excursion from a to b, by Fraction iteration."""
    b0 = b + floor((1 - b) / a) * a
    xs = [a]
    x, y = a, b0
    while True:
        x, y = bcz(x, y)
        xs.append(x)
        if x == b:
            return xs


def coprime_pairs_brute(A, B, L):
    """All coprime (u, v) >= 1 with u*A + v*B <= L, by a gcd scan under the line."""
    return [(u, v) for u in range(1, L // A + 1) for v in range(1, (L - u * A) // B + 1)
            if gcd(u, v) == 1]


def h_brute(seq):
    a = [Fraction(x) for x in seq]
    n = len(a)
    total = Fraction(0)
    # 1-based window i = 2..n-2 uses a_{i-1}..a_{i+2}
    for i in range(1, n - 2):
        k1 = (a[i - 1] + a[i + 1]) / a[i]
        k2 = (a[i] + a[i + 2]) / a[i + 1]
        total += (k1 + k2) / 2 - 3
    return total


def h_hat_brute(seq):
    a = [Fraction(x) for x in seq]
    n = len(a)
    ks = [(a[i - 1] + a[(i + 1) % n]) / a[i] for i in range(n)]
    return sum((k - 3 for k in ks), Fraction(0))


def clipped_area(x0, x1, y0, y1):
    """Area of [x0,x1] x [y0,y1] inside 0 <= a, b <= 1, a + b >= 1.

    Sutherland-Hodgman clipping of the rectangle by each half-plane, then
    the shoelace formula, all in Fractions.
    """
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    planes = [lambda p: p[0], lambda p: 1 - p[0], lambda p: p[1], lambda p: 1 - p[1],
              lambda p: p[0] + p[1] - 1]
    for side in planes:
        out = []
        for i, cur in enumerate(poly):
            prev = poly[i - 1]
            sc, sp = side(cur), side(prev)
            if (sc >= 0) != (sp >= 0):
                t = sp / (sp - sc)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            if sc >= 0:
                out.append(cur)
        poly = out
        if not poly:
            return Fraction(0)
    twice = sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(poly, poly[1:] + poly[:1]))
    return abs(Fraction(twice)) / 2
