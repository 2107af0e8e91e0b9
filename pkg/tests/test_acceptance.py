"""Acceptance gate: one PASS/FAIL line per criterion in the pytest summary.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import math
import os
import random
import subprocess
import sys
from collections import Counter
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE
import oracles

from bczmap import cli, dynamics as dyn, excursions as exc, experiments as exp, gas
from bczmap.exact_core import FareyPoint
from bczmap.farey import denominator_stream, farey_length
from bczmap.stepfun import StepFunction


def record(cid, ok, detail):
    ACCEPTANCE.append((cid, bool(ok), detail))
    assert ok, f"criterion {cid}: {detail}"


# ---------------------------------------------------------------- 1: exact identities

def test_1a_theta_ends_at_minus_one():
    bad = [n for n in range(1, 201) if dyn.theta_abs_sum(n)[1] != -1]
    record("1a", not bad, f"theta_(A_n) = -1 for n in [1, 200]; failures {bad[:5]}")


def test_1b_iota_ends_at_zero():
    bad = [n for n in range(1, 201) if dyn.iota_series(n).terms[-1] != 0]
    s3 = dyn.iota_abs_sum(3)
    record("1b", not bad and s3 == Fraction(3, 2),
           f"iota_(A_n) = 0 for n in [1, 200] (failures {bad[:5]}); sum|iota| at n=3 is {s3}")


def test_1c_orbit_follows_farey_denominators():
    bad = []
    for n in range(1, 301):
        a_n = farey_length(n).a_n
        qs = list(denominator_stream(n))
        orbit = list(dyn.orbit_numerators(1, n, n, a_n + 1))
        follows = orbit[:a_n] == list(zip(qs, qs[1:]))
        periodic = orbit[a_n] == (1, n) and (1, n) not in orbit[1:a_n]
        if not (follows and periodic):
            bad.append(n)
    record("1c", not bad, f"orbit of (1/n, 1) walks F(n) with exact period A_n, n in [1, 300]; failures {bad[:5]}")


def test_1d_h_hat_both_routes():
    bad = []
    for n in range(1, 201):
        q = list(denominator_stream(n))[1:]
        direct = gas.h_hat_value(q)
        reduced, kept = gas.reduce_to_simplest(gas.validate_gas(q, cyclic=True))
        if not (direct == kept == -1 and reduced.terms == (1,)):
            bad.append((n, str(direct), str(kept)))
    record("1d", not bad, f"h_hat = -1 by window sum and by elimination, n in [1, 200]; failures {bad[:3]}")


def test_1e_reset_and_monotonicity():
    full = exc.exhaustive_sweep(60, oracle=False)
    rand = exc.random_sweep(10_000, 10_000, random.Random(20240611))
    bad = full.violations + rand.violations
    record("1e", not bad,
           f"exhaustive den<=60: {full.points} points, {full.monotonicity_cases} with s>=4; "
           f"random: {rand.points} points; violations {len(bad)}")


def test_1f_r_minus_khat():
    extra = [FareyPoint(x, y, n) for n in range(1, 41)
             for x, y in dyn.orbit_numerators(1, n, n, farey_length(n).a_n)]
    try:
        report = dyn.r_minus_khat_bounds_check(100_000, seed=1, extra=extra)
        ok, detail = True, f"{report.samples} points, {len(report.buckets)} (k, k^T) buckets, no violation"
    except dyn.InvariantViolation as err:
        ok, detail = False, f"{err} {err.witness}"
    record("1f", ok, "-1 <= R - khat < 2 plus per-case intervals: " + detail)


def _periodic_x_orbit(rng, max_den):
    den = rng.randint(2, max_den)
    p = dyn.random_triangle_point(rng, den)
    xs = []
    x, y = p.x_num, p.y_num
    while True:
        xs.append(x)
        x, y = y, dyn.itinerary(x, y, den) * y - x
        if (x, y) == (p.x_num, p.y_num):
            return xs


def test_1g_gas_elimination():
    rng = random.Random(7)
    failures = []
    for _ in range(1000):
        try:
            exp.check_orbit_gas(rng)
        except (dyn.InvariantViolation, gas.GasError) as err:
            failures.append(str(err))
    for _ in range(1000):
        seq = gas.validate_gas(_periodic_x_orbit(rng, 12), cyclic=True)
        before = gas.h_hat_value(seq.terms)
        while True:
            maxima = gas.find_local_maxima(seq)
            if not maxima or len(seq) < 2:
                break
            seq = gas.eliminate(seq, rng.choice(maxima))
            if gas.h_hat_value(seq.terms) != before:
                failures.append("h_hat changed")
                break
    record("1g", not failures,
           f"1000 open segments (h) and 1000 periodic orbits (h_hat) under random elimination; failures {len(failures)}")


# ---------------------------------------------------------------- 2, 3: sweeps

def test_2_theta_exponent():
    result = exp.run_sweep(exp.SweepConfig(exp.default_grid(), "theta_sum"))
    half = all(r["value_den"] in (1, 2) for r in result.rows)
    e = result.fit.exponent
    record("2", half and e <= 2.3,
           f"fitted exponent of sum|theta| over n=32..2048 is {e:.4f} (need <= 2.3); "
           f"values exact half-integers: {half}")


def test_3_iota_pipeline():
    result = exp.run_sweep(exp.SweepConfig([3] + exp.default_grid(), "iota_sum"))
    row3 = result.rows[0]
    n3 = Fraction(row3["value_num"], row3["value_den"]) == Fraction(3, 2)
    mismatch = [n for n in range(1, 101)
                if dyn.f_n_functional(dyn.return_time, n) != dyn.iota_abs_sum(n)]
    finite = result.fit is not None and math.isfinite(result.fit.max_residual)
    record("3", n3 and not mismatch and finite,
           f"n=3 row 3/2: {n3}; F_n(R) = sum|iota| for n <= 100 (mismatches {mismatch[:5]}); "
           f"fitted exponent {result.fit.exponent:.4f} (RH predicts 5/2, reported only), "
           f"max_residual {result.fit.max_residual:.3g}")


# ---------------------------------------------------------------- 4: excursion combinatorics

def test_4_excursion_combinatorics():
    fr = exc.reduced_fractions(60)
    bad = []
    points = 0
    for p1, q1 in fr:
        for p2, q2 in fr:
            e = exc.build_excursion(exc.ModuliPoint(Fraction(p1, q1), Fraction(p2, q2)))
            A, B, L = e.moduli.numerators()
            s = e.length
            pairs = oracles.coprime_pairs_brute(A, B, L)
            points += 1
            if (s - 1 != len(pairs) or s * A * B > L * L
                    or Counter(e.xs[1:s]) != Counter(u * A + v * B for u, v in pairs)):
                bad.append(str(e.moduli))
    record("4", not bad,
           f"{points} moduli points with den <= 60: s - 1 = brute coprime count, s <= 1/(ab), "
           f"interior = {{u a + v b}}; violations {len(bad)} {bad[:3]}")


# ---------------------------------------------------------------- 5: equidistribution

def test_5_equidistribution():
    f = StepFunction.parse("0,1/2,1/2,1,1")
    exact = f.integral()
    # a <= 1/2, 1 - a < b <= 1 has area 1/8, and dm = 2 da db
    assert exact == Fraction(1, 4)
    row = exp.equidistribution_check(f, 1, 1, [1024])[0]
    record("5", row.error <= 0.02,
           f"n=1024: empirical {float(row.value):.6f}, exact {exact}, error {row.error:.3g} (<= 0.02)")


# ---------------------------------------------------------------- 6: harness integrity

def test_6_verify_and_mutation(monkeypatch, capsys):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "bczmap", "verify", "--n-max", "50"],
                          capture_output=True, text=True, env=env)
    clean = proc.returncode
    real = dyn.itinerary
    monkeypatch.setattr(dyn, "itinerary", lambda x, y, den: real(x, y, den) + 1)
    mutated = cli.main(["verify", "--n-max", "50"])
    capsys.readouterr()
    record("6", clean == 0 and mutated != 0,
           f"verify --n-max 50 exit {clean}; with itinerary off by one exit {mutated}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
