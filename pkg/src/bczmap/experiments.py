"""Growth-exponent sweeps, the g_lambda family, condition probes,
equidistribution checks and the all-in-one verifier.

Exact values are computed per n; floats appear only in fits and reports.
"""
from __future__ import annotations

import csv
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

import numpy as np

from . import dynamics as _dyn
from . import excursions as _exc
from . import farey as _farey
from . import gas as _gas
from .dynamics import InvariantViolation
from .exact_core import FareyPoint, as_fraction
from .stepfun import StepFunction

MODES = ("theta_sum", "iota_sum", "f_n", "energy_diagonal")


# ---------------------------------------------------------------- g_lambda

class GLambda:
    """g_lambda at an orbit point (a0, a1), using a_{-1} from T^{-1} and a_2 from T.

    g = lam (a1/a0 + a0/a1) + (1 - lam)(a_{-1}/a0 + a2/a1) - 3.
    lam = 1/2 gives khat - 3 exactly; lam = 1 gives a/b + b/a - 3.
    """

    def __init__(self, lam):
        self.lam = as_fraction(lam)

    def __call__(self, p: FareyPoint) -> Fraction:
        x, y, d = p.x_num, p.y_num, p.den
        itin = _dyn.itinerary
        a_prev = itin(y, x, d) * x - y   # x-coordinate of T^{-1} p
        a_next = itin(x, y, d) * y - x   # y-coordinate of T p
        lam = self.lam
        return (lam * (Fraction(y, x) + Fraction(x, y))
                + (1 - lam) * (Fraction(a_prev, x) + Fraction(a_next, y)) - 3)

    def __repr__(self):
        return f"GLambda({self.lam})"


def g_lambda(lam) -> GLambda:
    return GLambda(lam)


def r_minus_g1(p: FareyPoint) -> Fraction:
    """R - (a/b + b/a - 3) = (1 - a^2 - b^2)/(ab) + 3, which lies in [2, 5)."""
    x, y, d = p.x_num, p.y_num, p.den
    return Fraction(d * d - x * x - y * y, x * y) + 3


def r_minus_inverse_sum(p: FareyPoint) -> Fraction:
    """R - (1/a + 1/b) = (1 - a - b)/(ab), which lies in [-1, 0)."""
    x, y, d = p.x_num, p.y_num, p.den
    return Fraction(d * (d - x - y), x * y)


# ---------------------------------------------------------------- fitting

@dataclass
class FitReport:
    points: list
    exponent: float
    intercept: float
    max_residual: float
    dropped_small: int = 0
    dropped_nonpositive: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def fit_power_law(xs: Sequence[float], ys: Sequence[float],
                  drop_below: float | None = None) -> FitReport:
    """Least-squares line through (log x, log y).

    Points with x < drop_below, and points with y <= 0 (no logarithm), are
    left out and counted in the report.
    """
    pts = []
    small = nonpos = 0
    for x, y in zip(xs, ys):
        if drop_below is not None and x < drop_below:
            small += 1
        elif y <= 0 or x <= 0:
            nonpos += 1
        else:
            pts.append((math.log(x), math.log(y)))
    if len(pts) < 2:
        raise ValueError(f"need at least two usable points to fit, have {len(pts)}")
    lx = np.array([p[0] for p in pts])
    ly = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return FitReport([list(p) for p in pts], float(slope), float(intercept),
                     float(np.max(np.abs(resid))), small, nonpos)


# ---------------------------------------------------------------- sweeps

def default_grid(start: int = 32, stop: int = 2048, ratio: float = 1.5) -> list[int]:
    out = []
    k = 0
    while True:
        n = round(start * ratio ** k)
        if n > stop:
            break
        if not out or n > out[-1]:
            out.append(n)
        k += 1
    if out[-1] != stop:
        out.append(stop)
    return out


def parse_grid(spec: str) -> list[int]:
    """``default``, ``geom:start:stop:ratio`` or a comma list like ``3,5,8``."""
    spec = spec.strip()
    if spec == "default":
        return default_grid()
    if spec.startswith("geom:"):
        try:
            _, a, b, r = spec.split(":")
            return default_grid(int(a), int(b), float(r))
        except ValueError:
            raise ValueError(f"bad geometric grid {spec!r}; want geom:start:stop:ratio") from None
    try:
        return [int(t) for t in spec.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"bad grid {spec!r}") from None


@dataclass
class SweepConfig:
    n_values: list
    mode: str = "theta_sum"
    function: str = "khat"
    output_path: str | None = None
    parallelism: int = 1
    drop_below: float | None = 30

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        ns = list(self.n_values)
        if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_values must be strictly increasing and >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        resolve_function(self.function)  # fail early on a bad name


def resolve_function(name: str) -> Callable:
    """``R``, ``khat``, ``g-lambda=<lam>`` (or ``g_lambda=``), or ``step:<spec>``."""
    if name == "R":
        return _dyn.return_time
    if name == "khat":
        return _dyn.khat
    for prefix in ("g-lambda=", "g_lambda="):
        if name.startswith(prefix):
            try:
                return GLambda(name[len(prefix):])
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad lambda in {name!r}") from None
    if name.startswith("step:"):
        return StepFunction.parse(name[5:])
    raise ValueError(f"unknown function {name!r}")


def _energy_diagonal(function: str, n: int) -> Fraction:
    m = _exc.ModuliPoint(Fraction(1, n), Fraction(1, n))
    if function == "khat":
        return _exc.build_excursion(m).energy
    g = resolve_function(function)
    if function == "R":
        centre = Fraction(n * n, _farey.farey_length(n).a_n)
        return _exc.energy(lambda p: g(p) - centre, m)
    return _exc.energy(g, m)


def compute_value(mode: str, function: str, n: int) -> Fraction:
    if mode == "theta_sum":
        return _dyn.theta_abs_sum(n)[0]
    if mode == "iota_sum":
        return _dyn.iota_abs_sum(n)
    if mode == "f_n":
        return _dyn.f_n_functional(resolve_function(function), n)
    if mode == "energy_diagonal":
        return _energy_diagonal(function, n)
    raise ValueError(f"unknown mode {mode!r}")


def _row_job(args):
    mode, function, n = args
    value = compute_value(mode, function, n)
    return {"n": n, "A_n": _farey.farey_length(n).a_n,
            "value_num": value.numerator, "value_den": value.denominator,
            "value_float": float(value)}


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list
    fit: FitReport | None
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def as_dict(self) -> dict:
        cfg = asdict(self.config)
        return {"config": cfg, "rows": self.rows,
                "fit": self.fit.as_dict() if self.fit else None,
                "timestamp": self.timestamp}


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Exact value per n, then a log-log fit. Rows come back ordered by n."""
    jobs = [(cfg.mode, cfg.function, n) for n in cfg.n_values]
    if cfg.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            rows = list(pool.map(_row_job, jobs))
    else:
        rows = [_row_job(j) for j in jobs]
    rows.sort(key=lambda r: r["n"])
    try:
        fit = fit_power_law([r["n"] for r in rows], [r["value_float"] for r in rows],
                            cfg.drop_below)
    except ValueError:
        fit = None
    result = SweepResult(cfg, rows, fit)
    if cfg.output_path:
        write_result(result, cfg.output_path)
    return result


CSV_COLUMNS = ("n", "A_n", "value_num", "value_den", "value_float")


def write_csv(rows, path_or_file) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r[c] if c != "value_float" else repr(r[c]) for c in CSV_COLUMNS])
    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


def write_result(result: SweepResult, path: str) -> None:
    """JSON when the path ends in .json, CSV otherwise."""
    if path.endswith(".json"):
        with open(path, "w") as fh:
            json.dump(result.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        write_csv(result.rows, path)


# ---------------------------------------------------------------- condition probe

@dataclass
class ProbeReport:
    alpha: float
    raw_slope: float | None
    c1: float
    violations: int
    samples: int
    held_out: int


def _sample_ratio_moduli(rng: random.Random, max_den: int, max_len: int):
    """Moduli points spread log-uniformly in the endpoint ratio, with 1/(ab) <= max_len."""
    while True:
        q = rng.randint(2, max_den)
        small = rng.randint(1, q)
        ratio = math.exp(rng.uniform(0, math.log(max_den)))
        big = min(q, max(1, round(small * ratio)))
        A, B = (small, big) if rng.random() < 0.5 else (big, small)
        if q * q <= max_len * A * B:
            return _exc.ModuliPoint(Fraction(A, q), Fraction(B, q))


def condition_probe_alpha(g: Callable | None, samples: int, seed: int = 0,
                          max_den: int = 2000, max_len: int = 4000,
                          min_alpha: float = 1.0, fit_from: float = 32.0,
                          bins: int = 10) -> ProbeReport:
    """Empirical exponent alpha in |zeta_s| < C1 (rho^alpha + rho^-alpha).

    alpha is the log-log slope of the upper envelope of |zeta_s| against
    rho + 1/rho (binned maxima, ratios with rho + 1/rho >= fit_from), floored
    at min_alpha. C1 is the largest ratio on the even-indexed samples and
    violations are counted on the odd-indexed ones. ``g=None`` means khat - 3.
    """
    rng = random.Random(seed)
    data = []
    for _ in range(samples):
        m = _sample_ratio_moduli(rng, max_den, max_len)
        e = _exc.build_excursion(m)
        if g is None:
            total = e.zeta_s
        else:
            total = sum(_exc.excursion_values(g, e), Fraction(0))
        rho = m.b / m.a
        data.append((float(rho), abs(float(total))))
    held = data[1::2]
    if all(z == 0 for _, z in data):
        return ProbeReport(min_alpha, None, 0.0, 0, len(data), len(held))
    pts = sorted((math.log(r + 1 / r), z) for r, z in data if r + 1 / r >= fit_from and z > 0)
    slope = None
    if len(pts) >= 2 * bins:
        size = len(pts) // bins
        env = []
        for b in range(bins):
            chunk = pts[b * size:(b + 1) * size] if b < bins - 1 else pts[b * size:]
            lx, z = max(chunk, key=lambda t: t[1])
            env.append((lx, math.log(z)))
        slope = float(np.polyfit([p[0] for p in env], [p[1] for p in env], 1)[0])
    alpha = max(min_alpha, slope) if slope is not None else min_alpha

    def scale(r):
        return r ** alpha + r ** -alpha

    c1 = max(z / scale(r) for r, z in data[0::2])
    violations = sum(1 for r, z in held if z > c1 * scale(r) * (1 + 1e-12))
    return ProbeReport(alpha, slope, c1, violations, len(data), len(held))


# ---------------------------------------------------------------- equidistribution

@dataclass
class EquidistRow:
    n: int
    length: int
    value: Fraction
    exact: Fraction | None
    error: float | None


def equidistribution_check(f, p: int, q: int, n_values: Sequence[int],
                           exact: Fraction | None = None) -> list[EquidistRow]:
    """(pq/A_n) * sum of f over the excursion of (q/n, p/n), against its limit.

    The limit is the exact integral when f is a StepFunction, else ``exact``.
    """
    if gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime, got ({p}, {q})")
    if exact is None and isinstance(f, StepFunction):
        exact = f.integral()
    rows = []
    for n in n_values:
        if n <= max(p, q):
            raise ValueError(f"n must exceed max(p, q); got n={n}")
        start, s = _exc.start_and_length(_exc.ModuliPoint(Fraction(q, n), Fraction(p, n)))
        pts = _dyn.orbit_numerators(start.x_num, start.y_num, start.den, s)
        if isinstance(f, StepFunction):
            total = f.sum_over(pts, start.den)
        else:
            total = sum((f(FareyPoint(x, y, start.den)) for x, y in pts), Fraction(0))
        value = Fraction(p * q, _farey.farey_length(n).a_n) * total
        err = abs(float(value - exact)) if exact is not None else None
        rows.append(EquidistRow(n, s, value, exact, err))
    return rows


# ---------------------------------------------------------------- verify_all

def _check_farey(n_max):
    for n in range(1, n_max + 1):
        a_n = _farey.farey_length(n).a_n
        prev = None
        count = 0
        for f in _farey.farey_stream(n):
            count += 1
            if prev is not None and prev.q * f.p - prev.p * f.q != 1:
                raise InvariantViolation("Farey neighbours not unimodular", {"n": n, "index": f.index})
            prev = f
        if count != a_n + 1:
            raise InvariantViolation("Farey count differs from the totient sum",
                                     {"n": n, "count": count, "A_n": a_n})
        qs = [f.q for f in _farey.farey_stream(n)]
        if list(_farey.denominator_stream(n)) != qs or qs != qs[::-1]:
            raise InvariantViolation("denominator stream mismatch or asymmetry", {"n": n})


def _check_orbit(n_max):
    for n in range(1, n_max + 1):
        a_n = _farey.farey_length(n).a_n
        qs = list(_farey.denominator_stream(n))
        got = list(_dyn.orbit_numerators(1, n, n, a_n + 1))
        want = list(zip(qs, qs[1:] + [n]))
        if got != want:
            i = next(i for i, (g, w) in enumerate(zip(got, want)) if g != w)
            raise InvariantViolation("orbit of (1/n, 1) does not follow the Farey denominators",
                                     {"n": n, "step": i, "got": list(got[i]), "want": list(want[i])})
        if any(x == 1 and y == n for x, y in got[1:a_n]):
            raise InvariantViolation("orbit returned before A_n steps", {"n": n})


def _check_theta_iota(n_max):
    hand = [Fraction(1, 2), Fraction(-1, 2), Fraction(-3, 2), Fraction(-1)]
    if [t.to_fraction() for t in _dyn.theta_series(3).terms] != hand:
        raise InvariantViolation("theta series for n = 3 differs from the hand values",
                                 {"got": [str(t) for t in _dyn.theta_series(3).terms]})
    for n in range(1, n_max + 1):
        total, last = _dyn.theta_abs_sum(n)
        if last != -1:
            raise InvariantViolation("theta_{A_n} != -1", {"n": n, "theta_last": str(last)})
        if n <= 60 and _dyn.iota_series(n).terms[-1] != 0:
            raise InvariantViolation("iota_{A_n} != 0", {"n": n})
    if _dyn.iota_abs_sum(3) != Fraction(3, 2):
        raise InvariantViolation("sum |iota| for n = 3 is not 3/2", {})
    for n in range(1, min(n_max, 30) + 1):
        if _dyn.f_n_functional(_dyn.return_time, n) != _dyn.iota_abs_sum(n):
            raise InvariantViolation("F_n(R) differs from sum |iota|", {"n": n})


def _check_cocycle(n_max, rng):
    for _ in range(40):
        n = rng.randint(1, n_max)
        a_n = _farey.farey_length(n).a_n
        i1, i2 = rng.randint(0, 2 * a_n), rng.randint(0, 2 * a_n)
        lhs, rhs = _dyn.cocycle(n, i1, i2, _dyn.periodic_start(n))
        if lhs != rhs:
            raise InvariantViolation("cocycle identity failed", {"n": n, "i1": i1, "i2": i2})


def _check_excursions(n_max):
    stats = _exc.exhaustive_sweep(min(n_max, 24), oracle=True)
    if stats.violations:
        raise InvariantViolation("excursion sweep found violations", stats.as_dict())
    for n in range(1, n_max + 1):
        e = _exc.build_excursion(_exc.ModuliPoint(Fraction(1, n), Fraction(1, n)))
        if e.length != _farey.farey_length(n).a_n or e.zeta_s != -1:
            raise InvariantViolation("diagonal excursion is not the full period",
                                     {"n": n, "s": e.length, "zeta_s": str(e.zeta_s)})
        if e.energy != _dyn.theta_abs_sum(n)[0]:
            raise InvariantViolation("E(1/n, 1/n) differs from sum |theta|", {"n": n})
    for n in range(1, min(n_max, 40) + 1):
        for i in range(1, n + 1):
            _exc.theta_reset_at_r_i(n, i)


def _check_gas(n_max, rng):
    for n in range(1, n_max + 1):
        q = list(_farey.denominator_stream(n))[1:]
        seq = _gas.validate_gas(q, cyclic=True)
        direct = _gas.h_hat_value(q)
        reduced, kept = _gas.reduce_to_simplest(seq)
        if not (direct == kept == -1) or reduced.terms != (1,):
            raise InvariantViolation("h_hat of the Farey denominators is not -1 both ways",
                                     {"n": n, "direct": str(direct), "reduced": str(kept)})
    for _ in range(100):
        check_orbit_gas(rng)


def orbit_segment(rng: random.Random, max_den: int = 500, max_len: int = 60) -> list[int]:
    p = _dyn.random_triangle_point(rng, rng.randint(2, max_den))
    length = rng.randint(4, max_len)
    return [x for x, _ in _dyn.orbit_numerators(p.x_num, p.y_num, p.den, length)]


def check_orbit_gas(rng: random.Random) -> None:
    """Eliminate maxima of an orbit x-segment one at a time, checking closure and h."""
    seq = _gas.validate_gas(orbit_segment(rng))
    while True:
        n = len(seq)
        window = [m for m in _gas.find_local_maxima(seq) if 3 <= m <= n - 4]
        if not window:
            break
        m = rng.choice(window)
        before = _gas.h_value(seq.terms)
        seq = _gas.eliminate(seq, m)
        if _gas.h_value(seq.terms) != before:
            raise InvariantViolation("h changed under elimination", {"index": m})


def _check_bounds(n_max, rng):
    pts = [_dyn.random_triangle_point(rng) for _ in range(2000)]
    for n in range(1, n_max + 1):
        pts.extend(FareyPoint(x, y, n) for x, y in
                   _dyn.orbit_numerators(1, n, n, _farey.farey_length(n).a_n))
    half = GLambda(Fraction(1, 2))
    for p in pts:
        _dyn.check_r_minus_khat(p)
        d1 = r_minus_g1(p)
        if not 2 <= d1 < 5:
            raise InvariantViolation("R - g_1 outside [2, 5)", {"point": str(p), "value": str(d1)})
        d2 = r_minus_inverse_sum(p)
        if not -1 <= d2 < 0:
            raise InvariantViolation("R - (1/a + 1/b) outside [-1, 0)", {"point": str(p)})
        if half(p) != _dyn.khat_minus_3(p):
            raise InvariantViolation("g_{1/2} differs from khat - 3", {"point": str(p)})


def _check_g1_telescoping(n_max):
    g1 = GLambda(1)
    for pa, qa in _exc.reduced_fractions(min(n_max, 10)):
        for pb, qb in _exc.reduced_fractions(min(n_max, 10)):
            m = _exc.ModuliPoint(Fraction(pa, qa), Fraction(pb, qb))
            e = _exc.build_excursion(m)
            total = sum(_exc.excursion_values(g1, e), Fraction(0))
            if total != m.a / m.b + m.b / m.a - 3:
                raise InvariantViolation("g_1 does not telescope over the excursion",
                                         {"moduli": str(m), "total": str(total)})


def verify_all(n_max: int, seed: int = 0) -> tuple[int, dict]:
    """Run every checker up to n_max; exit code 0 iff all pass."""
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    rng = random.Random(seed)
    checks = [
        ("farey", lambda: _check_farey(n_max)),
        ("orbit_correspondence", lambda: _check_orbit(n_max)),
        ("theta_iota", lambda: _check_theta_iota(n_max)),
        ("cocycle", lambda: _check_cocycle(n_max, rng)),
        ("excursions", lambda: _check_excursions(n_max)),
        ("gas", lambda: _check_gas(n_max, rng)),
        ("bounds", lambda: _check_bounds(n_max, rng)),
        ("g1_telescoping", lambda: _check_g1_telescoping(n_max)),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        entry = {"name": name, "ok": True}
        try:
            fn()
        except InvariantViolation as exc:
            entry.update(ok=False, error=str(exc), witness=exc.witness)
        except Exception as exc:  # a broken map can fail in many ways
            entry.update(ok=False, error=f"{type(exc).__name__}: {exc}", witness={})
        entry["seconds"] = round(time.perf_counter() - t0, 3)
        results.append(entry)
    ok = all(r["ok"] for r in results)
    return (0 if ok else 1), {"n_max": n_max, "seed": seed, "ok": ok, "checks": results}
