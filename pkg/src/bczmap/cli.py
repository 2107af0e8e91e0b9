"""Command-line front end.

Exit codes: 0 success, 1 invariant violation (witness JSON on stderr),
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import dynamics as dyn
from . import excursions as exc
from . import experiments as exp
from .dynamics import InvariantViolation
from .exact_core import FareyPoint, as_fraction
from .farey import farey_length, farey_stream
from .stepfun import StepFunction


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _emit(args, payload: dict, rows=None, columns=None, text=None):
    out = sys.stdout
    if args.json:
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
    elif args.csv and rows is not None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    else:
        out.write(text if text is not None else json.dumps(payload, indent=2) + "\n")


def cmd_farey(args):
    a_n = farey_length(args.n).a_n
    fracs = list(farey_stream(args.n))
    rows = [(f.index, f.p, f.q) for f in fracs]
    text = f"A_{args.n} = {a_n}\n" + "".join(f"{f.index}\t{f.p}/{f.q}\n" for f in fracs)
    _emit(args, {"n": args.n, "A_n": a_n, "fractions": [f"{f.p}/{f.q}" for f in fracs]},
          rows, ("index", "p", "q"), text)
    return 0


def cmd_orbit(args):
    p = FareyPoint(args.a_num, args.b_num, args.den)
    if args.steps < 0:
        raise UsageError("steps must be >= 0")
    rows = []
    for i, rec in enumerate(dyn.orbit_stream(p, args.steps)):
        rows.append((i, str(rec.point.a), str(rec.point.b), rec.k, rec.k_t, str(rec.k_hat), str(rec.r)))
    cols = ("i", "a", "b", "k", "k_t", "k_hat", "R")
    text = "".join("\t".join(map(str, r)) + "\n" for r in rows)
    _emit(args, {"start": str(p), "steps": [dict(zip(cols, r)) for r in rows]}, rows, cols, text)
    return 0


def _series_cmd(args, kind):
    n = args.n
    if kind == "theta":
        total, last = dyn.theta_abs_sum(n)
        series = dyn.theta_series(n).terms if args.series else None
    else:
        total = dyn.iota_abs_sum(n)
        last = Fraction(0)
        series = dyn.iota_series(n).terms if args.series else None
        if series is not None:
            last = series[-1]
    a_n = farey_length(n).a_n
    payload = {"n": n, "A_n": a_n, "abs_sum": str(total), f"{kind}_last": str(last),
               "abs_sum_float": float(total)}
    if series is not None:
        payload["series"] = [str(t) for t in series]
    rows = [(i + 1, str(t)) for i, t in enumerate(series)] if series is not None else None
    text = f"n={n} A_n={a_n} sum|{kind}|={total} ({float(total):.6g}) {kind}_A_n={last}\n"
    if series is not None:
        text += "".join(f"{i}\t{t}\n" for i, t in rows)
    _emit(args, payload, rows, ("i", kind), text)
    return 0


def cmd_excursion(args):
    m = exc.ModuliPoint(args.a, args.b)
    e = exc.build_excursion(m, verify_interior=args.verify_interior)
    lo, z, hi = exc.reset_sum_check(e)
    s, ratio = e.length, e.length * float(m.a * m.b) * 3.14159265358979 ** 2 / 3
    payload = {"moduli": [str(m.a), str(m.b)], "length": s, "start": str(e.start),
               "zeta_s": str(z), "reset_interval": [str(lo), str(hi)],
               "energy": str(e.energy), "length_ratio": ratio,
               "monotone": exc.monotonicity_check(e) if s >= 4 else None,
               "verified_interior": args.verify_interior}
    if e.materialized and s <= 10_000:
        payload["x"] = [str(e.x(i)) for i in range(s + 1)]
        payload["zeta"] = [str(t) for t in e.zeta]
    text = (f"excursion {m}: s={s}, start={e.start}, zeta_s={z} in ({lo}, {hi}), "
            f"E={e.energy}, monotone={payload['monotone']}\n")
    _emit(args, payload, text=text)
    return 0


def cmd_energy(args):
    m = exc.ModuliPoint(args.a, args.b)
    if args.function == "khat":
        f = None
    else:
        f = exp.resolve_function(args.function)
    value = exc.energy(f, m)
    payload = {"moduli": [str(m.a), str(m.b)], "function": args.function,
               "energy": str(value), "energy_float": float(value)}
    _emit(args, payload, text=f"E({args.function}; {m.a}, {m.b}) = {value}\n")
    return 0


def cmd_sweep(args):
    cfg = exp.SweepConfig(exp.parse_grid(args.grid), args.mode, args.function,
                          args.out, args.parallel, args.drop_below)
    result = exp.run_sweep(cfg)
    if args.json:
        json.dump(result.as_dict(), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    elif args.csv:
        exp.write_csv(result.rows, sys.stdout)
    else:
        for r in result.rows:
            print(f"{r['n']}\t{r['A_n']}\t{r['value_num']}/{r['value_den']}\t{r['value_float']:.6g}")
        if result.fit:
            f = result.fit
            print(f"exponent {f.exponent:.4f}  intercept {f.intercept:.4f}  "
                  f"max_residual {f.max_residual:.3g}  (dropped {f.dropped_small} small n)")
    return 0


def cmd_equidist(args):
    f = StepFunction.parse(args.f)
    ns = exp.parse_grid(args.n)
    rows = exp.equidistribution_check(f, args.p, args.q, ns)
    cols = ("n", "length", "value", "value_float", "exact", "error")
    table = [(r.n, r.length, str(r.value), float(r.value), str(r.exact), r.error) for r in rows]
    payload = {"p": args.p, "q": args.q, "f": args.f, "exact": str(f.integral()),
               "rows": [dict(zip(cols, t)) for t in table]}
    text = "".join(f"n={t[0]} s={t[1]} value={t[3]:.6f} exact={t[4]} error={t[5]:.3g}\n" for t in table)
    _emit(args, payload, table, cols, text)
    return 0


def cmd_verify(args):
    code, summary = exp.verify_all(args.n_max, seed=args.seed)
    if args.json:
        json.dump(summary, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        for c in summary["checks"]:
            print(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']:<22} {c['seconds']:.2f}s")
    if code:
        failed = [c for c in summary["checks"] if not c["ok"]]
        json.dump({"failures": failed}, sys.stderr, default=str)
        sys.stderr.write("\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--csv", action="store_true", help="emit CSV where tabular")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    parser = argparse.ArgumentParser(prog="bczmap", description="Exact BCZ-map and Farey experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("farey", parents=[common], help="list the Farey sequence of order n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_farey)

    p = sub.add_parser("orbit", parents=[common], help="iterate the map from (a_num/den, b_num/den)")
    for name in ("a_num", "b_num", "den", "steps"):
        p.add_argument(name, type=int)
    p.set_defaults(func=cmd_orbit)

    for kind in ("theta", "iota"):
        p = sub.add_parser(kind, parents=[common], help=f"sum of |{kind}_i| over the period")
        p.add_argument("n", type=int)
        p.add_argument("--series", action="store_true", help="also print every term")
        p.set_defaults(func=lambda a, k=kind: _series_cmd(a, k))

    p = sub.add_parser("excursion", parents=[common], help="build the excursion of (a, b)")
    p.add_argument("a", type=_rational)
    p.add_argument("b", type=_rational)
    p.add_argument("--verify-interior", action="store_true", help="full depth and pair-count validation")
    p.set_defaults(func=cmd_excursion)

    p = sub.add_parser("energy", parents=[common], help="energy E(f; a, b)")
    p.add_argument("a", type=_rational)
    p.add_argument("b", type=_rational)
    p.add_argument("--function", default="khat", help="khat | g-lambda=<lam> | R | step:<spec>")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("sweep", parents=[common], help="exact values over a grid of n plus a power-law fit")
    p.add_argument("--mode", required=True, choices=exp.MODES)
    p.add_argument("--grid", default="default", help="default | geom:start:stop:ratio | n1,n2,...")
    p.add_argument("--out", default=None, help="output file (.json for JSON, otherwise CSV)")
    p.add_argument("--function", default="khat")
    p.add_argument("--parallel", type=int, default=1, metavar="K")
    p.add_argument("--drop-below", type=float, default=30, metavar="N")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("equidist", parents=[common], help="excursion averages of a step function")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--f", required=True, help="x0,x1,y0,y1,value;...")
    p.add_argument("--n", default="64,128,256,512,1024", help="grid of n values")
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser("verify", parents=[common], help="run every invariant check up to n-max")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as err:
        json.dump({"error": str(err), "witness": err.witness}, sys.stderr, default=str)
        sys.stderr.write("\n")
        return 1
    except (UsageError, ValueError, TypeError, ZeroDivisionError) as err:
        print(f"bczmap: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
