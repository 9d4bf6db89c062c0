"""Command-line interface: ``bihelm coeffs|check|constraints|plate``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .coords import CatalogEntry, lookup
from .geometry import Metric, MetricError, bilaplacian_coeffs, load_metric
from .plate import (
    ModeAmplitude, PlateConfig, PlateError, find_roots, make_mode, mode_field, pde_residual,
    polar_grid,
)
from .separation import (
    LAMBDA, ConstraintSet, SeparationError, apply_Di, check_constraints, expected_witness,
    load_constraints, regular_obstruction, sample_point, seeded_rng,
)
from .symbolic import Const, Expr, SymbolicError, evaluate, to_text

EXIT_OK, EXIT_ERROR, EXIT_CONDITIONAL, EXIT_FAIL = 0, 1, 2, 3


class CliError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _round(x):
    if isinstance(x, float):
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _dump_json(data) -> str:
    return json.dumps(_round(data), sort_keys=True, indent=2, ensure_ascii=False)


def _int_range(text: str) -> List[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range A..B, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _grid(text: str):
    try:
        nr, nt = text.lower().split("x")
        return int(nr), int(nt)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NRxNT, got {text!r}") from None


def _lambda(text: Optional[str]) -> Optional[Expr]:
    if text is None or text == "symbolic":
        return None
    try:
        return Const(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise CliError(f"--lambda must be 'symbolic' or a number, got {text!r}") from None


def _source(args) -> (Metric, Optional[CatalogEntry]):
    if args.system:
        try:
            entry = lookup(args.system)
        except KeyError as err:
            raise CliError(err.args[0]) from None
        return entry.metric, entry
    return load_metric(args.metric), None


def _write(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ------------------------------------------------------------------ commands

def cmd_coeffs(args) -> int:
    m, _ = _source(args)
    c = bilaplacian_coeffs(m)
    names = m.chart

    def idx(t):
        return "".join(str(i + 1) for i in t)

    data = {
        "metric": m.name or args.metric,
        "chart": list(names),
        "gamma": {idx((i,)): to_text(g) for i, g in enumerate(c.gamma)},
        "A": {idx(k): to_text(v) for k, v in c.A.items()},
        "B": {idx(k): to_text(v) for k, v in c.B.items()},
        "C": {idx(k): to_text(v) for k, v in c.C.items()},
        "D": {idx((i,)): to_text(d) for i, d in enumerate(c.D)},
    }
    if args.format == "json":
        _write(_dump_json(data))
    else:
        out = [f"metric: {data['metric']}  chart: ({', '.join(names)})"]
        for fam in ("gamma", "A", "B", "C", "D"):
            for k, v in data[fam].items():
                out.append(f"{fam}^{k} = {v}")
        _write("\n".join(out))
    return EXIT_OK


def _numeric_defining_check(m: Metric, hs: Expr, R, points: int = 5) -> float:
    rng = seeded_rng()
    worst = 0.0
    exprs = [apply_Di(hs, i, R[i]) for i in range(m.dim)]
    for _ in range(points):
        p = sample_point(m, rng)
        for e in exprs:
            worst = max(worst, abs(evaluate(e, p)))
    return worst


def cmd_check(args) -> int:
    m, _ = _source(args)
    rep = regular_obstruction(m)
    witnesses = {}
    for (i, j), w in rep.obstruction_witness.items():
        witnesses[f"{i + 1}{j + 1}"] = {
            "witness": to_text(w),
            "expected": to_text(expected_witness(m, i, j)),
            "matches": w == expected_witness(m, i, j),
        }
    data = {
        "metric": m.name or args.metric,
        "regular": rep.regular,
        "obstructions": {f"{i + 1}{j + 1}": to_text(e) for (i, j), e in rep.obstructions.items()},
        "witnesses": witnesses,
        "Hs": to_text(rep.Hs.to_expr()),
        "defining_property_max_abs": _numeric_defining_check(m, rep.Hs.to_expr(), rep.Ri),
    }
    if args.format == "json":
        _write(_dump_json(data))
    else:
        out = [f"metric: {data['metric']}", f"regular: {str(rep.regular).lower()}"]
        for k, w in witnesses.items():
            out.append(f"witness u{k[0]}_3*u{k[1]}_3 in D{k[0]}R{k[1]}: {w['witness']}"
                       f"  (expected {w['expected']}: {'ok' if w['matches'] else 'MISMATCH'})")
        out.append(f"max |D_i H_s| at seeded random points: {data['defining_property_max_abs']:.3e}")
        _write("\n".join(out))
    return EXIT_OK


def _constraint_source(args, m: Metric, entry: Optional[CatalogEntry]):
    source = args.constraints
    if source is None:
        return ConstraintSet(()), LAMBDA, "none"
    if source.startswith("catalog:"):
        if entry is None:
            raise CliError("catalog constraint sets need --system")
        try:
            kc = entry.constraint(source.split(":", 1)[1])
        except KeyError:
            labels = ", ".join(k.label for k in entry.known_constraints)
            raise CliError(f"unknown catalog constraint set {source!r}; available: {labels}") from None
        return kc.constraints, kc.lam, source
    return load_constraints(source, m), LAMBDA, source


def cmd_constraints(args) -> int:
    m, entry = _source(args)
    N, lam, label = _constraint_source(args, m, entry)
    override = _lambda(args.lam)
    if override is not None:
        lam = override
    rep = check_constraints(m, N, lam)

    def res(r):
        return {
            "label": r.label,
            "status": r.status,
            "residual": to_text(r.expr),
            "conditions": [{"factor": to_text(f), "multiplicity": k} for f, k in r.conditions],
        }

    data = {
        "metric": m.name or args.metric,
        "constraints": label,
        "lambda": to_text(lam),
        "verdict": rep.verdict,
        "tangency": [res(r) for r in rep.tangency],
        "commutation": [res(r) for r in rep.commutation],
        "equation": [res(r) for r in rep.equation],
    }
    if args.format == "json":
        _write(_dump_json(data))
    else:
        out = [f"metric: {data['metric']}  constraints: {label}  lambda = {data['lambda']}"]
        for group in ("tangency", "commutation", "equation"):
            for r in data[group]:
                line = f"{group:11s} {r['label']:12s} {r['status']:11s} {r['residual']}"
                if r["conditions"]:
                    conds = ", ".join(f"{c['factor']} = 0" for c in r["conditions"])
                    line += f"   [vanishes iff {conds}]"
                out.append(line)
        out.append(f"verdict: {rep.verdict}")
        _write("\n".join(out))
    return {"pass": EXIT_OK, "conditional": EXIT_CONDITIONAL}.get(rep.verdict, EXIT_FAIL)


def cmd_plate(args) -> int:
    cfg = PlateConfig(args.a, args.rho, args.c)
    rows = []
    modes = []
    m_max = max(args.m)
    for n in args.n:
        roots = find_roots(n, m_max)
        for mm in args.m:
            mode = make_mode(n, mm, cfg, roots)
            modes.append(mode)
            res = pde_residual(mode)
            if res > args.tol:
                raise CliError(f"mode ({n},{mm}) residual {res:.3e} exceeds --tol {args.tol:g}")
            rows.append({"n": n, "m": mm, "l_nm": mode.root, "k": mode.k, "omega": mode.omega,
                         "residual": res})
    grid = None
    if args.grid:
        nr, nt = args.grid
        grid = mode_field([ModeAmplitude(md) for md in modes], polar_grid(cfg.a, nr, nt), args.t)
    cols = ["n", "m", "l_nm", "k", "omega", "residual"]
    if args.format == "json":
        data = {"config": {"a": cfg.a, "rho": cfg.rho, "c": cfg.c}, "modes": rows}
        if grid is not None:
            data["grid"] = [dict(zip(("r", "theta", "t", "psi"), g)) for g in grid]
        _write(_dump_json(data))
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([r["n"], r["m"]] + [f"{r[c]:.15g}" for c in cols[2:]])
        if grid is not None:
            buf.write("\n")
            w.writerow(["r", "theta", "t", "psi"])
            for g in grid:
                w.writerow([f"{v:.15g}" for v in g])
        _write(buf.getvalue())
    else:
        out = [f"{'n':>3} {'m':>3} {'l_nm':>18} {'k':>18} {'omega':>18} {'residual':>10}"]
        for r in rows:
            out.append(f"{r['n']:>3} {r['m']:>3} {r['l_nm']:>18.12f} {r['k']:>18.12f} "
                       f"{r['omega']:>18.12f} {r['residual']:>10.2e}")
        if grid is not None:
            out.append("")
            out.append(f"{'r':>12} {'theta':>12} {'t':>8} {'psi':>18}")
            for g in grid:
                out.append(f"{g[0]:>12.6f} {g[1]:>12.6f} {g[2]:>8.4f} {g[3]:>18.10e}")
        _write("\n".join(out))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bihelm", description="Multiplicative separation of the bi-Helmholtz equation "
                                "and clamped circular plate modes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def metric_args(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--system", help="catalog chart: cartesian, polar, parabolic, elliptic-hyperbolic, "
                       "liouville:<file>")
        g.add_argument("--metric", help="metric JSON file")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("coeffs", help="Christoffel contraction and bi-Laplacian coefficients")
    metric_args(sp)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("check", help="regular separation obstruction")
    metric_args(sp)
    sp.add_argument("--lambda", dest="lam", default="symbolic", help="ignored: the obstruction does not involve lambda")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("constraints", help="check a constraint submanifold")
    metric_args(sp)
    sp.add_argument("--constraints", help="constraint JSON file, or catalog:<label> with --system")
    sp.add_argument("--lambda", dest="lam", default=None, help="'symbolic' (default) or a rational value")
    sp.set_defaults(func=cmd_constraints)

    sp = sub.add_parser("plate", help="clamped circular plate mode table")
    sp.add_argument("--n", type=_int_range, default=[0], help="angular orders, A..B")
    sp.add_argument("--m", type=_int_range, default=[1], help="radial indices, A..B (from 1)")
    sp.add_argument("--a", type=float, default=1.0, help="plate radius")
    sp.add_argument("--rho", type=float, default=1.0, help="mass per unit area")
    sp.add_argument("--c", type=float, default=1.0, help="flexural stiffness")
    sp.add_argument("--grid", type=_grid, help="also sample the summed field on an NRxNT polar grid")
    sp.add_argument("--t", type=float, default=0.0, help="time for grid samples")
    sp.add_argument("--tol", type=float, default=1e-8, help="maximum accepted PDE residual")
    sp.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sp.set_defaults(func=cmd_plate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plate":
            if min(args.n) < 0 or min(args.m) < 1:
                raise CliError("--n must be >= 0 and --m >= 1")
        return args.func(args)
    except (CliError, MetricError, SeparationError, SymbolicError, PlateError, ValueError, OSError) as err:
        print(f"bihelm: error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
