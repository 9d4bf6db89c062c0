"""Acceptance suite: one check per primary criterion, each reporting PASS or FAIL.

Run under pytest (the summary lines are printed at the end of the session) or
directly with ``python tests/test_acceptance.py``.
"""
import os
import sys
import time

import pytest
import sympy as sp

sys.path.insert(0, os.path.dirname(__file__))

from bihelm import bessel
from bihelm.coords import CATALOG, lookup
from bihelm.liouville import LiouvilleRelations, liouville_reduce
from bihelm.plate import PlateConfig, boundary_residuals, factorization_check, find_roots, make_mode, pde_residual
from bihelm.separation import (
    LAMBDA, JetPoly, build_Hs, check_constraints, hs_expr, regular_obstruction, restrict_and_split,
    sample_point, seeded_rng,
)
from bihelm.symbolic import ZERO, Const, Jet, Param, Power, canonical, evaluate, params, parse_expr, to_text
from oracles import hs_oracle_for, log_jets, plate_roots_oracle, solve_linear_quartic, sympy_to_grammar

NAMES = sorted(CATALOG)
RESULTS = {}
CRITERIA = []


def criterion(number, title):
    def wrap(fn):
        CRITERIA.append((number, title, fn))
        return fn
    return wrap


def _p(m, text, extra=()):
    return parse_expr(text, m.chart, list(m.params) + list(extra) + ["lambda"])


@criterion(1, "regular separation fails with the u_i'''u_j''' witness")
def crit_witness():
    notes = []
    ok = True
    for name in NAMES:
        m = lookup(name).metric
        t0 = time.perf_counter()
        rep = regular_obstruction(m)
        elapsed = time.perf_counter() - t0
        for i, j in ((0, 1), (1, 0)):
            want = canonical(Const(-2) * (m.g(i, i) * m.g(j, j) + Const(2) * m.g(i, j) ** 2) / m.g(j, j) ** 2)
            got = JetPoly.from_expr(rep.obstructions[i, j]).coefficient(Jet(i, 3), Jet(j, 3))
            ok &= got == want
        ok &= rep.regular is False and elapsed < 10.0
        notes.append(f"{name} {elapsed:.1f}s")
    return ok, ", ".join(notes)


@criterion(2, "Cartesian D1 R2 equals -(2u2''u2'+u2''')(2u1''u1'+u1''')")
def crit_cartesian_product():
    m = lookup("cartesian").metric
    d12 = regular_obstruction(m).obstructions[0, 1]
    product = _p(m, "(2*u2_2*u2 + u2_3)*(2*u1_2*u1 + u1_3)")
    diff = canonical(d12 + product)
    ratio = "-2" if d12 == canonical(Const(-2) * product) else "other"
    return diff == ZERO, f"difference {'vanishes' if diff == ZERO else 'is nonzero'}; D1R2 = {ratio} x product"


@criterion(3, "Cartesian set N passes and splits into the quartic equation")
def crit_cartesian_constrained():
    entry = lookup("cartesian")
    N = entry.constraint("N").constraints
    ok = check_constraints(entry.metric, N).verdict == "pass"
    (part,) = restrict_and_split(entry.metric, N)
    expected = _p(entry.metric, "u2_4 + 3*u2_2^2 + 4*u2*u2_3 + 6*u2^2*u2_2 + u2^4 + 2*c1*(u2_2 + u2^2)"
                                " + c1^2 - lambda", ["c1"])
    ok &= part.scope == (1,) and part.expr == expected
    worst = 0.0
    for c1, lam in ((1, 2), (0, 1), (-1, 5)):
        for p in solve_linear_quartic(c1, lam, [0.0, 0.25, 0.5, 0.75, 1.0]):
            u = log_jets(p)
            pt = {f"u2_{s}": u[s - 1] for s in range(1, 5)}
            worst = max(worst, abs(evaluate(part.expr, pt, {"c1": c1, "lambda": lam})))
    ok &= worst < 1e-7
    return ok, f"linear form residual {worst:.1e}"


@criterion(4, "polar N_pol passes; r-side holds only for lambda = 0")
def crit_polar():
    entry = lookup("polar")
    ok = check_constraints(entry.metric, entry.constraint("N_pol").constraints).verdict == "pass"
    rside = entry.constraint("r-side").constraints
    rep = check_constraints(entry.metric, rside)
    bad = [r for r in rep.residuals if r.status != "zero"]
    ok &= rep.verdict == "conditional" and len(bad) == 1 and bad[0].conditions == ((LAMBDA, 1),)
    ok &= check_constraints(entry.metric, rside, ZERO).verdict == "pass"
    ok &= check_constraints(entry.metric, rside, Const(1)).verdict == "fail"
    where = "commutation" if bad and bad[0] in rep.commutation else "tangency"
    detail = f"{bad[0].label} = {to_text(bad[0].expr)} ({where})" if bad else "no lambda residual"
    return ok, detail


LIOUVILLE_NAMES = ["f", "fp", "fpp", "k", "D", "C", "C1", "C2", "D1", "D2", "alpha", "beta", "gamma", "delta",
                   "lambda"]
FINAL = """(C2 - D2 - (C1 + D1)*f)/(C1 + D1)*(alpha*f + beta + 3*lambda*f^2
  - ((k + C1)*(D1 - k)*f + C1*(D2 - D) + D*(D1 - k))/(2*f + C)
  + 2*fp^2/(2*f + C)^2*(D1 - k) - ((D1*f + D2)^2 - fpp^2)/(2*f + C)^2)
  - 2*(D1 - k)/(2*f + C)*fp^2
  + ((k - C1)*f + C2 + D)*(((D1 - k)*f + D2 - D)/(2*f + C)) + 2*lambda*f^3 + alpha*f^2 + (beta + gamma)*f
  - delta"""
BRANCH = """alpha*f + beta - (-2*fp^2/(2*f + C)^2*(D1 - k) + (D1 - k)*fpp/(2*f + C)
  + ((D1*f + D2)^2 - fpp^2)/(2*f + C)^2 + C1*(D1*f + D2 - fpp)/(2*f + C) - 3*lambda*f^2)"""


@criterion(5, "Liouville: Helmholtz set passes, final equation 8 lambda, branch 3 lambda f^2")
def crit_liouville():
    ok = True
    for name in ("parabolic", "elliptic-hyperbolic"):
        entry = lookup(name)
        kc = entry.constraint("helmholtz")
        ok &= kc.lam == parse_expr("gamma^2", [], ["gamma"])
        ok &= check_constraints(entry.metric, kc.constraints, kc.lam).verdict == "pass"
    rel = LiouvilleRelations(Param("k"), Param("D"), parse_expr("-k", [], ["k"]))
    P = lambda text: parse_expr(text, [], LIOUVILLE_NAMES)
    final = liouville_reduce(P(FINAL), rel, clear=P("(2*f + C)^2"))
    lead = final.leading_coefficient()
    ok &= lead == P("8*lambda")
    branch = liouville_reduce(P(BRANCH), rel).leading_term()
    ok &= branch == (P("3*lambda"), 2)
    return ok, (f"final equation leading coefficient {to_text(lead)} at f^{final.degree}; "
                f"branch leading term {to_text(branch[0])}*f^{branch[1]}")


@criterion(6, "H_s equals the independent Delta^2 e^u / e^u expansion")
def crit_oracle():
    ok = True
    worst = 0.0
    for name in NAMES:
        m = lookup(name).metric
        oracle = hs_oracle_for(name)
        ours = hs_expr(m)
        ok &= ours == parse_expr(sympy_to_grammar(oracle), m.chart, list(m.params))
        symbols = sorted(oracle.free_symbols, key=lambda s: s.name)
        fn = sp.lambdify(symbols, oracle, "math")
        rng = seeded_rng(20)
        for _ in range(20):
            pt = sample_point(m, rng)
            a = evaluate(ours, pt)
            b = fn(*[pt[s.name] for s in symbols])
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    ok &= worst <= 1e-8
    return ok, f"max relative difference {worst:.1e}"


@criterion(7, "every H_s monomial has degree + order = 4")
def crit_homogeneity():
    tau = Param("tau")
    ok = True
    for name in NAMES:
        m = lookup(name).metric
        tagged, plain = build_Hs(m, order_tag=tau), build_Hs(m)
        ok &= set(tagged.terms) == set(plain.terms)
        for mono, c in tagged:
            rest = 4 - JetPoly.weight(mono)
            stripped = canonical(c * Power(tau, -rest)) if rest else c
            ok &= rest >= 0 and "tau" not in params(stripped) and stripped == plain.terms[mono]
    return ok, f"{len(NAMES)} systems"


@criterion(8, "plate roots, boundary and PDE residuals")
def crit_plate():
    t0 = time.perf_counter()
    roots = {n: find_roots(n, 3) for n in range(4)}
    worst_b = worst_p = 0.0
    for n in range(4):
        for m in range(1, 4):
            mode = make_mode(n, m, PlateConfig(), roots[n])
            worst_b = max(worst_b, *boundary_residuals(mode))
            worst_p = max(worst_p, pde_residual(mode))
    elapsed = time.perf_counter() - t0
    oracle = {n: plate_roots_oracle(n, 2) for n in range(3)}
    picks = [(0, 1), (1, 1), (2, 1), (0, 2)]
    worst_r = max(abs(roots[n][m - 1] - oracle[n][m - 1]) for n, m in picks)
    ok = worst_r <= 1e-6 and worst_b <= 1e-10 and worst_p <= 1e-8 and elapsed < 5.0
    return ok, f"root error {worst_r:.1e}, boundary {worst_b:.1e}, PDE {worst_p:.1e}, {elapsed:.2f}s"


@criterion(9, "Bessel recurrences and ODE residuals")
def crit_bessel():
    t0 = time.perf_counter()
    ok = True
    for x in (0.1, 0.5, 1, 2, 5, 10, 20):
        for n in range(1, 6):
            j = bessel.bessel_j(n, x)
            ok &= abs(bessel.bessel_j(n - 1, x) + bessel.bessel_j(n + 1, x) - 2 * n / x * j) <= 1e-11 * max(1, abs(j))
            i = bessel.bessel_i(n, x)
            ok &= abs(bessel.bessel_i(n - 1, x) - bessel.bessel_i(n + 1, x) - 2 * n / x * i) <= 1e-11 * max(1, abs(i))
        for n in range(6):
            f, f1, f2 = (bessel.j_scaled_derivative(n, 1.0, x, p) for p in range(3))
            ok &= abs(x * x * f2 + x * f1 + (x * x - n * n) * f) <= 1e-9 * max(1.0, x * x * abs(f))
            g, g1, g2 = (bessel.i_scaled_derivative(n, 1.0, x, p) for p in range(3))
            ok &= abs(x * x * g2 + x * g1 - (x * x + n * n) * g) <= 1e-9 * max(1.0, x * x * abs(g))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 1.0, f"{elapsed:.3f}s"


@criterion(10, "both factored orderings match the direct fourth-order operator")
def crit_factorization():
    worst = max(factorization_check(n, k) for n in range(4) for k in (0.7, 2.7, 5.0))
    return worst <= 1e-7, f"max residual {worst:.1e}"


def run(number):
    _, title, fn = next(c for c in CRITERIA if c[0] == number)
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number):
    ok, line = run(number)
    assert ok, line


if __name__ == "__main__":
    failed = sum(not run(c[0])[0] for c in CRITERIA)
    sys.exit(1 if failed else 0)
