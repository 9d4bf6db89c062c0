import pytest
import sympy as sp

from bihelm.liouville import (
    LiouvilleConstants, LiouvilleError, LiouvilleRelations, liouville_reduce, liouville_relations,
)
from bihelm.symbolic import (
    ZERO, Const, Coord, Param, canonical, differentiate, parse_expr, substitute, to_text,
)

NAMES = ["f", "fp", "fpp", "k", "D", "C", "C1", "C2", "D1", "D2", "alpha", "beta", "gamma", "delta",
         "lambda", "a"]

# the equation left after eliminating U'/U between the two fourth-order conditions (C1 + D1 != 0)
FINAL = """(C2 - D2 - (C1 + D1)*f)/(C1 + D1)*(alpha*f + beta + 3*lambda*f^2
  - ((k + C1)*(D1 - k)*f + C1*(D2 - D) + D*(D1 - k))/(2*f + C)
  + 2*fp^2/(2*f + C)^2*(D1 - k) - ((D1*f + D2)^2 - fpp^2)/(2*f + C)^2)
  - 2*(D1 - k)/(2*f + C)*fp^2
  + ((k - C1)*f + C2 + D)*(((D1 - k)*f + D2 - D)/(2*f + C)) + 2*lambda*f^3 + alpha*f^2 + (beta + gamma)*f
  - delta"""

# first fourth-order condition with C1 + D1 = 0, written as (alpha f + beta) - lhs
BRANCH = """alpha*f + beta - (-2*fp^2/(2*f + C)^2*(D1 - k) + (D1 - k)*fpp/(2*f + C)
  + ((D1*f + D2)^2 - fpp^2)/(2*f + C)^2 + C1*(D1*f + D2 - fpp)/(2*f + C) - 3*lambda*f^2)"""


def P(text):
    return parse_expr(text, [], NAMES)


def K0_RELATIONS():
    # flatness: f'^2 = k f^2 + 2 D f - k
    return LiouvilleRelations(Param("k"), Param("D"), P("-k"))


LAM = sp.Symbol("lam")


def _sympy(text, s=None):
    s = s or {n: sp.Symbol(n) for n in NAMES if n != "lambda"}
    return sp.sympify(text.replace("^", "**").replace("lambda", "lam"), locals=s)


def _sympy_reduce(text, clear=None):
    """Independent reduction: substitute f'' and f'^2, then clear or take the polynomial part."""
    s = {n: sp.Symbol(n) for n in NAMES if n != "lambda"}
    e = _sympy(text, s)
    f, fp, fpp, k, D = (s[n] for n in ("f", "fp", "fpp", "k", "D"))
    e = e.subs(fpp, k * f + D)
    e = sp.expand(e).subs(fp ** 2, k * f ** 2 + 2 * D * f - k)
    assert not sp.expand(e).has(fp)
    if clear is not None:
        poly = sp.Poly(sp.cancel(e * _sympy(clear, s)), f)
        return poly
    num, den = sp.fraction(sp.cancel(sp.together(e)))
    q, _ = sp.div(sp.Poly(num, f), sp.Poly(den, f))
    return q


# ------------------------------------------------------------------ relations

@pytest.mark.parametrize("profile, k, D, lam", [
    ("u^2", "0", "2", "0"),
    ("u", "0", "0", "1"),
    ("a^2*cosh(u)^2", "4", "-2*a^2", "0"),
    ("cosh(2*u)/2", "4", "0", "-1"),
    ("sin(u)", "-1", "0", "1"),
])
def test_relations(profile, k, D, lam):
    f = parse_expr(profile, ["u", "v"], ["a"])
    rel = liouville_relations(f)
    assert (rel.k, rel.D, rel.Lam) == (P(k), P(D), P(lam))
    # the relations hold for the profile itself
    f1 = differentiate(f, 0)
    assert canonical(differentiate(f1, 0) - rel.fpp(f)) == ZERO
    assert canonical(f1 * f1 - rel.fp_squared(f)) == ZERO


@pytest.mark.parametrize("name", ["u^2", "a^2*cosh(u)^2", "cosh(2*u)/2"])
def test_differential_consistency(name):
    rel = liouville_relations(parse_expr(name, ["u", "v"], ["a"]))
    f, fp = Param("f"), Param("fp")
    # d/du (f'^2) computed through the relation equals 2 f' f''
    lhs = canonical(differentiate_in_f(rel.fp_squared(f)) * fp)
    assert lhs == canonical(2 * fp * rel.fpp(f))


def differentiate_in_f(e):
    """d/df of a polynomial in the parameter f, via a temporary coordinate."""
    q = Coord(0, "f")
    return substitute(differentiate(substitute(e, {Param("f"): q}), 0), {q: Param("f")})


def test_mirrored_profiles():
    rel = liouville_relations(parse_expr("a^2*cosh(u)^2", ["u", "v"], ["a"]),
                              parse_expr("-a^2*cos(v)^2", ["u", "v"], ["a"]))
    assert rel.Lam_g == ZERO
    g = Param("g")
    assert rel.gpp(g) == canonical(-rel.k * g + rel.D)
    rel = liouville_relations(parse_expr("u^2", ["u", "v"]), parse_expr("v^2", ["u", "v"]))
    assert rel.k == ZERO
    with pytest.raises(LiouvilleError):
        liouville_relations(parse_expr("u^2", ["u", "v"]), parse_expr("-v^2", ["u", "v"]))


def test_rejects_non_flat_profiles():
    with pytest.raises(LiouvilleError):
        liouville_relations(parse_expr("u^3", ["u", "v"]))
    with pytest.raises(LiouvilleError):
        liouville_relations(parse_expr("1", ["u", "v"]))


def test_constants_are_distinct():
    names = LiouvilleConstants().names()
    assert len(set(names)) == 9 and "gamma" in names


# ------------------------------------------------------------------ reduction

def test_reduce_defining_relation():
    assert liouville_reduce(P("fpp - k*f - D"), K0_RELATIONS()).is_zero()
    assert liouville_reduce(P("fp^2 - k*f^2 - 2*D*f + k"), K0_RELATIONS()).is_zero()


def test_reduce_rejects_odd_derivative():
    with pytest.raises(LiouvilleError):
        liouville_reduce(P("fp + f"), K0_RELATIONS())


def test_reduce_odd_denominator():
    rel = LiouvilleRelations(Const(0), Const(0), Const(4))
    # 1/(f' + 1) = (f' - 1)/(f'^2 - 1) keeps an odd part
    with pytest.raises(LiouvilleError):
        liouville_reduce(P("1/(fp + 1) + f"), rel)
    # (f'^2 + 2 f' + 1)/(f' + 1) = f' + 1, so the odd parts cancel
    r = liouville_reduce(P("(fp^2 + 2*fp + 1)/(fp + 1) - fp + f"), rel)
    assert r.as_expr() == P("f + 1")


def test_final_equation_matches_sympy():
    ours = liouville_reduce(P(FINAL), K0_RELATIONS(), clear=P("(2*f + C)^2"))
    theirs = _sympy_reduce(FINAL, clear="(2*f + C)^2")
    assert ours.degree == theirs.degree() == 5
    assert to_text(ours.leading_coefficient()) == "-4*lambda"
    assert sp.expand(theirs.LC() + 4 * LAM) == 0
    for p, c in enumerate(ours.numerator):
        assert sp.expand(_sympy(to_text(c)) - theirs.coeff_monomial(sp.Symbol("f") ** p)) == 0


def test_branch_leading_term():
    ours = liouville_reduce(P(BRANCH), K0_RELATIONS())
    coeff, power = ours.leading_term()
    assert (coeff, power) == (P("3*lambda"), 2)
    q = _sympy_reduce(BRANCH)
    assert q.degree() == 2 and sp.expand(q.LC() - 3 * LAM) == 0
    cleared = liouville_reduce(P(BRANCH), K0_RELATIONS(), clear=P("(2*f + C)^2"))
    assert cleared.degree == 4 and cleared.leading_coefficient() == P("12*lambda")


def test_bad_multiplier():
    with pytest.raises(LiouvilleError):
        liouville_reduce(P("1/(2*f + C)^2"), K0_RELATIONS(), clear=P("2*f + C"))
