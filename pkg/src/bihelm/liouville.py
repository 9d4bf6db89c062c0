"""Polynomial reduction for flat Liouville profiles.

A flat Liouville metric (f + g)(du^2 + dv^2) has profiles with
f''' / f' = k = -g''' / g', hence after one integration

    f'' = k f + D,        f'^2 = k f^2 + 2 D f + Lam,
    g'' = -k g + D,       g'^2 = -k g^2 + 2 D g + Lam_g.

Expressions in f, f', f'' then reduce to rational functions of f alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .symbolic import (
    ZERO, Const, Expr, Param, Power, Product, Sum, canonical, coordinates, differentiate,
    is_zero, substitute, to_text,
)
from .symbolic.normal import _collect_atoms, _Mapper


class LiouvilleError(ValueError):
    pass


@dataclass(frozen=True)
class LiouvilleRelations:
    k: Expr
    D: Expr
    Lam: Expr
    Lam_g: Optional[Expr] = None

    def fpp(self, f: Expr) -> Expr:
        return canonical(Sum((Product((self.k, f)), self.D)))

    def fp_squared(self, f: Expr) -> Expr:
        return canonical(Sum((Product((self.k, f, f)), Product((Const(2), self.D, f)), self.Lam)))

    def gpp(self, g: Expr) -> Expr:
        return canonical(Sum((Product((Const(-1), self.k, g)), self.D)))

    def gp_squared(self, g: Expr) -> Expr:
        if self.Lam_g is None:
            raise LiouvilleError("no g-profile constants recorded")
        return canonical(Sum((Product((Const(-1), self.k, g, g)), Product((Const(2), self.D, g)), self.Lam_g)))


@dataclass(frozen=True)
class LiouvilleConstants:
    C: Param = Param("C")
    C1: Param = Param("C1")
    C2: Param = Param("C2")
    D1: Param = Param("D1")
    D2: Param = Param("D2")
    alpha: Param = Param("alpha")
    beta: Param = Param("beta")
    gamma: Param = Param("gamma")
    delta: Param = Param("delta")

    def names(self) -> Tuple[str, ...]:
        return tuple(p.name for p in (self.C, self.C1, self.C2, self.D1, self.D2,
                                      self.alpha, self.beta, self.gamma, self.delta))


def _profile_constants(f: Expr) -> Tuple[Expr, Expr, Expr, int]:
    f = canonical(f)
    cs = coordinates(f)
    if len(cs) != 1:
        raise LiouvilleError("profile must depend on exactly one coordinate")
    var = next(iter(cs))
    f1 = differentiate(f, var)
    if is_zero(f1):
        raise LiouvilleError("profile derivative vanishes identically")
    f2 = differentiate(f1, var)
    f3 = differentiate(f2, var)
    k = canonical(Product((f3, Power(f1, -1))))
    D = canonical(Sum((f2, Product((Const(-1), k, f)))))
    lam = canonical(Sum((Product((f1, f1)), Product((Const(-1), k, f, f)), Product((Const(-2), D, f)))))
    for name, value in (("k", k), ("D", D), ("Lambda", lam)):
        if var in coordinates(value):
            raise LiouvilleError(f"profile {to_text(f)} is not of flat Liouville type ({name} = {to_text(value)})")
    return k, D, lam, var


def liouville_relations(f: Expr, g: Optional[Expr] = None) -> LiouvilleRelations:
    """Constants (k, D, Lam) of a profile; with ``g``, also check the mirrored relations."""
    k, D, lam, _ = _profile_constants(f)
    if g is None:
        return LiouvilleRelations(k, D, lam)
    kg, Dg, lam_g, _ = _profile_constants(g)
    if not is_zero(Sum((k, kg))) or not is_zero(Sum((D, Product((Const(-1), Dg))))):
        raise LiouvilleError("f and g profiles do not share the flatness constants (k, D)")
    return LiouvilleRelations(k, D, lam, lam_g)


@dataclass(frozen=True)
class LiouvilleReduction:
    """``numerator / cleared`` as polynomials in f (ascending coefficient lists)."""

    var: Param
    numerator: Tuple[Expr, ...]
    cleared: Tuple[Expr, ...]

    @property
    def degree(self) -> int:
        return len(self.numerator) - 1

    def leading_coefficient(self) -> Expr:
        return self.numerator[-1] if self.numerator else ZERO

    def leading_term(self) -> Tuple[Expr, int]:
        """Leading term of the polynomial part of ``numerator / cleared``."""
        if not self.numerator:
            return ZERO, 0
        c = canonical(Product((self.numerator[-1], Power(self.cleared[-1], -1))))
        return c, len(self.numerator) - len(self.cleared)

    def is_zero(self) -> bool:
        return not self.numerator

    def as_expr(self) -> Expr:
        return canonical(Sum(Product((c, Power(self.var, p))) for p, c in enumerate(self.numerator)))


def liouville_reduce(e: Expr, rel: LiouvilleRelations, f: Param = Param("f"), fp: Param = Param("fp"),
                     fpp: Param = Param("fpp"), clear: Optional[Expr] = None) -> LiouvilleReduction:
    """Eliminate f'' and even powers of f' from ``e`` and clear the f-dependent denominator.

    Odd powers of f' must cancel; otherwise the input is outside the reducible
    class and an error is raised.  ``clear`` fixes the multiplier explicitly
    (it must leave no f in the denominator).
    """
    e = substitute(e, {fpp: rel.fpp(f)})
    q = rel.fp_squared(f)
    atoms: set = set()
    _collect_atoms(Sum((e, q, f)), atoms)
    mp = _Mapper(atoms)
    v = mp.reduce(mp.to_field(e))
    Q = mp.to_field(q)
    if fp in mp.index:
        ip = mp.index[fp]
        n0, n1 = _split_odd(mp, v.numer, ip, Q)
        m0, m1 = _split_odd(mp, v.denom, ip, Q)
        if m1:
            v = (n0 * m0 - Q * n1 * m1) / (m0 * m0 - Q * m1 * m1)
            odd = n1 * m0 - n0 * m1
        else:
            v = n0 / m0
            odd = n1
        if odd:
            raise LiouvilleError("odd powers of f' do not cancel")
    i_f = mp.index[f]
    if clear is not None:
        cl = mp.to_field(canonical(clear))
        v = v * cl
        if v.denom.degree(i_f) > 0:
            raise LiouvilleError("the given multiplier does not clear the denominator")
        cleared = _coeffs(mp, cl.numer, cl.denom, i_f)
        num = _coeffs(mp, v.numer, v.denom, i_f)
    else:
        den = v.denom
        content = _content(den, i_f)
        den_f = den.exquo(content)
        num = _coeffs(mp, v.numer, content, i_f)
        cleared = _coeffs(mp, den_f, den.ring.one, i_f)
    return LiouvilleReduction(f, num, cleared)


def _split_odd(mp, poly, idx, Q):
    K = mp.K
    ring = poly.ring
    even, odd = K.zero, K.zero
    for monom, coeff in poly.terms():
        p = monom[idx]
        rest = list(monom)
        rest[idx] = 0
        term = K(ring({tuple(rest): coeff})) * Q ** (p // 2)
        if p % 2:
            odd += term
        else:
            even += term
    return even, odd


def _content(poly, idx):
    ring = poly.ring
    groups = {}
    for monom, coeff in poly.terms():
        rest = list(monom)
        rest[idx] = 0
        groups.setdefault(monom[idx], {})[tuple(rest)] = coeff
    out = None
    for g in groups.values():
        p = ring(g)
        out = p if out is None else out.gcd(p)
    return out


def _coeffs(mp, num, den, idx) -> Tuple[Expr, ...]:
    """Coefficients of powers of generator ``idx`` in num/den (den free of it)."""
    ring = num.ring
    groups = {}
    for monom, coeff in num.terms():
        rest = list(monom)
        rest[idx] = 0
        groups.setdefault(monom[idx], {})[tuple(rest)] = coeff
    if not groups:
        return ()
    deg = max(groups)
    out = []
    for p in range(deg + 1):
        c = ring(groups.get(p, {}))
        out.append(mp.to_expr(mp.K(c) / mp.K(den)) if c else ZERO)
    return tuple(canonical(x) for x in out)
