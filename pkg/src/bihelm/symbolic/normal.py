"""Canonical rational normal form.

An expression is mapped into the fraction field QQ(a_1, ..., a_m) whose
generators are its atoms (coordinates, jet variables, parameters and
function applications with canonical arguments).  Numerator and denominator
are reduced modulo the rewrite list

    cos(a)^2 -> 1 - sin(a)^2,  cosh(a)^2 -> 1 + sinh(a)^2,  sqrt(a)^2 -> a,
    exp(a)*exp(b) -> exp(a + b)

and the cancelled fraction is converted back into a sum of products with a
single shared ``Power(Sum, -1)`` factor for any non-monomial denominator.
Sparse multivariate arithmetic and gcds come from ``sympy.polys``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import QQ
from sympy.polys.fields import field as _make_field
from sympy.polys.orderings import lex

from .expr import (
    Const, Coord, Expr, Func, Jet, Param, Power, Product, Sum,
    SymbolicError, ONE, ZERO, sort_key,
)

_ODD = ("sin", "sinh")
_EVEN = ("cos", "cosh")
_PARTNER = {"cos": "sin", "cosh": "sinh"}
_MAX_PASSES = 6


@lru_cache(maxsize=None)
def _field(n: int):
    names = [f"a{i}" for i in range(n)] if n else ["a0"]
    return _make_field(names, QQ, lex)[0]


def canonical(e: Expr) -> Expr:
    return _canonical(e)


@lru_cache(maxsize=200_000)
def _canonical(e: Expr) -> Expr:
    if isinstance(e, (Const, Coord, Jet, Param)):
        return e
    out = e
    for _ in range(_MAX_PASSES):
        prepared = _prepare(out)
        result = _normalize(prepared)
        if not _has_unmerged_exp(result):
            return result
        out = result
    raise SymbolicError("exponential merging did not reach a fixed point")


def is_zero(e: Expr) -> bool:
    return _canonical(e) == ZERO


# ---------------------------------------------------------------- preparation

@lru_cache(maxsize=200_000)
def _prepare(e: Expr) -> Expr:
    """Canonicalize function arguments, apply function identities, merge exps."""
    if isinstance(e, (Const, Coord, Jet, Param)):
        return e
    if isinstance(e, Func):
        return _func_atom(e.kind, _canonical(e.arg))
    if isinstance(e, Power):
        base = _prepare(e.base)
        if isinstance(base, Func) and base.kind == "exp":
            return _func_atom("exp", _canonical(Product((Const(e.exp), base.arg))))
        return Power(base, e.exp)
    if isinstance(e, Sum):
        return Sum(_prepare(t) for t in e.terms)
    factors = [_prepare(f) for f in e.factors]
    exp_args = []
    rest = []
    for f in factors:
        if isinstance(f, Func) and f.kind == "exp":
            exp_args.append(f.arg)
        else:
            rest.append(f)
    if len(exp_args) > 1:
        merged = _func_atom("exp", _canonical(Sum(exp_args)))
        rest.append(merged)
        return Product(rest)
    return Product(factors)


def _leading_negative(e: Expr) -> bool:
    first = e.terms[0] if isinstance(e, Sum) else e
    if isinstance(first, Const):
        return first.value < 0
    if isinstance(first, Product) and isinstance(first.factors[0], Const):
        return first.factors[0].value < 0
    return False


def _func_atom(kind: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        v = arg.value
        if v == 0 and kind in ("sin", "sinh"):
            return ZERO
        if v == 0 and kind in ("cos", "cosh", "exp"):
            return ONE
        if v == 1 and kind == "log":
            return ZERO
        if kind == "sqrt":
            if v < 0:
                raise SymbolicError("sqrt of a negative constant")
            n, d = isqrt(v.numerator), isqrt(v.denominator)
            if n * n == v.numerator and d * d == v.denominator:
                return Const(Fraction(n, d))
    if kind in _ODD and _leading_negative(arg):
        return Product((Const(-1), Func(kind, _canonical(Product((Const(-1), arg))))))
    if kind in _EVEN and _leading_negative(arg):
        return Func(kind, _canonical(Product((Const(-1), arg))))
    return Func(kind, arg)


def _has_unmerged_exp(e: Expr) -> bool:
    if isinstance(e, Sum):
        return any(_has_unmerged_exp(t) for t in e.terms)
    if isinstance(e, Power):
        base = e.base
        if isinstance(base, Func) and base.kind == "exp":
            return True
        return _has_unmerged_exp(base)
    if isinstance(e, Product):
        n_exp = sum(1 for f in e.factors if isinstance(f, Func) and f.kind == "exp")
        return n_exp > 1 or any(_has_unmerged_exp(f) for f in e.factors)
    return False


# ------------------------------------------------------------- field mapping

def _collect_atoms(e: Expr, out: set) -> None:
    if isinstance(e, (Coord, Jet, Param)):
        out.add(e)
    elif isinstance(e, Func):
        if e not in out:
            out.add(e)
            partner = _PARTNER.get(e.kind)
            if partner:
                out.add(Func(partner, e.arg))
            if e.kind == "sqrt":
                _collect_atoms(e.arg, out)
    elif isinstance(e, Power):
        _collect_atoms(e.base, out)
    elif isinstance(e, (Sum, Product)):
        for c in (e.terms if isinstance(e, Sum) else e.factors):
            _collect_atoms(c, out)


class _Mapper:
    def __init__(self, atoms):
        self.atoms = sorted(atoms, key=sort_key)
        self.K = _field(len(self.atoms))
        self.index = {a: i for i, a in enumerate(self.atoms)}
        self.gens = self.K.gens
        self.cache = {}
        self.pairs = []  # (even index, odd index, sign) for cos/sin and cosh/sinh
        self.roots = []  # (sqrt index, field value of its argument)
        for a, i in self.index.items():
            if isinstance(a, Func) and a.kind in _PARTNER:
                j = self.index[Func(_PARTNER[a.kind], a.arg)]
                self.pairs.append((i, j, -1 if a.kind == "cos" else 1))
        for a, i in self.index.items():
            if isinstance(a, Func) and a.kind == "sqrt":
                self.roots.append((i, self.to_field(a.arg)))

    def to_field(self, e: Expr):
        hit = self.cache.get(e)
        if hit is not None:
            return hit
        K = self.K
        if isinstance(e, Const):
            v = K(QQ(e.value.numerator, e.value.denominator))
        elif isinstance(e, (Coord, Jet, Param, Func)):
            v = self.gens[self.index[e]]
        elif isinstance(e, Sum):
            # add numerators over equal denominators first: one gcd per distinct denominator
            groups: dict = {}
            for t in e.terms:
                x = self.to_field(t)
                if x:
                    groups[x.denom] = groups.get(x.denom, K.ring.zero) + x.numer
            v = K.zero
            for den, num in groups.items():
                if num:
                    v = v + K.one.new(num, den)
        elif isinstance(e, Product):
            num, den = K.ring.one, K.ring.one
            for f in e.factors:
                x = self.to_field(f)
                num, den = num * x.numer, den * x.denom
            v = K.one.new(num, den) if den != 1 else K.one.raw_new(num, den)
        elif isinstance(e, Power):
            b = self.to_field(e.base)
            if e.exp == 0:
                v = K.one
            elif e.exp < 0:
                if not b:
                    raise SymbolicError("division by zero")
                v = K.one / b ** (-e.exp)
            else:
                v = b ** e.exp
        else:
            raise TypeError(type(e))
        self.cache[e] = v
        return v

    def reduce_poly(self, p):
        """Reduce a polynomial modulo the trig/hyperbolic/sqrt relations."""
        if not self.pairs and not self.roots:
            return None
        K = self.K
        ring = K.ring
        changed = False
        acc = K.zero
        plain = ring.zero
        for monom, coeff in p.terms():
            exps = list(monom)
            factor = None
            for i, j, sign in self.pairs:
                if exps[i] >= 2:
                    q, exps[i] = divmod(exps[i], 2)
                    rel = K.one + sign * self.gens[j] ** 2
                    factor = rel ** q if factor is None else factor * rel ** q
            for i, arg in self.roots:
                if exps[i] >= 2:
                    q, exps[i] = divmod(exps[i], 2)
                    factor = arg ** q if factor is None else factor * arg ** q
            if factor is None:
                plain += ring({monom: coeff})
            else:
                changed = True
                acc = acc + K(ring({tuple(exps): coeff})) * factor
        if not changed:
            return None
        return acc + K(plain)

    def reduce(self, v):
        for _ in range(_MAX_PASSES):
            num = self.reduce_poly(v.numer)
            den = self.reduce_poly(v.denom)
            if num is None and den is None:
                return v
            num = self.K(v.numer) if num is None else num
            den = self.K(v.denom) if den is None else den
            if not num:
                return self.K.zero
            v = num / den
        return v

    def to_expr(self, v) -> Expr:
        num, den = v.numer, v.denom
        if not num:
            return ZERO
        # primitive integer denominator with positive leading coefficient
        dterms = den.terms()
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for _, c in dterms]
        lcm_den = 1
        for c in coeffs:
            lcm_den = lcm_den * c.denominator // gcd(lcm_den, c.denominator)
        ints = [int(c * lcm_den) for c in coeffs]
        g = 0
        for k in ints:
            g = gcd(g, k)
        lead = max(range(len(dterms)), key=lambda t: dterms[t][0])
        sign = -1 if ints[lead] < 0 else 1
        scale = Fraction(lcm_den * sign, g)
        n = len(self.atoms)
        dmon = [min(m[i] for m, _ in dterms) for i in range(n)]
        rest = []
        for (m, _), k in zip(dterms, ints):
            rest.append((tuple(a - b for a, b in zip(m, dmon)), k * sign // g))
        den_factor = None
        if not (len(rest) == 1 and not any(rest[0][0])):
            rest.sort(key=lambda t: _term_order(t[0]), reverse=True)
            den_factor = Power(Sum(self._term(m, Fraction(k)) for m, k in rest), -1)
        terms = []
        for m, c in sorted(num.terms(), key=lambda t: _term_order(t[0]), reverse=True):
            c = Fraction(int(c.numerator), int(c.denominator)) * scale
            exps = tuple(a - b for a, b in zip(m, dmon))
            terms.append(self._term(exps, c, den_factor))
        return terms[0] if len(terms) == 1 else Sum(terms)

    def _term(self, exps, c: Fraction, extra=None) -> Expr:
        factors = []
        for a, k in zip(self.atoms, exps):
            if k == 1:
                factors.append(a)
            elif k:
                factors.append(Power(a, k))
        if extra is not None:
            factors.append(extra)
        if c != 1 or not factors:
            factors.insert(0, Const(c))
        return factors[0] if len(factors) == 1 else Product(factors)


def _term_order(monom):
    return (sum(monom), monom)


def _normalize(e: Expr) -> Expr:
    atoms: set = set()
    _collect_atoms(e, atoms)
    mapper = _Mapper(atoms)
    v = mapper.reduce(mapper.to_field(e))
    return mapper.to_expr(v)


def to_fraction(e: Expr):
    """Return ``(mapper, field_element)`` for advanced callers (factoring, contents)."""
    c = _canonical(e)
    atoms: set = set()
    _collect_atoms(c, atoms)
    mapper = _Mapper(atoms)
    return mapper, mapper.to_field(c)
