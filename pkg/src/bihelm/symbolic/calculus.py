"""Differentiation, substitution and numeric evaluation."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from .expr import (
    Const, Coord, Expr, Func, Jet, Param, Power, Product, Sum, SymbolicError,
    ONE, ZERO, depends_on, jets, symbols,
)
from .normal import canonical

Var = Union[Coord, Jet, Param]


def _is_var(e: Expr, var: Var) -> bool:
    if isinstance(var, Coord):
        return isinstance(e, Coord) and e.index == var.index
    return e == var


def _dfunc(kind: str, arg: Expr) -> Expr:
    if kind == "sin":
        return Func("cos", arg)
    if kind == "cos":
        return Product((Const(-1), Func("sin", arg)))
    if kind == "sinh":
        return Func("cosh", arg)
    if kind == "cosh":
        return Func("sinh", arg)
    if kind == "exp":
        return Func("exp", arg)
    if kind == "log":
        return Power(arg, -1)
    if kind == "sqrt":
        return Product((Const(Fraction(1, 2)), Power(Func("sqrt", arg), -1)))
    raise SymbolicError(kind)


@lru_cache(maxsize=200_000)
def _d(e: Expr, var: Var) -> Expr:
    if not depends_on(e, var):
        return ZERO
    if isinstance(e, (Coord, Jet, Param)):
        return ONE if _is_var(e, var) else ZERO
    if isinstance(e, Sum):
        return Sum(_d(t, var) for t in e.terms)
    if isinstance(e, Product):
        fs = e.factors
        terms = []
        for k, f in enumerate(fs):
            df = _d(f, var)
            if df == ZERO:
                continue
            terms.append(Product(fs[:k] + (df,) + fs[k + 1:]))
        return Sum(terms) if terms else ZERO
    if isinstance(e, Power):
        return Product((Const(e.exp), Power(e.base, e.exp - 1), _d(e.base, var)))
    if isinstance(e, Func):
        return Product((_dfunc(e.kind, e.arg), _d(e.arg, var)))
    raise TypeError(type(e))


def partial(e: Expr, var: Var) -> Expr:
    """Partial derivative treating every other coordinate, jet and parameter as independent."""
    return canonical(_d(e, var))


def differentiate(e: Expr, wrt: int) -> Expr:
    """Exact partial derivative with respect to coordinate ``wrt`` (0-based index)."""
    if jets(e):
        raise SymbolicError("differentiate() does not accept jet variables; lift with apply_Di")
    return canonical(_d(e, Coord(wrt, "")))


def substitute(e: Expr, bindings: Mapping[Expr, Expr]) -> Expr:
    """Simultaneous substitution of symbols or jet variables, then canonical form."""
    if not bindings:
        return canonical(e)
    keys = frozenset(bindings)
    memo: dict = {}

    def walk(x: Expr) -> Expr:
        if not (symbols(x) & keys):
            return x
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, (Coord, Jet, Param)):
            out = bindings[x]
        elif isinstance(x, Sum):
            out = Sum(walk(t) for t in x.terms)
        elif isinstance(x, Product):
            out = Product(walk(f) for f in x.factors)
        elif isinstance(x, Power):
            out = Power(walk(x.base), x.exp)
        elif isinstance(x, Func):
            out = Func(x.kind, walk(x.arg))
        else:
            out = x
        memo[x] = out
        return out

    return canonical(walk(e))


_NUMERIC = {
    "sin": math.sin, "cos": math.cos, "sinh": math.sinh, "cosh": math.cosh,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
}


def _lookup(table: Mapping, atom: Expr):
    for key in (atom, getattr(atom, "name", None)):
        if key is not None and key in table:
            return table[key]
    return None


def evaluate(e: Expr, point: Mapping, params: Mapping = None, functions: Mapping = None):
    """Evaluate ``e`` numerically.

    ``point`` maps coordinates / jet variables (as atoms or by name) to values;
    ``params`` maps parameter names to values.  ``functions`` may override the
    elementary functions (e.g. with ``mpmath`` versions); the result is then
    not forced to float.
    """
    params = params or {}
    fns = functions or _NUMERIC
    memo: dict = {}

    def ev(x: Expr):
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Const):
            to_num = fns.get("rational")
            v = to_num(x.value) if to_num else x.value.numerator / x.value.denominator
        elif isinstance(x, (Coord, Jet)):
            v = _lookup(point, x)
            if v is None:
                raise SymbolicError(f"unbound symbol {x.name!r}")
        elif isinstance(x, Param):
            v = _lookup(params, x)
            if v is None:
                v = _lookup(point, x)
            if v is None:
                raise SymbolicError(f"unbound parameter {x.name!r}")
        elif isinstance(x, Sum):
            v = 0
            for t in x.terms:
                v = v + ev(t)
        elif isinstance(x, Product):
            v = 1
            for f in x.factors:
                v = v * ev(f)
        elif isinstance(x, Power):
            b = ev(x.base)
            if x.exp < 0 and b == 0:
                raise SymbolicError("division by zero during evaluation")
            v = b ** x.exp
        elif isinstance(x, Func):
            try:
                v = fns[x.kind](ev(x.arg))
            except ValueError as err:
                raise SymbolicError(f"{x.kind} domain error: {err}") from None
        else:
            raise TypeError(type(x))
        memo[x] = v
        return v

    value = ev(e)
    if functions is None:
        value = float(value)
        if not math.isfinite(value):
            raise SymbolicError("non-finite result")
    return value
