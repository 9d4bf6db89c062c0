"""Text output in the same grammar the parser accepts."""
from __future__ import annotations

from fractions import Fraction

from .expr import Const, Coord, Expr, Func, Jet, Param, Power, Product, Sum

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def to_text(e: Expr) -> str:
    return _fmt(e, 0)


def _const(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _wrap(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _fmt(e: Expr, outer: int) -> str:
    if isinstance(e, Const):
        v = e.value
        if v < 0:
            prec = _PREC_SUM
        elif v.denominator != 1:
            prec = _PREC_PROD
        else:
            prec = _PREC_ATOM
        return _wrap(_const(v), prec, outer)
    if isinstance(e, (Coord, Param, Jet)):
        return e.name
    if isinstance(e, Func):
        return f"{e.kind}({_fmt(e.arg, 0)})"
    if isinstance(e, Power):
        base = _fmt(e.base, _PREC_ATOM)
        return _wrap(f"{base}^{e.exp}", _PREC_POW, outer)
    if isinstance(e, Product):
        return _wrap(_product(e), _PREC_PROD, outer)
    if isinstance(e, Sum):
        parts = []
        for k, t in enumerate(e.terms):
            s = _fmt(t, _PREC_SUM)
            if k and s.startswith("-"):
                parts.append(" - " + s[1:])
            elif k:
                parts.append(" + " + s)
            else:
                parts.append(s)
        return _wrap("".join(parts), _PREC_SUM, outer)
    raise TypeError(type(e))


def _product(e: Product) -> str:
    factors = list(e.factors)
    sign = ""
    head = []
    if factors and isinstance(factors[0], Const):
        v = factors.pop(0).value
        if v < 0:
            sign, v = "-", -v
        if v != 1 or not factors:
            head.append(_const(v))
    body = head + [_fmt(f, _PREC_PROD + 1) for f in factors]
    return sign + "*".join(body)
