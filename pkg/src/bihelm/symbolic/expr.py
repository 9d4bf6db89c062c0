"""Expression tree nodes.

Nodes are immutable and hash by structure.  The arithmetic operators build
raw (non-canonical) trees; call :func:`bihelm.symbolic.canonical` to obtain
the normal form.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt")
MAX_JET_ORDER = 4


class SymbolicError(Exception):
    pass


class Expr:
    __slots__ = ("_hash",)

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, -as_expr(other)))

    def __rsub__(self, other):
        return Sum((as_expr(other), -self))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Product((self, Power(as_expr(other), -1)))

    def __rtruediv__(self, other):
        return Product((as_expr(other), Power(self, -1)))

    def __neg__(self):
        return Product((Const(-1), self))

    def __pow__(self, k):
        if not isinstance(k, int):
            raise SymbolicError("only integer exponents are supported")
        return Power(self, k)

    def __str__(self):
        from .printer import to_text

        return to_text(self)

    def __repr__(self):
        return f"{type(self).__name__}{self._fields()!r}"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)
        self._hash = hash(("c", self.value))

    def _fields(self):
        return (self.value,)


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("p", name))

    def _fields(self):
        return (self.name,)


class Coord(Expr):
    """Coordinate ``q^index`` (0-based) of a chart; ``name`` is for display."""

    __slots__ = ("index", "name")

    def __init__(self, index: int, name: str):
        self.index = index
        self.name = name
        self._hash = hash(("q", index, name))

    def _fields(self):
        return (self.index, self.name)


class Jet(Expr):
    """Formal pure derivative ``u_i^(s)``; ``coord`` is 0-based, printed 1-based."""

    __slots__ = ("coord", "order")

    def __init__(self, coord: int, order: int):
        if not 1 <= order <= MAX_JET_ORDER:
            raise SymbolicError(f"jet order {order} outside 1..{MAX_JET_ORDER}")
        if coord < 0:
            raise SymbolicError("negative coordinate index")
        self.coord = coord
        self.order = order
        self._hash = hash(("u", coord, order))

    def _fields(self):
        return (self.coord, self.order)

    @property
    def name(self) -> str:
        return f"u{self.coord + 1}_{self.order}"


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr]):
        self.terms = tuple(terms)
        self._hash = hash(("+",) + self.terms)

    def _fields(self):
        return self.terms


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Iterable[Expr]):
        self.factors = tuple(factors)
        self._hash = hash(("*",) + self.factors)

    def _fields(self):
        return self.factors


class Power(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        if not isinstance(exp, int):
            raise SymbolicError("only integer exponents are supported")
        self.base = base
        self.exp = exp
        self._hash = hash(("^", base, exp))

    def _fields(self):
        return (self.base, self.exp)


class Func(Expr):
    __slots__ = ("kind", "arg")

    def __init__(self, kind: str, arg: Expr):
        if kind not in FUNCTIONS:
            raise SymbolicError(f"unknown function {kind!r}")
        self.kind = kind
        self.arg = arg
        self._hash = hash(("f", kind, arg))

    def _fields(self):
        return (self.kind, self.arg)


Atom = Union[Coord, Jet, Param, Func]
ZERO = Const(0)
ONE = Const(1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    if isinstance(x, float):
        raise SymbolicError("floating-point coefficients are not allowed in symbolic trees")
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def add(*terms) -> Expr:
    return Sum(as_expr(t) for t in terms)


def mul(*factors) -> Expr:
    return Product(as_expr(f) for f in factors)


def sin(x):
    return Func("sin", as_expr(x))


def cos(x):
    return Func("cos", as_expr(x))


def sinh(x):
    return Func("sinh", as_expr(x))


def cosh(x):
    return Func("cosh", as_expr(x))


def exp(x):
    return Func("exp", as_expr(x))


def log(x):
    return Func("log", as_expr(x))


def sqrt(x):
    return Func("sqrt", as_expr(x))


def sort_key(e: Expr) -> tuple:
    """Total order used for atoms, factors and terms of canonical forms."""
    return _sort_key(e)


@lru_cache(maxsize=None)
def _sort_key(e: Expr) -> tuple:
    if isinstance(e, Const):
        return (0, e.value)
    if isinstance(e, Coord):
        return (1, e.index, e.name)
    if isinstance(e, Jet):
        return (2, e.coord, e.order)
    if isinstance(e, Param):
        return (3, e.name)
    if isinstance(e, Func):
        return (4, FUNCTIONS.index(e.kind), _sort_key(e.arg))
    if isinstance(e, Power):
        return _sort_key(e.base) + ("^", e.exp)
    if isinstance(e, Sum):
        return (6, tuple(_sort_key(t) for t in e.terms))
    if isinstance(e, Product):
        return (7, tuple(_sort_key(f) for f in e.factors))
    raise TypeError(type(e))


@lru_cache(maxsize=None)
def symbols(e: Expr) -> frozenset:
    """Coordinates, jet variables and parameters occurring anywhere in ``e``."""
    if isinstance(e, (Coord, Jet, Param)):
        return frozenset((e,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Func):
        return symbols(e.arg)
    if isinstance(e, Power):
        return symbols(e.base)
    children = e.terms if isinstance(e, Sum) else e.factors
    out = frozenset()
    for c in children:
        out |= symbols(c)
    return out


def jets(e: Expr) -> frozenset:
    return frozenset(s for s in symbols(e) if isinstance(s, Jet))


def coordinates(e: Expr) -> frozenset:
    return frozenset(s.index for s in symbols(e) if isinstance(s, Coord))


def params(e: Expr) -> frozenset:
    return frozenset(s.name for s in symbols(e) if isinstance(s, Param))


def depends_on(e: Expr, var: Expr) -> bool:
    if isinstance(var, Coord):
        return any(isinstance(s, Coord) and s.index == var.index for s in symbols(e))
    return var in symbols(e)
