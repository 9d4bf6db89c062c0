"""Exact symbolic expressions over coordinates, jet variables and parameters."""
from .expr import (
    FUNCTIONS, MAX_JET_ORDER, ONE, ZERO, Const, Coord, Expr, Func, Jet, Param, Power, Product,
    Sum, SymbolicError, add, as_expr, coordinates, cos, cosh, depends_on, exp, jets, log, mul,
    params, sin, sinh, sort_key, sqrt, symbols,
)
from .normal import canonical, is_zero
from .calculus import differentiate, evaluate, partial, substitute
from .parser import ParseError, parse_expr, parse_raw
from .printer import to_text

__all__ = [
    "FUNCTIONS", "MAX_JET_ORDER", "ONE", "ZERO", "Const", "Coord", "Expr", "Func", "Jet", "Param",
    "ParseError", "Power", "Product", "Sum", "SymbolicError", "add", "as_expr", "canonical",
    "coordinates", "cos", "cosh", "depends_on", "differentiate", "evaluate", "exp", "is_zero",
    "jets", "log", "mul", "params", "parse_expr", "parse_raw", "partial", "sin", "sinh",
    "sort_key", "sqrt", "substitute", "symbols", "to_text",
]
