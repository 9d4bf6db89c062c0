"""Recursive-descent parser for the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' integer)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor

Jet variables are spelled ``u<i>_<s>`` (``u<i>`` means ``u<i>_1``).
"""
from __future__ import annotations

import re
from typing import Iterable, Sequence

from .expr import (
    FUNCTIONS, MAX_JET_ORDER, Const, Coord, Expr, Func, Jet, Param, Power, Product, Sum,
    SymbolicError,
)
from .normal import canonical

_JET = re.compile(r"u(\d+)(?:_(\d+))?$")


class ParseError(SymbolicError):
    def __init__(self, message: str, text: str, pos: int):
        self.offset = len(text[:pos].encode("utf-8"))
        super().__init__(f"{message} at byte offset {self.offset}")


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Parser:
    def __init__(self, text: str, chart: Sequence[str], params: Iterable[str]):
        self.text = text
        self.pos = 0
        self.chart = {name: Coord(i, name) for i, name in enumerate(chart)}
        self.n = len(chart)
        self.params = set(params)

    def error(self, msg, pos=None):
        raise ParseError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            t = self.term()
            terms.append(t if op == "+" else Product((Const(-1), t)))
        return terms[0] if len(terms) == 1 else Sum(terms)

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            f = self.factor()
            factors.append(f if op == "*" else Power(f, -1))
        return factors[0] if len(factors) == 1 else Product(factors)

    def factor(self) -> Expr:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            return Power(base, self.integer())
        return base

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.peek() in ("+", "-"):
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.error("expected integer exponent", start)
        return int(self.text[start:self.pos])

    def atom(self) -> Expr:
        ch = self.peek()
        if not ch:
            self.error("unexpected end of input")
        if ch == "-":
            self.pos += 1
            return Product((Const(-1), self.factor()))
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] == ".":
                self.error("decimal numbers are not allowed; use p/q", start)
            return Const(int(self.text[start:self.pos]))
        if _is_ident_start(ch):
            start = self.pos
            while self.pos < len(self.text) and _is_ident_char(self.text[self.pos]):
                self.pos += 1
            name = self.text[start:self.pos]
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    self.error(f"unknown function {name!r}", start)
                self.pos += 1
                arg = self.expr()
                self.expect(")")
                return Func(name, arg)
            return self.identifier(name, start)
        self.error(f"unexpected {ch!r}")

    def identifier(self, name: str, start: int) -> Expr:
        if name in self.chart:
            return self.chart[name]
        if name in self.params:
            return Param(name)
        m = _JET.match(name)
        if m:
            i = int(m.group(1))
            s = int(m.group(2) or 1)
            if not 1 <= i <= self.n:
                self.error(f"jet variable {name!r} refers to coordinate {i} of a {self.n}-dimensional chart", start)
            if not 1 <= s <= MAX_JET_ORDER:
                self.error(f"jet order {s} outside 1..{MAX_JET_ORDER}", start)
            return Jet(i - 1, s)
        self.error(f"unknown identifier {name!r}", start)


def parse_raw(text: str, chart: Sequence[str] = (), params: Iterable[str] = ()) -> Expr:
    return _Parser(text, chart, params).parse()


def parse_expr(text: str, chart: Sequence[str] = (), params: Iterable[str] = ()) -> Expr:
    """Parse ``text`` over the coordinate names ``chart`` and return the canonical form."""
    return canonical(parse_raw(text, chart, params))
