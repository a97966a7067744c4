"""A small arithmetic expression language for user-defined maps and gauges.

Grammar (lowest precedence first)::

    expr    := compare ("?" expr ":" expr)?
    compare := sum (("==" | "!=" | "<" | "<=" | ">" | ">=") sum)?
    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := "-" unary | primary
    primary := NUMBER | "x" | "y" | FUNC "(" expr ")" | "(" expr ")"

``FUNC`` is ``abs`` or ``sqrt``. A comparison is only legal as the condition
of a ``? :`` conditional. ``==`` and ``!=`` compare within ``eps_eq``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ExpressionError

VARIABLES = ("x", "y")
FUNCTIONS = {"abs": abs, "sqrt": math.sqrt}
COMPARISONS = ("==", "!=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Cond:
    test: Compare
    then: "Expr"
    orelse: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call, Cond]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>==|!=|<=|>=|[-+*/()?:<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            raise ExpressionError(f"expected {text!r}, found {self._describe(self.tok)}", self.tok.pos)
        return self.advance()

    @staticmethod
    def _describe(t: _Tok) -> str:
        return "end of input" if t.kind == "end" else repr(t.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ExpressionError(f"unexpected {self._describe(self.tok)}", self.tok.pos)
        return e

    def expr(self) -> Expr:
        start = self.tok.pos
        left = self.compare()
        if self.tok.text == "?":
            if not isinstance(left, Compare):
                raise ExpressionError("conditional test must be a comparison", start)
            self.advance()
            then = self.expr()
            self.expect(":")
            orelse = self.expr()
            return Cond(left, then, orelse)
        if isinstance(left, Compare):
            raise ExpressionError("comparison is only allowed as a conditional test", start)
        return left

    def compare(self):
        left = self.sum()
        if self.tok.text in COMPARISONS:
            op = self.advance().text
            right = self.sum()
            if self.tok.text in COMPARISONS:
                raise ExpressionError("comparisons do not chain", self.tok.pos)
            return Compare(op, left, right)
        return left

    def sum(self) -> Expr:
        left = self.product()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            left = BinOp(op, left, self.product())
        return left

    def product(self) -> Expr:
        left = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ExpressionError(f"numeric literal {t.text!r} out of range", t.pos)
            return Num(value)
        if t.kind == "name":
            self.advance()
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            raise ExpressionError(f"unknown identifier {t.text!r}", t.pos)
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ExpressionError(f"expected a value, found {self._describe(t)}", t.pos)


def parse(src: str) -> Expr:
    """Parse ``src``; errors carry the 0-based offset of the offending token."""
    return _Parser(src).parse()


def evaluate(e: Expr, bindings: Mapping[str, float], eps_eq: float = 1e-10) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            v = bindings[e.name]
        except KeyError:
            raise ExpressionError(f"unbound variable {e.name!r}") from None
        if v is None:
            raise ExpressionError(f"unbound variable {e.name!r}")
        return float(v)
    if isinstance(e, Neg):
        return -evaluate(e.operand, bindings, eps_eq)
    if isinstance(e, BinOp):
        a = evaluate(e.left, bindings, eps_eq)
        b = evaluate(e.right, bindings, eps_eq)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise ExpressionError("division by zero")
        return a / b
    if isinstance(e, Call):
        v = evaluate(e.arg, bindings, eps_eq)
        if e.func == "sqrt" and v < 0:
            raise ExpressionError("sqrt of a negative number")
        return float(FUNCTIONS[e.func](v))
    if isinstance(e, Cond):
        return evaluate(e.then if _test(e.test, bindings, eps_eq) else e.orelse, bindings, eps_eq)
    raise TypeError(f"not an expression node: {e!r}")


def _test(c: Compare, bindings, eps_eq: float) -> bool:
    a = evaluate(c.left, bindings, eps_eq)
    b = evaluate(c.right, bindings, eps_eq)
    close = abs(a - b) <= eps_eq
    return {
        "==": close,
        "!=": not close,
        "<": a < b,
        "<=": a <= b,
        ">": a > b,
        ">=": a >= b,
    }[c.op]


def variables(e) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, (BinOp, Compare)):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Cond):
        return variables(e.test) | variables(e.then) | variables(e.orelse)
    raise TypeError(f"not an expression node: {e!r}")


def to_source(e) -> str:
    """Print ``e`` so that ``parse(to_source(e)) == e``.

    Binary operations and conditionals are fully parenthesized.
    """
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"-{to_source(e.operand)}"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Compare):
        return f"{to_source(e.left)} {e.op} {to_source(e.right)}"
    if isinstance(e, Cond):
        return f"({to_source(e.test)} ? {to_source(e.then)} : {to_source(e.orelse)})"
    raise TypeError(f"not an expression node: {e!r}")
