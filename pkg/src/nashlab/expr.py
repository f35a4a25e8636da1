"""Closed-form scalar expressions in one variable.

A small interpreter for graph functions such as ``x^3*exp(-1/x)``:
rational functions, rational powers of positive arguments, ``exp``,
``log`` and ``sqrt``, with structural differentiation.

Besides plain float evaluation every node can be evaluated as a
:class:`LogValue` (sign and log-magnitude), which keeps flat functions
like ``exp(-1/x^2)`` usable far below the double-precision underflow
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import ParseError
from .poly import tokenize


class LogValue(NamedTuple):
    """A real number stored as ``sign * exp(log)``."""

    sign: int
    log: float

    @classmethod
    def of(cls, value: float) -> "LogValue":
        if value == 0:
            return ZERO
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log)
        except OverflowError:
            return self.sign * math.inf

    def __neg__(self):
        return LogValue(-self.sign, self.log)

    def __mul__(self, other: "LogValue"):
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return LogValue(self.sign * other.sign, self.log + other.log)

    def __truediv__(self, other: "LogValue"):
        if other.sign == 0:
            raise ZeroDivisionError("division by zero LogValue")
        if self.sign == 0:
            return ZERO
        return LogValue(self.sign * other.sign, self.log - other.log)

    def __add__(self, other: "LogValue"):
        return log_add(self, other)

    def __sub__(self, other: "LogValue"):
        return log_add(self, -other)


ZERO = LogValue(0, -math.inf)


def log_add(a: LogValue, b: LogValue) -> LogValue:
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    if a.log < b.log:
        a, b = b, a
    gap = b.log - a.log
    if a.sign == b.sign:
        return LogValue(a.sign, a.log + math.log1p(math.exp(gap)))
    if gap == 0.0:
        return ZERO
    return LogValue(a.sign, a.log + math.log1p(-math.exp(gap)))


# AST


class Expr:
    """Base node. Subclasses implement evaluate, evaluate_log, diff, text."""

    precedence = 100

    def evaluate(self, x: float) -> float:
        raise NotImplementedError

    def evaluate_log(self, x: float) -> LogValue:
        raise NotImplementedError

    def diff(self) -> "Expr":
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError

    def __call__(self, x: float) -> float:
        return self.evaluate(x)

    def __str__(self):
        return self.text()

    def _wrap(self, child: "Expr", strict=False) -> str:
        s = child.text()
        if child.precedence < self.precedence or (strict and child.precedence == self.precedence):
            return f"({s})"
        return s


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def evaluate(self, x):
        return float(self.value)

    def evaluate_log(self, x):
        return LogValue.of(float(self.value)) if self.value else ZERO

    def diff(self):
        return Const(Fraction(0))

    def text(self):
        v = self.value
        if v < 0:
            return f"-{Const(-v).text()}"
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"

    @property
    def precedence(self):
        if self.value < 0 or self.value.denominator != 1:
            return 2
        return 100


@dataclass(frozen=True)
class Var(Expr):
    name: str = "x"
    precedence = 100

    def evaluate(self, x):
        return float(x)

    def evaluate_log(self, x):
        return LogValue.of(float(x))

    def diff(self):
        return Const(Fraction(1))

    def text(self):
        return self.name


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr
    precedence = 1

    def evaluate(self, x):
        return self.left.evaluate(x) + self.right.evaluate(x)

    def evaluate_log(self, x):
        return log_add(self.left.evaluate_log(x), self.right.evaluate_log(x))

    def diff(self):
        return add(self.left.diff(), self.right.diff())

    def text(self):
        r = self.right
        if isinstance(r, Neg):
            return f"{self._wrap(self.left)} - {self._wrap(r.arg, strict=True)}"
        return f"{self._wrap(self.left)} + {self._wrap(r, strict=True)}"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    precedence = 2

    def evaluate(self, x):
        return -self.arg.evaluate(x)

    def evaluate_log(self, x):
        return -self.arg.evaluate_log(x)

    def diff(self):
        return neg(self.arg.diff())

    def text(self):
        return f"-{self._wrap(self.arg, strict=True)}"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr
    precedence = 2

    def evaluate(self, x):
        return self.left.evaluate(x) * self.right.evaluate(x)

    def evaluate_log(self, x):
        return self.left.evaluate_log(x) * self.right.evaluate_log(x)

    def diff(self):
        return add(mul(self.left.diff(), self.right), mul(self.left, self.right.diff()))

    def text(self):
        return f"{self._wrap(self.left)}*{self._wrap(self.right, strict=True)}"


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr
    precedence = 2

    def evaluate(self, x):
        return self.left.evaluate(x) / self.right.evaluate(x)

    def evaluate_log(self, x):
        return self.left.evaluate_log(x) / self.right.evaluate_log(x)

    def diff(self):
        num = sub(mul(self.left.diff(), self.right), mul(self.left, self.right.diff()))
        return div(num, power(self.right, Fraction(2)))

    def text(self):
        return f"{self._wrap(self.left)}/{self._wrap(self.right, strict=True)}"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction
    precedence = 3

    def evaluate(self, x):
        b = self.base.evaluate(x)
        p = self.exponent
        if p.denominator != 1 and b < 0:
            raise ValueError("rational power of a negative argument")
        try:
            return b ** (int(p) if p.denominator == 1 else float(p))
        except ZeroDivisionError:
            return math.inf
        except OverflowError:
            return math.inf

    def evaluate_log(self, x):
        b = self.base.evaluate_log(x)
        p = self.exponent
        if p.denominator == 1:
            if b.sign == 0:
                if p > 0:
                    return ZERO
                raise ZeroDivisionError("zero to a negative power")
            sign = 1 if (b.sign > 0 or p.numerator % 2 == 0) else -1
            return LogValue(sign, float(p) * b.log)
        if b.sign < 0:
            raise ValueError("rational power of a negative argument")
        if b.sign == 0:
            if p > 0:
                return ZERO
            raise ZeroDivisionError("zero to a negative power")
        return LogValue(1, float(p) * b.log)

    def diff(self):
        p = self.exponent
        return mul(mul(Const(p), power(self.base, p - 1)), self.base.diff())

    def text(self):
        p = self.exponent
        if p.denominator == 1 and p >= 0:
            e = str(p.numerator)
        else:
            e = f"({Const(p).text()})"
        return f"{self._wrap(self.base, strict=True)}^{e}"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def evaluate(self, x):
        try:
            return math.exp(self.arg.evaluate(x))
        except OverflowError:
            return math.inf

    def evaluate_log(self, x):
        return LogValue(1, self.arg.evaluate(x))

    def diff(self):
        return mul(self, self.arg.diff())

    def text(self):
        return f"exp({self.arg.text()})"


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr

    def evaluate(self, x):
        v = self.arg.evaluate(x)
        if v <= 0:
            raise ValueError("log of a non-positive argument")
        return math.log(v)

    def evaluate_log(self, x):
        a = self.arg.evaluate_log(x)
        if a.sign <= 0:
            raise ValueError("log of a non-positive argument")
        return LogValue.of(a.log)

    def diff(self):
        return div(self.arg.diff(), self.arg)

    def text(self):
        return f"log({self.arg.text()})"


# smart constructors with light constant folding


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return Add(a, b)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0) or _is_const(b, 0):
        return Const(Fraction(0))
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        raise ZeroDivisionError("division by constant zero")
    if _is_const(a, 0):
        return a
    if _is_const(b, 1):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value / b.value)
    return Div(a, b)


def power(a: Expr, p: Fraction) -> Expr:
    p = Fraction(p)
    if p == 0:
        return Const(Fraction(1))
    if p == 1:
        return a
    if _is_const(a) and p.denominator == 1 and (a.value != 0 or p > 0):
        return Const(a.value ** int(p))
    return Pow(a, p)


_FUNCTIONS = {
    "exp": Exp,
    "log": Log,
    "sqrt": lambda e: power(e, Fraction(1, 2)),
}


class _ExprParser:
    def __init__(self, text: str, variable: str):
        self.text = text
        self.variable = variable
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def is_op(self, op):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == op

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def expect(self, op):
        tok = self.advance()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.is_op("+") or self.is_op("-"):
            op = self.advance()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.is_op("*") or self.is_op("/"):
            op = self.advance()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self):
        if self.is_op("-"):
            self.advance()
            return neg(self.unary())
        if self.is_op("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.advance()
            return power(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        sign = 1
        if self.is_op("-"):
            self.advance()
            sign = -1
        if self.is_op("("):
            self.advance()
            value = self._signed_rational()
            self.expect(")")
            return sign * value
        tok = self.advance()
        if tok[0] != "num":
            self.fail("exponent must be a number or a parenthesised rational", tok)
        return sign * Fraction(tok[1])

    def _signed_rational(self) -> Fraction:
        sign = 1
        if self.is_op("-"):
            self.advance()
            sign = -1
        tok = self.advance()
        if tok[0] != "num":
            self.fail("expected a number", tok)
        value = Fraction(tok[1])
        if self.is_op("/"):
            self.advance()
            den = self.advance()
            if den[0] != "num" or Fraction(den[1]) == 0:
                self.fail("expected a nonzero denominator", den)
            value /= Fraction(den[1])
        return sign * value

    def atom(self):
        tok = self.advance()
        kind, value, _ = tok
        if kind == "num":
            return Const(Fraction(value))
        if kind == "name":
            if value in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCTIONS[value](arg)
            if value != self.variable:
                from .errors import UnknownVariable

                raise UnknownVariable(f"unknown variable {value!r}", self.text, tok[2])
            return Var(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.fail("unexpected end of input" if kind == "end" else f"unexpected token {value!r}", tok)


def parse_expression(text: str, variable: str = "x") -> Expr:
    """Parse a closed-form expression in a single variable."""
    return _ExprParser(text, variable).parse()
