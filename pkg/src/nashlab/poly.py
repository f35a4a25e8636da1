"""Sparse multivariate polynomials with exact rational coefficients.

Symbolic operations (arithmetic, differentiation, translation, initial
forms) are exact over :class:`fractions.Fraction`; numerical evaluation
uses double precision.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    BasePointNotOnVariety,
    DimensionMismatch,
    ParseError,
    UnknownVariable,
    ZeroPolynomial,
)

Exponent = tuple[int, ...]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {value!r}")
    return Fraction(value)


class Polynomial:
    """Immutable sparse polynomial in ``num_vars`` variables.

    ``terms`` maps exponent tuples to nonzero rational coefficients; the
    zero polynomial has no terms.
    """

    __slots__ = ("num_vars", "_terms", "__dict__")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, object] = ()):
        if num_vars < 1:
            raise ValueError("num_vars must be positive")
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in dict(terms).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise DimensionMismatch(
                    f"exponent {exp} has length {len(exp)}, expected {num_vars}"
                )
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = clean.get(exp, Fraction(0)) + _as_fraction(coeff)
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self.num_vars = num_vars
        self._terms = clean

    # construction helpers

    @classmethod
    def constant(cls, value, num_vars: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "Polynomial":
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, {tuple(exp): 1})

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    @cached_property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    @cached_property
    def min_degree(self) -> int:
        return min((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def homogeneous_part(self, degree: int) -> "Polynomial":
        return Polynomial(
            self.num_vars, {e: c for e, c in self._terms.items() if sum(e) == degree}
        )

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise DimensionMismatch("polynomials in different numbers of variables")
            return other
        return Polynomial.constant(other, self.num_vars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.num_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.num_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1, self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        return hash((self.num_vars, frozenset(self._terms.items())))

    def __repr__(self):
        return f"Polynomial({self.num_vars}, {self._terms!r})"

    def __str__(self):
        return format_polynomial(self)

    # calculus

    def derivative(self, index: int) -> "Polynomial":
        terms = {}
        for e, c in self._terms.items():
            if e[index]:
                d = list(e)
                d[index] -= 1
                terms[tuple(d)] = c * e[index]
        return Polynomial(self.num_vars, terms)

    def gradient(self) -> list["Polynomial"]:
        return [self.derivative(i) for i in range(self.num_vars)]

    # evaluation

    @cached_property
    def _float_terms(self):
        return [(e, float(c)) for e, c in self._terms.items()]

    def _check_point(self, point):
        if len(point) != self.num_vars:
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, polynomial has {self.num_vars} variables"
            )

    def evaluate(self, point: Sequence):
        """Evaluate in floating point; complex coordinates are accepted."""
        self._check_point(point)
        total = 0.0
        for e, c in self._float_terms:
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def evaluate_abs(self, point: Sequence) -> float:
        """Sum of absolute term values; the scale against which rounding is judged."""
        self._check_point(point)
        total = 0.0
        for e, c in self._float_terms:
            term = abs(c)
            for x, k in zip(point, e):
                if k:
                    term *= abs(x) ** k
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> Fraction:
        self._check_point(point)
        pt = [_as_fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x**k
            total += term
        return total

    # substitutions

    def translate(self, base: Sequence) -> "Polynomial":
        """Return q with q(u) = p(u + base), exactly."""
        self._check_point(base)
        shifted = [
            Polynomial.variable(i, self.num_vars) + _as_fraction(b)
            for i, b in enumerate(base)
        ]
        return self.compose(shifted)

    def compose(self, substitutions: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute polynomial ``substitutions[i]`` for variable i."""
        if len(substitutions) != self.num_vars:
            raise DimensionMismatch("one substitution per variable required")
        m = substitutions[0].num_vars
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = substitutions[i] ** k
            return powers[(i, k)]

        result = Polynomial(m)
        for e, c in self._terms.items():
            term = Polynomial.constant(c, m)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def restrict_to_line(self, origin: Sequence, direction: Sequence) -> list[Fraction]:
        """Coefficients (low to high) of s -> p(origin + s*direction), exactly."""
        self._check_point(origin)
        self._check_point(direction)
        lines = [(_as_fraction(a), _as_fraction(v)) for a, v in zip(origin, direction)]
        cache: dict[tuple[int, int], list[Fraction]] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                if k == 0:
                    cache[key] = [Fraction(1)]
                else:
                    cache[key] = _upoly_mul(power(i, k - 1), list(lines[i]))
            return cache[key]

        coeffs = [Fraction(0)] * (max(self.degree, 0) + 1)
        for e, c in self._terms.items():
            term = [c]
            for i, k in enumerate(e):
                if k:
                    term = _upoly_mul(term, power(i, k))
            for j, a in enumerate(term):
                coeffs[j] += a
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs

    def initial_form(self, base: Sequence) -> "Polynomial":
        """Lowest-degree homogeneous part of p translated to ``base``."""
        if self.is_zero():
            raise ZeroPolynomial("initial form of the zero polynomial")
        value = self.evaluate_exact(base)
        if value != 0:
            raise BasePointNotOnVariety(f"p(base) = {value} != 0")
        local = self.translate(base)
        return local.homogeneous_part(local.min_degree)


def _upoly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def grlex_key(exp: Exponent):
    return (sum(exp), exp)


def _format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def default_variables(num_vars: int) -> list[str]:
    if num_vars <= 3:
        return ["x", "y", "z"][:num_vars]
    return [f"x{i}" for i in range(num_vars)]


def format_polynomial(p: Polynomial, variables: Sequence[str] | None = None) -> str:
    """Canonical text: terms in descending graded-lex order."""
    names = list(variables) if variables is not None else default_variables(p.num_vars)
    if len(names) != p.num_vars:
        raise DimensionMismatch("one name per variable required")
    if p.is_zero():
        return "0"
    pieces = []
    for exp in sorted(p._terms, key=grlex_key, reverse=True):
        c = p._terms[exp]
        factors = []
        for name, k in zip(names, exp):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = _format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_rational(mag)] + factors)
        sign = "-" if c < 0 else "+"
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", text, pos + stripped)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _PolyParser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(variables)}
        self.n = len(variables)
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def expect_op(self, op):
        tok = self.advance()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        # a leading sign is accepted so that canonical output always re-parses
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.advance()
            sign = -1 if tok[1] == "-" else 1
        p = self.term() * sign
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.advance()
                q = self.term()
                p = p + q if tok[1] == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.advance()
            p = p * self.factor()
        return p

    def factor(self) -> Polynomial:
        p = self.base()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.advance()
            exp_tok = self.advance()
            if exp_tok[0] != "num" or not exp_tok[1].isdigit():
                self.fail("exponent must be an unsigned integer", exp_tok)
            p = p ** int(exp_tok[1])
        return p

    def base(self) -> Polynomial:
        tok = self.advance()
        kind, value, pos = tok
        if kind == "name":
            if value not in self.names:
                raise UnknownVariable(f"unknown variable {value!r}", self.text, pos)
            return Polynomial.variable(self.names[value], self.n)
        if kind == "num":
            if value.isdigit():
                c = Fraction(int(value))
                nxt = self.peek()
                if nxt[0] == "op" and nxt[1] == "/":
                    self.advance()
                    den = self.advance()
                    if den[0] != "num" or not den[1].isdigit():
                        self.fail("denominator must be an unsigned integer", den)
                    if int(den[1]) == 0:
                        self.fail("zero denominator", den)
                    c = Fraction(int(value), int(den[1]))
            else:
                c = Fraction(value)
            return Polynomial.constant(c, self.n)
        if kind == "op" and value == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        self.fail(f"unexpected token {value!r}" if kind != "end" else "unexpected end of input", tok)


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``text`` in the polynomial grammar over the named variables."""
    variables = list(variables)
    if not variables:
        raise ValueError("at least one variable is required")
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    return _PolyParser(text, variables).parse()


def parse_equation(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``lhs = rhs`` (or a bare polynomial) as ``lhs - rhs``."""
    if text.count("=") > 1:
        raise ParseError("more than one '='", text, text.rfind("="))
    if "=" in text:
        lhs, rhs = text.split("=")
        left = parse_polynomial(lhs, variables)
        try:
            right = parse_polynomial(rhs, variables)
        except ParseError as exc:
            offset = len(lhs) + 1
            raise type(exc)(str(exc).split(" at position")[0], text, exc.pos + offset) from None
        return left - right
    return parse_polynomial(text, variables)


def gradient(p: Polynomial) -> list[Polynomial]:
    return p.gradient()


def evaluate(p: Polynomial, point: Iterable[float]):
    return p.evaluate(list(point))


def initial_form(p: Polynomial, base: Sequence) -> Polynomial:
    return p.initial_form(base)
