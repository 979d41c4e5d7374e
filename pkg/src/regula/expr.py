"""Expression parser and canonical printer for rational functions.

Grammar: integer literals, one named variable, ``+ - * / ^`` with integer
exponents, parentheses, unary minus.  ``^`` binds tightest, then unary
minus, then ``* /``, then ``+ -``; ``* /`` and ``+ -`` associate left.
Rationals are written as divisions ("1/2"), which exact field arithmetic
makes indistinguishable from literals.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import Poly, RatFunc


class ExprSyntaxError(ValueError):
    """Parse failure, carrying the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Parser:
    def __init__(self, src: str, variable: str):
        self.src = src
        self.variable = variable
        self.pos = 0

    def parse(self) -> RatFunc:
        if not self.src.strip():
            raise ExprSyntaxError("empty expression", 0)
        value = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            raise ExprSyntaxError(f"unexpected {self.src[self.pos]!r}", self.pos)
        return value

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expr(self) -> RatFunc:
        value = self.term()
        while (op := self.peek()) in ("+", "-"):
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while (op := self.peek()) in ("*", "/"):
            opos = self.pos
            self.pos += 1
            rhs = self.unary()
            if op == "/":
                if rhs.is_zero:
                    raise ExprSyntaxError("division by zero", opos)
                value = value / rhs
            else:
                value = value * rhs
        return value

    def unary(self) -> RatFunc:
        if self.peek() == "-":
            self.pos += 1
            return -self.unary()
        return self.power()

    def power(self) -> RatFunc:
        value = self.atom()
        while self.peek() == "^":
            opos = self.pos
            self.pos += 1
            exponent = self.integer()
            if exponent < 0 and value.is_zero:
                raise ExprSyntaxError("zero raised to a negative power", opos)
            value = value ** exponent
        return value

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.src) and self.src[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise ExprSyntaxError("expected an integer exponent", start)
        return int(self.src[start:self.pos])

    def atom(self) -> RatFunc:
        self.skip_ws()
        if self.pos >= len(self.src):
            raise ExprSyntaxError("unexpected end of expression", self.pos)
        ch = self.src[self.pos]
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise ExprSyntaxError("expected ')'", self.pos)
            self.pos += 1
            return value
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.src) and self.src[self.pos].isdigit():
                self.pos += 1
            return RatFunc.const(int(self.src[start:self.pos]), self.variable)
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.src) and (
                self.src[self.pos].isalnum() or self.src[self.pos] == "_"
            ):
                self.pos += 1
            name = self.src[start:self.pos]
            if name != self.variable:
                raise ExprSyntaxError(
                    f"unknown symbol {name!r} (variable is {self.variable!r})", start
                )
            return RatFunc.variable(self.variable)
        raise ExprSyntaxError(f"unexpected {ch!r}", self.pos)


def parse_expr(src: str, variable: str = "x") -> RatFunc:
    """Parse ``src`` into a canonical rational function in ``variable``."""
    return _Parser(src, variable).parse()


def _print_coeff_term(c: Fraction, var: str, k: int, leading: bool) -> str:
    sign = "-" if c < 0 else ("" if leading else "+")
    mag = abs(c)
    if k == 0:
        body = str(mag)
    else:
        x = var if k == 1 else f"{var}^{k}"
        body = x if mag == 1 else f"{mag}*{x}"
    return sign + body


def print_poly(p: Poly) -> str:
    """Descending-power rendering; reparses to the same polynomial."""
    if p.is_zero:
        return "0"
    parts = []
    for k in range(int(p.degree), -1, -1):
        c = p.coeff(k)
        if c != 0:
            parts.append(_print_coeff_term(c, p.var, k, leading=not parts))
    return "".join(parts)


def _term_count(p: Poly) -> int:
    return sum(1 for c in p.coeffs if c != 0)


def print_expr(f: RatFunc) -> str:
    """Deterministic canonical rendering with parse(print(f)) == f."""
    num = print_poly(f.num)
    if f.den.degree == 0:  # canonical denominator 1
        return num
    den = print_poly(f.den)
    if _term_count(f.den) > 1:
        den = f"({den})"
    if _term_count(f.num) > 1:
        num = f"({num})"
    return f"{num}/{den}"
