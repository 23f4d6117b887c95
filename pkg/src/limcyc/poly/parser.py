"""Recursive-descent parser for polynomial phi expressions.

Grammar (whitespace insignificant)::

    expr   := ['+' | '-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' INT)?
    base   := 'x' | 'y' | IDENT | NUMBER | '(' expr ')'

Identifiers other than ``x`` and ``y`` are looked up in ``params`` and
substituted numerically while the polynomial is expanded.
"""

import re

from ..errors import NonPolynomialError, ParseError, UnboundIdentifierError
from .bivariate import BivariatePoly

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


def tokenize(src):
    """List of ``(kind, text, position)``, terminated by an ``('end', '', len)`` token."""
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, ("expression",))
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            tokens.append((text if kind == "op" else kind, text, pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, params):
        self.src = src
        self.params = params
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        if self.tok[0] != kind:
            self.fail(f"unexpected {self._describe()}", (repr(kind),))
        return self.advance()

    def fail(self, message, expected):
        raise ParseError(message, self.tok[2], expected)

    def _describe(self):
        kind, text, _ = self.tok
        return "end of input" if kind == "end" else f"token {text!r}"

    def parse(self):
        if self.tok[0] == "end":
            self.fail("empty expression", ("expression",))
        result = self.expr()
        if self.tok[0] != "end":
            self.fail(f"unexpected {self._describe()}", ("'+'", "'-'", "'*'", "end of input"))
        return result

    def expr(self):
        sign = 1.0
        if self.tok[0] in ("+", "-"):
            sign = -1.0 if self.advance()[0] == "-" else 1.0
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.tok[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.factor()
        while True:
            kind = self.tok[0]
            if kind == "*":
                self.advance()
                acc = acc * self.factor()
            elif kind == "/":
                raise NonPolynomialError("division is not polynomial", self.tok[2], ("'*'",))
            elif kind == "**":
                raise ParseError("use '^' for powers", self.tok[2], ("'^'",))
            else:
                return acc

    def factor(self):
        base = self.base()
        if self.tok[0] != "^":
            if self.tok[0] == "**":
                raise ParseError("use '^' for powers", self.tok[2], ("'^'",))
            return base
        self.advance()
        kind, text, pos = self.tok
        if kind == "-":
            raise NonPolynomialError("negative exponent", pos, ("nonnegative integer",))
        if kind != "number":
            self.fail(f"unexpected {self._describe()}", ("nonnegative integer",))
        if not text.isdigit():
            raise NonPolynomialError(f"non-integer exponent {text!r}", pos,
                                     ("nonnegative integer",))
        self.advance()
        return base ** int(text)

    def base(self):
        kind, text, pos = self.tok
        if kind == "number":
            self.advance()
            return BivariatePoly.constant(float(text))
        if kind == "ident":
            self.advance()
            if text == "x":
                return BivariatePoly.x()
            if text == "y":
                return BivariatePoly.y()
            if text not in self.params:
                raise UnboundIdentifierError(f"unbound identifier {text!r}", pos,
                                             ("x", "y", "a bound parameter"))
            return BivariatePoly.constant(float(self.params[text]))
        if kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail(f"unexpected {self._describe()}", ("'x'", "'y'", "identifier", "number", "'('"))


def parse_phi(src, params=None):
    """Parse ``src`` into its canonical expanded :class:`BivariatePoly`.

    Raises
    ------
    ParseError
        On malformed input; carries ``position`` and ``expected``.
    UnboundIdentifierError
        When an identifier is missing from ``params``.
    NonPolynomialError
        For division and negative or fractional exponents.
    """
    return _Parser(src, dict(params or {})).parse()
