"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('+'|'-') unary | power
    power  := atom ['^' INTEGER]
    atom   := INTEGER | IDENT | '(' expr ')'

Division is only allowed by a nonzero constant, so ``3/4`` and ``x/2`` parse
but ``1/x`` does not.  Error offsets are byte offsets into the UTF-8 text.
"""

import re
from fractions import Fraction
from typing import Sequence

from .errors import ParseError, UnknownVariable
from .polys import Poly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", _byte(text, m.start(3)), text)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
        if pos >= len(text):
            break
    tokens.append(("end", "", len(text)))
    return tokens


def _byte(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.index = {name: i for i, name in enumerate(names)}
        self.n = len(names)
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok):
        raise ParseError(message, _byte(self.text, tok[2]), self.text)

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression", self.peek())
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(f"unexpected {tok[1]!r}", tok)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] in ("*", "/"):
            tok = self.take()
            q = self.unary()
            if tok[0] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.fail("division by a non-constant or zero", tok)
                p = p.scale(1 / q.constant_value())
        return p

    def unary(self):
        tok = self.peek()
        if tok[0] == "-":
            self.take()
            return -self.unary()
        if tok[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a non-negative integer", tok)
            base = base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind = tok[0]
        if kind == "num":
            return Poly.constant(self.n, Fraction(int(tok[1])))
        if kind == "id":
            i = self.index.get(tok[1])
            if i is None:
                raise UnknownVariable(f"unknown variable {tok[1]!r}", _byte(self.text, tok[2]), self.text)
            return Poly.var(self.n, i)
        if kind == "(":
            p = self.expr()
            close = self.take()
            if close[0] != ")":
                self.fail("expected ')'", close)
            return p
        self.fail(f"unexpected {tok[1]!r}" if kind != "end" else "unexpected end of input", tok)


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    """Parse ``text`` into a polynomial over the variables ``names``."""
    return _Parser(text, list(names)).parse()
