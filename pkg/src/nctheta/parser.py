"""Recursive-descent parser for the ASCII element grammar.

    element := ["+"|"-"] term (("+"|"-") term)*
    term    := factor ("*" factor)*
    factor  := primary "'"* ("^" exponent)?
    primary := rational ["i"] | "i" | "rho" | gen | "(" element ")"

``'`` is the adjoint, ``rho^k`` accepts half-integers (``rho^(-1/2)``), and
unitary torus generators accept negative integer powers.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import AlgebraElement, Presentation
from .phase import PhaseScalar

__all__ = ["ParseError", "UnknownGenerator", "parse_element"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<name>[A-Za-z]+\d*)|(?P<sym>[-+*^()']))"
)


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        self.message = message
        super().__init__(f"{message} at position {position}\n  {text}\n  {' ' * position}^")


class UnknownGenerator(ParseError):
    pass


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, pres: Presentation):
        self.text = text
        self.pres = pres
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value:
            shown = tok[1] or "end of input"
            raise self.error(f"expected {value!r}, got {shown!r}")
        return self.take()

    def parse(self) -> AlgebraElement:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        out = self.element()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return out

    def element(self) -> AlgebraElement:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "sym":
            sign = -1 if self.take()[1] == "-" else 1
        out = self.term()
        if sign < 0:
            out = -out
        while self.peek()[0] == "sym" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> AlgebraElement:
        out = self.factor()
        while self.peek()[1] == "*" and self.peek()[0] == "sym":
            self.take()
            out = out * self.factor()
        return out

    def exponent(self, allow_half: bool) -> Fraction:
        if self.peek()[1] == "(":
            self.take()
            val = self.exponent(allow_half)
            self.expect(")")
            return val
        sign = 1
        if self.peek()[1] in ("-", "+") and self.peek()[0] == "sym":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num":
            raise self.error("expected an exponent", tok)
        val = Fraction(tok[1]) * sign
        if (val * 2).denominator != 1 or (not allow_half and val.denominator != 1):
            kind = "half-integer" if allow_half else "integer"
            raise self.error(f"exponent must be an {kind}", tok)
        return val

    def factor(self) -> AlgebraElement:
        tok = self.peek()
        pres = self.pres
        if tok[0] == "num":
            self.take()
            c = Fraction(tok[1])
            nxt = self.peek()
            if nxt[0] == "name" and nxt[1] == "i" and nxt[2] == tok[2] + len(tok[1]):
                self.take()
                val = pres.scalar(PhaseScalar.const((0, c)))
            else:
                val = pres.scalar(c)
            return self.postfix(val, tok, is_unitary=False)
        if tok[0] == "name":
            self.take()
            name = tok[1]
            if name == "i":
                return self.postfix(pres.scalar(PhaseScalar.const((0, 1))), tok, is_unitary=False)
            if name == "rho":
                star = False
                while self.peek()[1] == "'":
                    self.take()
                    star = not star
                k = Fraction(1)
                if self.peek()[1] == "^":
                    self.take()
                    k = self.exponent(allow_half=True)
                return pres.scalar(PhaseScalar.rho(-k if star else k))
            if name not in pres.generators:
                raise UnknownGenerator(f"unknown generator {name!r} for {pres}", self.text, tok[2])
            return self.postfix(pres.gen(name), tok, is_unitary=pres.is_torus)
        if tok[1] == "(":
            self.take()
            inner = self.element()
            self.expect(")")
            return self.postfix(inner, tok, is_unitary=False)
        shown = tok[1] or "end of input"
        raise self.error(f"unexpected {shown!r}")

    def postfix(self, val: AlgebraElement, tok, is_unitary: bool) -> AlgebraElement:
        while self.peek()[1] == "'" and self.peek()[0] == "sym":
            self.take()
            val = val.adjoint()
        if self.peek()[1] == "^" and self.peek()[0] == "sym":
            self.take()
            etok = self.peek()
            e = self.exponent(allow_half=False)
            if e < 0 and not is_unitary:
                raise self.error("negative powers are only allowed for unitary generators", etok)
            val = val ** int(e)
        return val


def parse_element(text: str, pres: Presentation) -> AlgebraElement:
    """Parse ``text`` into a normalized element of ``pres``."""
    return _Parser(text, pres).parse()
