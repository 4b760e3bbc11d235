"""Recursive-descent parser for the property language.

::

    implication := disjunction ('->' implication)?
    disjunction := conjunction ('|' conjunction)*
    conjunction := until ('&' until)*
    until       := unary ('U' bound until)?
    unary       := '!' unary | ('F' | 'G') bound unary | primary
    primary     := 'true' | 'false' | atom | '(' implication ')'
    bound       := '<=' (number | name) | '#' integer
    atom        := name | name ('<'|'<='|'='|'!='|'>='|'>') number

Numbers in bounds may carry a unit suffix (``s``, ``m``, ``h``, ``d``),
converted with :data:`petrismc.units.SECONDS_PER_UNIT`.
"""

from __future__ import annotations

import re
import warnings
from typing import Mapping, Optional

from ..errors import ParseError
from ..units import UNIT_SUFFIXES, to_time_units
from .formula import (
    FALSE,
    TRUE,
    And,
    BoolVar,
    Bound,
    Compare,
    Eventually,
    Formula,
    Globally,
    Implies,
    Not,
    Or,
    Until,
    bounds,
)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?|\.[0-9]+(?:[eE][+-]?[0-9]+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|!=|==|[()!&|<>=#-])
""", re.VERBOSE)

_KEYWORDS = {"F", "G", "U", "true", "false"}
_CMP = {"<", "<=", "=", "==", "!=", ">=", ">"}


class MixedBoundsWarning(UserWarning):
    """A formula mixes time bounds with step-count bounds."""


class _Tok:
    __slots__ = ("kind", "text", "line", "col", "pos")

    def __init__(self, kind, text, line, col, pos):
        self.kind, self.text, self.line, self.col, self.pos = kind, text, line, col, pos

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), pos):
                if ch == "\n":
                    line, line_start = line + 1, i + 1
        else:
            if kind == "ident" and m.group() in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1, pos))
    return toks


class _Parser:
    def __init__(self, text, propositions, constants):
        self.toks = _tokenize(text)
        self.i = 0
        self.props = propositions or {}
        self.consts = constants or {}

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, text):
        if self.tok.kind in ("op", "kw") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self):
        if self.tok.kind == "eof":
            raise self.error("empty formula")
        f = self.implication()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.accept("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.accept("&"):
            f = And(f, self.until())
        return f

    def until(self):
        left = self.unary()
        if self.accept("U"):
            b = self.bound()
            return Until(left, self.until(), b)
        return left

    def unary(self):
        if self.accept("!"):
            return Not(self.unary())
        tok = self.tok
        if tok.kind == "kw" and tok.text in ("F", "G"):
            self.advance()
            b = self.bound()
            arg = self.unary()
            return Eventually(arg, b) if tok.text == "F" else Globally(arg, b)
        return self.primary()

    def number(self, allow_unit=False):
        tok = self.tok
        sign = 1
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            sign = -1
            tok = self.tok
        if tok.kind != "num":
            raise self.error(f"expected a number, found {tok.text or 'end of input'!r}")
        self.advance()
        text = tok.text
        value = int(text) if text.isdigit() else float(text)
        nxt = self.tok
        if allow_unit and nxt.kind == "ident" and nxt.text in UNIT_SUFFIXES \
                and nxt.pos == tok.pos + len(text):
            self.advance()
            value = to_time_units(value, nxt.text)
        return sign * value, tok

    def bound(self):
        tok = self.tok
        if self.accept("<="):
            if self.tok.kind == "ident":
                name = self.advance()
                if name.text not in self.consts:
                    raise self.error(f"unknown bound constant {name.text!r}", name)
                value = self.consts[name.text]
            else:
                value, _ = self.number(allow_unit=True)
            if not value > 0:
                raise self.error(f"bound must be positive, got {value}", tok)
            try:
                return Bound(float(value))
            except ValueError as e:
                raise self.error(str(e), tok) from None
        if self.accept("#"):
            value, ntok = self.number()
            if type(value) is not int or value < 1:
                raise self.error(f"step bound must be a positive integer, got {value}", ntok)
            return Bound(value, steps=True)
        found = tok.text or "end of input"
        raise self.error(f"expected a bound ('<=T' or '#n'), found {found!r}")

    def primary(self):
        tok = self.tok
        if self.accept("("):
            f = self.implication()
            self.expect(")")
            return f
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if tok.kind == "ident":
            self.advance()
            op = self.tok
            if op.kind == "op" and op.text in _CMP:
                if tok.text in self.props:
                    raise self.error(f"{tok.text!r} names a proposition and cannot be compared", tok)
                self.advance()
                value, _ = self.number()
                return Compare(tok.text, "=" if op.text == "==" else op.text, value)
            if tok.text in self.props:
                return self.props[tok.text]
            return BoolVar(tok.text)
        if tok.kind == "kw":
            raise self.error(f"unexpected operator {tok.text!r}")
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse(text: str, propositions: Optional[Mapping[str, Formula]] = None,
          constants: Optional[Mapping[str, float]] = None) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    ``propositions`` maps names to formulas substituted in place of a bare
    identifier; ``constants`` maps names usable as time bounds (``F<=T p``).
    """
    f = _Parser(text, propositions, constants).parse()
    kinds = {b.steps for b in bounds(f)}
    if len(kinds) == 2:
        warnings.warn(f"formula mixes time and step bounds: {text}", MixedBoundsWarning,
                      stacklevel=2)
    return f
