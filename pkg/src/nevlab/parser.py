"""Expression grammar for exponential polynomials.

::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-') factor | atom ('^' uint)*
    atom   := number | number 'i' | 'i' | 'z' | 'exp' '(' expr ')' | '(' expr ')'
            | 'sqrt' '(' expr ')' | 'sqrt' uint | 'pi'

``exp`` arguments must reduce to ``c*z``; division is only by nonzero
constants.  ``sqrt`` and ``pi`` exist in float mode only.  Whitespace is
insignificant.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonRepresentableScalar, ParseError
from .exp_poly import ExpPoly
from .scalars import EXACT, FLOAT, GaussianRational, format_scalar

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+/\d+(?![\d.])|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, domain: str):
        self.text = text
        self.domain = domain
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.pos, self.text)

    def eat(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.eat(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def parse(self) -> ExpPoly:
        if self.tok.kind == "end":
            self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> ExpPoly:
        acc = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> ExpPoly:
        acc = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op_tok = self.tok
            self.i += 1
            rhs = self.factor()
            if op_tok.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    self.error("division only by nonzero constants", op_tok)
                acc = acc.scale(1 / rhs.value_at_zero())
        return acc

    def factor(self) -> ExpPoly:
        if self.tok.kind == "op" and self.tok.text in ("+", "-"):
            neg = self.tok.text == "-"
            self.i += 1
            f = self.factor()
            return -f if neg else f
        base = self.atom()
        while self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.error("exponent must be an unsigned integer")
            self.i += 1
            base = base ** int(t.text)
        return base

    def _const(self, value) -> ExpPoly:
        return ExpPoly.constant(value, self.domain)

    def _number(self, text: str):
        if self.domain == EXACT:
            return GaussianRational(Fraction(text))
        if "/" in text:
            p, q = text.split("/")
            return complex(int(p) / int(q))
        return complex(float(text))

    def atom(self) -> ExpPoly:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            val = self._number(t.text)
            nxt = self.tok
            if nxt.kind == "name" and nxt.text == "i" and nxt.pos == t.pos + len(t.text):
                self.i += 1
                val = val * (GaussianRational(0, 1) if self.domain == EXACT else 1j)
            return self._const(val)
        if t.kind == "name":
            self.i += 1
            name = t.text
            if name == "i":
                return self._const(GaussianRational(0, 1) if self.domain == EXACT else 1j)
            if name == "z":
                return ExpPoly.z(self.domain)
            if name == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return self._exp(arg, t)
            if name == "pi":
                self._float_only("pi", t)
                return self._const(math.pi)
            if name == "sqrt" or re.fullmatch(r"sqrt\d+", name):
                self._float_only(name, t)
                if name == "sqrt":
                    self.expect("(")
                    arg = self.expr()
                    self.expect(")")
                    if not arg.is_constant():
                        self.error("sqrt needs a constant argument", t)
                    return self._const(cmath.sqrt(complex(arg.value_at_zero())))
                return self._const(math.sqrt(int(name[4:])))
            self.error(f"unknown identifier {name!r}", t)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def _float_only(self, name: str, tok: _Tok) -> None:
        if self.domain == EXACT:
            raise NonRepresentableScalar(
                f"{name!r} is not an exact Gaussian rational (parse in float mode)", tok.pos, self.text
            )

    def _exp(self, arg: ExpPoly, tok: _Tok) -> ExpPoly:
        if arg.is_zero():
            return self._const(1)
        if not arg.is_polynomial():
            self.error("exp argument must be linear in z", tok)
        coeffs = arg.terms[0][1].coeffs
        if len(coeffs) != 2 or coeffs[0] != 0:
            self.error("exp argument must have the form c*z", tok)
        return ExpPoly.exp(coeffs[1], 1, self.domain)


def parse(text: str, domain: str = EXACT) -> ExpPoly:
    """Parse ``text`` into a normalized :class:`ExpPoly` of ``domain``."""
    if domain not in (EXACT, FLOAT):
        raise ValueError(f"unknown domain {domain!r}")
    return _Parser(text, domain).parse()


def parse_float(text: str) -> ExpPoly:
    return parse(text, FLOAT)


def _format_poly(coeffs) -> str:
    parts = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        s = format_scalar(c)
        if k == 0:
            parts.append(s)
        elif k == 1:
            parts.append(f"{s}*z")
        else:
            parts.append(f"{s}*z^{k}")
    return " + ".join(parts)


def format_exppoly(f: ExpPoly) -> str:
    """Inverse of :func:`parse` (structurally, in the exact domain)."""
    if f.is_zero():
        return "0"
    out = []
    for freq, p in f.terms:
        poly = _format_poly(p.coeffs)
        if freq == 0:
            out.append(f"({poly})")
        else:
            out.append(f"({poly})*exp({format_scalar(freq)}*z)")
    return " + ".join(out)
