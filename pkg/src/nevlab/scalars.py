"""Scalar domains: exact Gaussian rationals and double-precision complex.

Exact values are :class:`GaussianRational`; float values are plain Python
``complex``.  Conversion exact -> float is explicit (``complex(q)``) and there
is no way back.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

EXACT = "exact"
FLOAT = "float"

# float-domain frequencies closer than this are bucketed together
FREQ_BUCKET_TOL = 1e-12


class GaussianRational:
    """Complex number ``re + im*i`` with ``Fraction`` parts."""

    __slots__ = ("im", "re")

    def __init__(self, re=0, im=0):
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("GaussianRational refuses float inputs; use Fraction or str")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value, 0)
        raise TypeError(f"cannot treat {value!r} as an exact scalar")

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        d = o.norm()
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def sort_key(self):
        return (self.re, self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[GaussianRational, complex]


def is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


def to_complex(x) -> complex:
    return complex(x)


def scalar_zero(domain: str) -> Scalar:
    return GaussianRational(0) if domain == EXACT else 0j


def scalar_one(domain: str) -> Scalar:
    return GaussianRational(1) if domain == EXACT else 1 + 0j


def as_scalar(value, domain: str) -> Scalar:
    """Convert an int/Fraction/GaussianRational/complex to ``domain``."""
    if domain == EXACT:
        if isinstance(value, (float, complex)):
            raise TypeError("float values cannot enter the exact domain")
        return GaussianRational.coerce(value)
    return complex(value)


def freq_sort_key(freq: Scalar, domain: str):
    """Canonical frequency order: lexicographic on (Re, Im)."""
    if domain == EXACT:
        return (freq.re, freq.im)
    # bucketed so that tolerance-equal frequencies sort identically
    q = FREQ_BUCKET_TOL
    return (round(freq.real / q) * q, round(freq.imag / q) * q)


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x: Scalar) -> str:
    """Render a scalar in the expression grammar (always parenthesized if compound)."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            s = _fmt_fraction(x.re)
            return s if x.re >= 0 else f"({s})"
        im = _fmt_fraction(abs(x.im))
        im_part = "i" if abs(x.im) == 1 else f"{im}*i"
        if x.re == 0:
            return f"({'-' if x.im < 0 else ''}{im_part})"
        sign = "-" if x.im < 0 else "+"
        return f"({_fmt_fraction(x.re)}{sign}{im_part})"
    x = complex(x)
    if x.imag == 0:
        s = repr(x.real)
        return s if x.real >= 0 and "e" not in s else f"({s})"
    sign = "-" if x.imag < 0 or (x.imag == 0 and math.copysign(1, x.imag) < 0) else "+"
    return f"({x.real!r}{sign}{abs(x.imag)!r}*i)"
