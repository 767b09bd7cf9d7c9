"""Exponential polynomials ``sum_i p_i(z) exp(lambda_i z)``.

Values are immutable and normalized on construction: frequencies are merged,
exactly-zero coefficient polynomials are dropped, and terms are sorted by the
canonical frequency order.  Two domains are supported (see
:mod:`nevlab.scalars`); mixing them raises :class:`DomainMismatch`.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import DomainMismatch
from .scalars import (
    EXACT,
    FLOAT,
    FREQ_BUCKET_TOL,
    GaussianRational,
    as_scalar,
    freq_sort_key,
    scalar_one,
    scalar_zero,
)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def _is_zero(c) -> bool:
    return c == 0


class Poly:
    """Polynomial in z; ``coeffs[k]`` multiplies ``z**k``.  Zero is ``()``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __add__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [a[0] * 0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if _is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly(out)

    def scale(self, c) -> Poly:
        return Poly(c * x for x in self.coeffs)

    def derivative(self) -> Poly:
        return Poly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def eval_array(self, zs: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(zs, dtype=complex)
        for c in reversed(self.coeffs):
            acc = acc * zs + complex(c)
        return acc

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"


class ExpPoly:
    """Normalized exponential polynomial over one scalar domain."""

    __slots__ = ("domain", "terms")

    def __init__(self, terms: Iterable[tuple] = (), domain: str = EXACT):
        if domain not in (EXACT, FLOAT):
            raise ValueError(f"unknown domain {domain!r}")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "terms", _normalize(terms, domain))

    def __setattr__(self, name, value):
        raise AttributeError("ExpPoly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, domain: str = EXACT) -> ExpPoly:
        return cls((), domain)

    @classmethod
    def constant(cls, c, domain: str = EXACT) -> ExpPoly:
        return cls([(scalar_zero(domain), Poly([as_scalar(c, domain)]))], domain)

    @classmethod
    def z(cls, domain: str = EXACT) -> ExpPoly:
        return cls([(scalar_zero(domain), Poly([scalar_zero(domain), scalar_one(domain)]))], domain)

    @classmethod
    def exp(cls, freq, coef=1, domain: str = EXACT) -> ExpPoly:
        """``coef * exp(freq * z)``; ``coef`` may be a scalar or a :class:`Poly`."""
        p = coef if isinstance(coef, Poly) else Poly([as_scalar(coef, domain)])
        return cls([(as_scalar(freq, domain), p)], domain)

    @classmethod
    def from_poly(cls, coeffs: Sequence, domain: str = EXACT) -> ExpPoly:
        return cls([(scalar_zero(domain), Poly(as_scalar(c, domain) for c in coeffs))], domain)

    # -- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        return len(self.terms) == 1 and self.terms[0][0] == 0 and self.terms[0][1].is_constant()

    def is_polynomial(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def is_unit(self) -> bool:
        """True iff ``c*exp(lambda z)`` with constant ``c != 0`` (no zeros in C)."""
        return len(self.terms) == 1 and self.terms[0][1].is_constant()

    def freq_support(self) -> list:
        return [f for f, _ in self.terms]

    def max_freq_abs(self) -> float:
        return max((abs(complex(f)) for f, _ in self.terms), default=0.0)

    def max_degree(self) -> int:
        return max((p.degree for _, p in self.terms), default=-1)

    def _check(self, other: ExpPoly) -> None:
        if not isinstance(other, ExpPoly):
            raise TypeError(f"expected ExpPoly, got {type(other).__name__}")
        if other.domain != self.domain:
            raise DomainMismatch(f"cannot combine {self.domain} and {other.domain} exponential polynomials")

    def _lift(self, other) -> ExpPoly:
        if isinstance(other, ExpPoly):
            self._check(other)
            return other
        return ExpPoly.constant(other, self.domain)

    # -- ring operations --------------------------------------------------
    def __add__(self, other) -> ExpPoly:
        other = self._lift(other)
        return ExpPoly(list(self.terms) + list(other.terms), self.domain)

    __radd__ = __add__

    def __neg__(self) -> ExpPoly:
        return ExpPoly([(f, -p) for f, p in self.terms], self.domain)

    def __sub__(self, other) -> ExpPoly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> ExpPoly:
        return self._lift(other) - self

    def __mul__(self, other) -> ExpPoly:
        other = self._lift(other)
        out = []
        for f1, p1 in self.terms:
            for f2, p2 in other.terms:
                out.append((f1 + f2, p1 * p2))
        return ExpPoly(out, self.domain)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ExpPoly:
        return pow_int(self, k)

    def scale(self, c) -> ExpPoly:
        c = as_scalar(c, self.domain)
        return ExpPoly([(f, p.scale(c)) for f, p in self.terms], self.domain)

    def shift(self, freq) -> ExpPoly:
        """Multiply by ``exp(freq z)``."""
        freq = as_scalar(freq, self.domain)
        return ExpPoly([(f + freq, p) for f, p in self.terms], self.domain)

    def derivative(self) -> ExpPoly:
        return ExpPoly([(f, p.derivative() + p.scale(f)) for f, p in self.terms], self.domain)

    def to_float(self) -> ExpPoly:
        if self.domain == FLOAT:
            return self
        return ExpPoly(
            [(complex(f), Poly(complex(c) for c in p.coeffs)) for f, p in self.terms], FLOAT
        )

    def prune(self, tol: float) -> ExpPoly:
        """Drop float coefficients with modulus ``<= tol`` (never implicit)."""
        out = []
        for f, p in self.terms:
            out.append((f, Poly(c if abs(complex(c)) > tol else c * 0 for c in p.coeffs)))
        return ExpPoly(out, self.domain)

    # -- evaluation -------------------------------------------------------
    def eval(self, z) -> complex:
        """Value at ``z``; overflow yields infinite components, never NaN."""
        z = complex(z)
        if not self.terms:
            return 0j
        parts = []
        for f, p in self.terms:
            pv = 0j
            for c in reversed(p.coeffs):
                pv = pv * z + complex(c)
            parts.append((complex(f) * z, pv))
        shift = max(e.real for e, _ in parts)
        vals = sorted((pv * cmath.exp(e - shift) for e, pv in parts), key=abs, reverse=True)
        s = 0j
        for v in vals:
            s += v
        if s == 0:
            return 0j
        if shift + math.log(abs(s)) > LOG_FLOAT_MAX:
            return complex(_inf_sign(s.real), _inf_sign(s.imag))
        return s * math.exp(shift)

    def __call__(self, z) -> complex:
        return self.eval(z)

    def eval_scaled(self, zs) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(s, shift)`` with ``f(z) = s * exp(shift)`` elementwise."""
        zs = np.asarray(zs, dtype=complex)
        if not self.terms:
            return np.zeros_like(zs), np.zeros(zs.shape)
        expo = np.stack([complex(f) * zs for f, _ in self.terms])
        shift = expo.real.max(axis=0)
        vals = np.stack([p.eval_array(zs) for _, p in self.terms]) * np.exp(expo - shift)
        if len(self.terms) > 1:
            order = np.argsort(-np.abs(vals), axis=0)
            vals = np.take_along_axis(vals, order, axis=0)
        return vals.sum(axis=0), shift

    def eval_array(self, zs) -> np.ndarray:
        s, shift = self.eval_scaled(zs)
        with np.errstate(over="ignore", invalid="ignore"):
            re = s.real * np.exp(shift)
            im = s.imag * np.exp(shift)
        # inf * 0 must stay 0, not NaN
        re = np.where(s.real == 0, 0.0, re)
        im = np.where(s.imag == 0, 0.0, im)
        return re + 1j * im

    def log_abs_array(self, zs) -> np.ndarray:
        """``log|f(z)|`` without overflow; ``-inf`` at exact zeros."""
        s, shift = self.eval_scaled(zs)
        with np.errstate(divide="ignore"):
            return shift + np.log(np.abs(s))

    # -- exact helpers ----------------------------------------------------
    def value_at_zero(self):
        acc = scalar_zero(self.domain)
        for _, p in self.terms:
            if p.coeffs:
                acc = acc + p.coeffs[0]
        return acc

    def leading_taylor_at_zero(self, max_order: int = 256, tol: float = 0.0):
        """``(m, c)`` with ``f(z) = c z^m + O(z^{m+1})`` near 0.

        Exact domain compares with zero exactly; float domain uses ``tol``
        relative to the coefficient scale.
        """
        if self.is_zero():
            raise ValueError("zero function has no leading Taylor coefficient")
        g = self
        fact = 1
        scale = max((abs(complex(c)) for _, p in self.terms for c in p.coeffs), default=1.0)
        for m in range(max_order + 1):
            if m:
                fact *= m
            v = g.value_at_zero()
            nonzero = (v != 0) if self.domain == EXACT else abs(v) > tol * scale * max(1.0, self.max_freq_abs()) ** m
            if nonzero:
                return m, v / fact
            g = g.derivative()
        raise ValueError("vanishing order exceeds max_order")

    def coordinates(self) -> dict:
        """Coordinates on the frequency-monomial basis ``z^k exp(lambda z)``."""
        out = {}
        for f, p in self.terms:
            key = f if self.domain == EXACT else freq_sort_key(f, FLOAT)
            for k, c in enumerate(p.coeffs):
                if c != 0:
                    out[(key, k)] = c
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            if isinstance(other, (int, GaussianRational)) and self.domain == EXACT:
                return self == ExpPoly.constant(other, EXACT)
            return NotImplemented
        return self.domain == other.domain and self.terms == other.terms

    def __hash__(self):
        return hash((self.domain, self.terms))

    def allclose(self, other: ExpPoly, tol: float = 1e-12) -> bool:
        """Float comparison with an explicit tolerance (term-wise)."""
        d = (self.to_float() - other.to_float()).prune(tol)
        return d.is_zero()

    def __repr__(self):
        from .parser import format_exppoly

        return f"ExpPoly({format_exppoly(self)!r}, {self.domain})"

    def __str__(self):
        from .parser import format_exppoly

        return format_exppoly(self)


def _inf_sign(x: float) -> float:
    return math.inf if x > 0 else (-math.inf if x < 0 else 0.0)


def _normalize(terms, domain: str) -> tuple:
    buckets: list[list] = []
    if domain == EXACT:
        acc: dict = {}
        for f, p in terms:
            f = as_scalar(f, EXACT)
            acc[f] = acc[f] + p if f in acc else p
        items = [(f, p) for f, p in acc.items() if not p.is_zero()]
        items.sort(key=lambda t: freq_sort_key(t[0], EXACT))
        return tuple(items)
    items = sorted(((complex(f), p) for f, p in terms), key=lambda t: (t[0].real, t[0].imag))
    for f, p in items:
        for b in buckets:
            if abs(b[0] - f) <= FREQ_BUCKET_TOL * max(1.0, abs(f)):
                b[1] = b[1] + p
                break
        else:
            buckets.append([f, p])
    out = [(f, p) for f, p in buckets if not p.is_zero()]
    out.sort(key=lambda t: freq_sort_key(t[0], FLOAT))
    return tuple(out)


def common_domain(fs: Sequence[ExpPoly]) -> str:
    doms = {f.domain for f in fs}
    if len(doms) > 1:
        raise DomainMismatch("mixed scalar domains in one list")
    return doms.pop() if doms else EXACT


def add(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    return a + b


def mul(a: ExpPoly, b: ExpPoly) -> ExpPoly:
    return a * b


def pow_int(a: ExpPoly, k: int) -> ExpPoly:
    if not isinstance(k, int) or k < 0:
        raise ValueError("exponent must be a nonnegative integer")
    out = ExpPoly.constant(1, a.domain)
    base = a
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


def derivative(a: ExpPoly) -> ExpPoly:
    return a.derivative()


def freq_support(a: ExpPoly) -> list:
    return a.freq_support()


def is_unit(a: ExpPoly) -> bool:
    return a.is_unit()


def eval_at(a: ExpPoly, z) -> complex:
    return a.eval(z)


def determinant(matrix: Sequence[Sequence[ExpPoly]]) -> ExpPoly:
    """Exact determinant over the ring, by Laplace expansion memoized on column subsets."""
    n = len(matrix)
    if n == 0:
        return ExpPoly.constant(1)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    domain = common_domain([e for row in matrix for e in row])
    # minors[mask] = det of rows 0..popcount(mask)-1 restricted to the columns in mask
    minors = {0: ExpPoly.constant(1, domain)}
    for size in range(1, n + 1):
        row = matrix[size - 1]
        nxt = {}
        for mask, sub in minors.items():
            if sub.is_zero():
                continue
            pos = 0
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    pos += 1
                    continue
                if row[j].is_zero():
                    continue
                # column j lands after `pos` smaller columns of the new mask
                sign = -1 if (size - 1 - pos) % 2 else 1
                term = row[j] * sub
                term = term if sign > 0 else -term
                key = mask | bit
                nxt[key] = nxt[key] + term if key in nxt else term
        minors = nxt
        if not minors:
            return ExpPoly.zero(domain)
    return minors.get((1 << n) - 1, ExpPoly.zero(domain))


def wronskian(fs: Sequence[ExpPoly]) -> ExpPoly:
    """Wronskian ``det(f_j^{(i)})`` of a nonempty list, expanded exactly."""
    if not fs:
        raise ValueError("wronskian needs at least one function")
    common_domain(fs)
    rows = [list(fs)]
    for _ in range(len(fs) - 1):
        rows.append([g.derivative() for g in rows[-1]])
    return determinant(rows)
