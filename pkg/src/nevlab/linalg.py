"""Exact linear algebra over Gaussian rationals, plus lattice reduction.

Matrices are lists of rows.  Entries may be ``GaussianRational``,
``Fraction`` or ``int``; the float domain uses numpy instead.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from .exp_poly import ExpPoly
from .scalars import EXACT


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if not isinstance(m[r][c], int) else Fraction(1, m[r][c])
        m[r] = [x * inv for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c] != 0:
                fac = m[k][c]
                m[k] = [a - fac * b for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of ``{x : A x = 0}``, one vector per free column (ascending)."""
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols or 0)] for j in range(ncols or 0)]
    ncols = len(rows[0])
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pc in enumerate(piv):
            v[pc] = -red[r][fcol]
        basis.append(v)
    return basis


def coordinate_matrix(fs: Sequence[ExpPoly]) -> tuple[list[list], list]:
    """Rows = functions, columns = frequency-monomials ``z^k e^{lambda z}``."""
    coords = [f.coordinates() for f in fs]
    keys = sorted({k for c in coords for k in c}, key=_key_order)
    zero = 0
    rows = [[c.get(k, zero) for k in keys] for c in coords]
    return rows, keys


def _key_order(k):
    freq, power = k
    if hasattr(freq, "sort_key"):
        return (freq.sort_key(), power)
    return (freq, power)


def exppoly_rank(fs: Sequence[ExpPoly], tol: float = 1e-10) -> int:
    """Rank over C of a family of exponential polynomials."""
    if not fs:
        return 0
    rows, keys = coordinate_matrix(fs)
    if not keys:
        return 0
    if fs[0].domain == EXACT:
        return rank(rows)
    a = np.array([[complex(x) for x in r] for r in rows])
    return float_rank(a, tol)


def linearly_independent(fs: Sequence[ExpPoly], tol: float = 1e-10) -> bool:
    return exppoly_rank(fs, tol) == len(fs)


class IncrementalBasis:
    """Greedy selection of linearly independent exact vectors (sparse dict form)."""

    def __init__(self):
        self._rows: list[tuple[object, dict]] = []  # (pivot key, normalized row)

    def __len__(self):
        return len(self._rows)

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        for pk, row in self._rows:
            c = v.get(pk)
            if c is None or c == 0:
                continue
            for k, x in row.items():
                nv = v.get(k, 0) - c * x
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv
        return {k: x for k, x in v.items() if x != 0}

    def add(self, vec: dict) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        pk = min(v, key=_key_order)
        inv = 1 / v[pk]
        row = {k: x * inv for k, x in v.items()}
        # keep existing rows reduced against the new pivot
        new_rows = []
        for opk, orow in self._rows:
            c = orow.get(pk)
            if c is not None and c != 0:
                orow = dict(orow)
                for k, x in row.items():
                    nv = orow.get(k, 0) - c * x
                    if nv == 0:
                        orow.pop(k, None)
                    else:
                        orow[k] = nv
            new_rows.append((opk, orow))
        new_rows.append((pk, row))
        self._rows = new_rows
        return True


def solve_in_span(basis: Sequence[ExpPoly], target: ExpPoly) -> list | None:
    """Exact coefficients ``c`` with ``sum c_i basis_i == target``, or None."""
    rows, keys = coordinate_matrix(list(basis) + [target])
    nb = len(basis)
    if not keys:
        return [0] * nb
    # columns = basis elements, augmented with target
    aug = [[rows[i][k] for i in range(nb)] + [rows[nb][k]] for k in range(len(keys))]
    red, piv = rref(aug)
    if nb in piv:
        return None
    sol = [0] * nb
    for r, pc in enumerate(piv):
        sol[pc] = red[r][nb]
    return sol


def float_rank(a: np.ndarray, tol: float = 1e-10) -> int:
    """Rank with a relative pivot tolerance on singular values."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def primitive_integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    from math import gcd, lcm

    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    return ints if first > 0 else [-x for x in ints]


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL reduction of integer row vectors with exact rational Gram-Schmidt."""
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    if n == 0:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gram_schmidt():
        bstar: list[list[Fraction]] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        bnorm = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bstar[j]) / bnorm[j] if bnorm[j] else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
            bnorm.append(dot(v, v))
        return bstar, mu, bnorm

    bstar, mu, bnorm = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu, bnorm = gram_schmidt()
        if bnorm[k] >= (delta - mu[k][k - 1] ** 2) * bnorm[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu, bnorm = gram_schmidt()
            k = max(k - 1, 1)
    return b
