from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from nevlab.exp_poly import ExpPoly, Poly
from nevlab.scalars import EXACT, GaussianRational


def small_gr(draw, lo=-3, hi=3):
    return GaussianRational(
        Fraction(draw(st.integers(lo, hi)), draw(st.integers(1, 3))),
        draw(st.integers(lo, hi)),
    )


@st.composite
def exact_exppolys(draw, max_terms=3, max_degree=2):
    n = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(n):
        freq = GaussianRational(draw(st.integers(-2, 2)), draw(st.integers(-2, 2)))
        deg = draw(st.integers(0, max_degree))
        coeffs = [small_gr(draw) for _ in range(deg + 1)]
        terms.append((freq, Poly(coeffs)))
    return ExpPoly(terms, EXACT)


def random_exact_exppoly(rng: random.Random, max_terms=3, max_degree=2, max_freq=3) -> ExpPoly:
    """Nonconstant random exact exponential polynomial with |freq| <= max_freq."""
    while True:
        terms = []
        for _ in range(rng.randint(1, max_terms)):
            while True:
                fr = GaussianRational(Fraction(rng.randint(-6, 6), 2), Fraction(rng.randint(-6, 6), 2))
                if abs(fr) <= max_freq:
                    break
            deg = rng.randint(0, max_degree)
            coeffs = [GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(deg)]
            coeffs.append(GaussianRational(rng.choice([-2, -1, 1, 2]), rng.randint(-2, 2)))
            terms.append((fr, Poly(coeffs)))
        f = ExpPoly(terms, EXACT)
        if not f.is_constant():
            return f


@pytest.fixture
def rng():
    return random.Random(20261015)


_GAMMA_POOL = ["1", "-1", "2", "i", "z", "z - 1", "exp(z)", "exp(z) + 1", "exp(i*z)", "1/2*exp(-z)", "0"]


def random_moving_instance(rng: random.Random):
    """Small random moving-target data: (n, list of coefficient rows, t)."""
    from nevlab.parser import parse

    n = rng.randint(1, 2)
    q = rng.randint(1, n + 2)
    pool = rng.sample(_GAMMA_POOL, 4)
    rows = []
    while len(rows) < q:
        row = [parse(rng.choice(pool)) for _ in range(n + 1)]
        if not all(g.is_zero() for g in row):
            rows.append(row)
    return n, rows, rng.randint(0, 1)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
