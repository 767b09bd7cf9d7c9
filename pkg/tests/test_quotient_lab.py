import itertools
import math
import random
from fractions import Fraction

import pytest
from conftest import random_exact_exppoly
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab.errors import EpsWindowEmpty, PreconditionError, ResourceLimit
from nevlab.parser import parse
from nevlab.quotient_lab import (
    CANDIDATE,
    CONSISTENT,
    ENTIRE_UP_TO,
    NOT_ENTIRE,
    PowerSum,
    borel_pair,
    construct_auxiliary_map,
    corollary_check,
    divide_exact,
    divides_report,
    green_pair,
    rational_dependence,
    theorem_bounds,
)
from nevlab.scalars import GaussianRational as GR


def P(*texts):
    return [parse(t) for t in texts]


# -- divisibility --------------------------------------------------------------

def test_divides_closed_form_zero_sets():
    cert = divides_report(parse("exp(2*z)-1"), parse("exp(z)-1"), 10)
    assert cert.verdict == ENTIRE_UP_TO
    # zeros 2*pi*i*k with |k| <= 1
    locs = sorted(round(w["im"] / (2 * math.pi), 9) for w in cert.witnesses)
    assert locs == [-1.0, 0.0, 1.0]
    assert all(w["mult_F"] >= w["mult_G"] == 1 for w in cert.witnesses)


def test_not_entire_witness_at_i_pi():
    F = parse("exp(sqrt(2)*z)-1", "float")
    cert = divides_report(F, parse("exp(z)+1", "float"), 4)
    assert cert.verdict == NOT_ENTIRE
    (w,) = cert.witnesses
    assert abs(complex(w["re"], w["im"]) - 1j * math.pi) < 1e-8
    assert w["mult_F"] == 0 < w["mult_G"]
    # |e^{i sqrt2 pi} - 1| = 2 sin(sqrt2 pi / 2)
    assert w["F_abs"] == pytest.approx(2 * math.sin(math.sqrt(2) * math.pi / 2), rel=1e-9)
    assert w["F_abs"] == pytest.approx(1.59139, abs=1e-5)


def test_self_division_matches_multiplicities():
    G = parse("(z-1)^2*(exp(z)-1)")
    cert = divides_report(G, G, 3)
    assert cert.verdict == ENTIRE_UP_TO
    assert [w["mult_G"] for w in cert.witnesses] == [w["mult_F"] for w in cert.witnesses]
    assert sorted(w["mult_G"] for w in cert.witnesses) == [1, 2]


def test_order_deficit_is_not_entire():
    cert = divides_report(parse("z"), parse("z^2"), 1)
    assert cert.verdict == NOT_ENTIRE
    assert (cert.witnesses[0]["mult_F"], cert.witnesses[0]["mult_G"]) == (1, 2)


def test_divides_rejects_zero_inputs():
    with pytest.raises(PreconditionError):
        divides_report(parse("1"), parse("0"), 1)
    with pytest.raises(PreconditionError):
        divides_report(parse("0"), parse("z"), 1)


def test_product_divisibility_random(rng):
    for _ in range(50):
        F = random_exact_exppoly(rng, max_terms=2, max_degree=1, max_freq=2)
        G = random_exact_exppoly(rng, max_terms=2, max_degree=1, max_freq=2)
        cert = divides_report(F * G, G, 2.0)
        assert cert.verdict == ENTIRE_UP_TO
        assert all(w["mult_F"] >= w["mult_G"] for w in cert.witnesses)


def test_certificate_json_schema():
    d = divides_report(parse("exp(2*z)-1"), parse("exp(z)-1"), 10).to_json()
    assert d["schema"] == 1 and d["verdict"] == ENTIRE_UP_TO and d["radius"] >= 10


# -- relations -----------------------------------------------------------------

def test_exact_relation_examples():
    assert rational_dependence([GR(2), GR(1)]).relation == (1, -2)
    assert rational_dependence([GR(1, 1), GR(2, 2)]).relation == (2, -1)
    assert rational_dependence([GR(1), GR(0, 1)]).relation is None


def test_heuristic_sqrt2_inconclusive():
    rel = rational_dependence([1.0, math.sqrt(2)], "heuristic", cap=10 ** 6, tol=1e-10)
    assert rel.relation is None and rel.mode == "Heuristic"


def test_heuristic_finds_small_relation():
    vals = [complex(1, 1), complex(0.5, -0.25), complex(3.5, 1.75)]
    rel = rational_dependence(vals, "heuristic")
    assert rel.relation is not None
    s = sum(c * v for c, v in zip(rel.relation, vals))
    assert abs(s) <= rel.residual + 1e-15 <= 1e-10
    assert max(map(abs, rel.relation)) <= 10 ** 6


def test_exact_mode_rejects_floats():
    with pytest.raises(PreconditionError):
        rational_dependence([1.0, 2.0], "exact")


_gr = st.builds(lambda a, b, c: GR(Fraction(a, c), b), st.integers(-9, 9), st.integers(-9, 9), st.integers(1, 5))


@given(st.lists(_gr, min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_exact_relation_annihilates(vals):
    rel = rational_dependence(vals)
    if rel.relation is None:
        # only a single nonzero value or two Q-independent ones can have an empty kernel
        assert len(vals) <= 2
        return
    assert any(rel.relation)
    acc = GR(0)
    for c, v in zip(rel.relation, vals):
        acc = acc + v * c
    assert acc == 0


_nonzero_q = st.builds(Fraction, st.integers(1, 50).map(lambda k: k * (-1) ** k), st.integers(1, 7))


@given(_nonzero_q, _nonzero_q)
@settings(max_examples=40, deadline=None)
def test_exact_independent_basis_returns_none(p, q):
    # p and q*i are a Q-basis of Q(i)
    assert rational_dependence([GR(p), GR(0, q)]).relation is None


# -- corollary --------------------------------------------------------------------

def test_corollary_examples():
    rep = corollary_check(parse("exp(2*z)-1"), parse("exp(z)-1"), 10)
    assert rep.verdict == CONSISTENT and rep.relation.relation == (1, -2)
    rep = corollary_check(parse("exp(sqrt(2)*z)-1", "float"), parse("exp(z)+1", "float"), 4)
    assert rep.verdict == CONSISTENT and rep.certificate.verdict == NOT_ENTIRE
    rep = corollary_check(parse("exp(z)+1"), parse("exp(z)+1"), 5)
    assert rep.verdict == CONSISTENT and rep.relation.relation == (1, -1)


def test_corollary_candidate_when_no_pole_seen():
    # G has no zero in the small disk while the frequencies 1 and i are independent
    rep = corollary_check(parse("exp(z)-1"), parse("exp(i*z)+2"), 0.5)
    assert rep.verdict == CANDIDATE and "independent" in rep.caveat


def test_corollary_shape_validation():
    with pytest.raises(PreconditionError):
        corollary_check(parse("exp(z)"), parse("exp(z)-1"), 1)
    with pytest.raises(PreconditionError):
        corollary_check(parse("exp(z)-1"), parse("z+1"), 1)


# -- exact division --------------------------------------------------------------------

def test_divide_exact():
    assert divide_exact(parse("exp(2*z)-1"), parse("exp(z)-1")) == parse("exp(z)+1")
    assert divide_exact(parse("exp(2*z)+1"), parse("exp(z)+1")) is None
    assert divide_exact(parse("z^2*exp(z) - exp(z)"), parse("z-1")) == parse("(z+1)*exp(z)")
    assert divide_exact(parse("z"), parse("z^2")) is None


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_divide_exact_product_roundtrip(seed):
    r = random.Random(seed)
    F = random_exact_exppoly(r, max_terms=3, max_degree=2)
    G = random_exact_exppoly(r, max_terms=3, max_degree=2)
    assert divide_exact(F * G, G) == F


# -- Borel / Green ---------------------------------------------------------------------

def test_borel_examples():
    assert borel_pair(P("exp(z)", "exp(z)"), P("1", "-1")) == [(0, 1)]
    assert borel_pair(P("exp(z)", "exp(z)", "exp(2*z)", "exp(2*z)"), P("1", "-1", "1", "-1")) == [(0, 1), (2, 3)]
    with pytest.raises(PreconditionError):
        borel_pair(P("exp(z)", "exp(2*z)"), P("1", "-1"))


def test_borel_rejects_non_units_and_fast_coefficients():
    with pytest.raises(PreconditionError):
        borel_pair(P("exp(z)+1", "exp(z)+1"), P("1", "-1"))
    with pytest.raises(PreconditionError):
        borel_pair(P("exp(z)", "exp(z)"), P("0", "1"))
    # exp(5z) is not slow against frequency scale 1
    with pytest.raises(PreconditionError):
        borel_pair(P("exp(-4*z)", "exp(z)"), P("exp(5*z)", "-1"))


def test_borel_polynomial_coefficients_equal_frequencies():
    units = P("exp(z)", "2*exp(z)", "exp(-i*z)", "exp(-i*z)")
    gammas = P("z", "-z/2", "z^2+1", "-z^2-1")
    pairs = borel_pair(units, gammas)
    assert pairs == [(0, 1), (2, 3)]
    for i, j in pairs:
        assert units[i].freq_support() == units[j].freq_support()


def test_green_examples():
    assert green_pair(P("exp(z)", "exp(z)"), P("1", "-1"), 1) == [(0, 1)]
    assert green_pair(P("exp(z)+1", "exp(z)+1"), P("1", "-1"), 1) == [(0, 1)]
    with pytest.raises(PreconditionError):
        green_pair(P("exp(z)", "exp(z)", "1"), P("1", "1", "3"), 4)
    with pytest.raises(PreconditionError):
        green_pair(P("exp(z)", "exp(z)", "1"), P("1", "-1", "1"), 3)


# -- bounds ------------------------------------------------------------------------------

def _enumerate(nvars, bound):
    return sum(1 for e in itertools.product(range(bound + 1), repeat=nvars) if sum(e) <= bound)


def test_bounds_example():
    rep = theorem_bounds(1, 2, 2, 3, 1)
    assert (rep.M, rep.N1, rep.N2, rep.N, rep.n1) == (4, 6, 21, 48, 19044)
    assert rep.eps_max == pytest.approx(2 / 918)
    assert rep.valid and 0 < rep.eps < rep.eps_max and rep.n0 > 0


def test_bounds_degenerate_simplex_and_empty_window():
    for t in range(1, 6):
        rep = theorem_bounds(1, 1, 2, t, 1)
        assert (rep.M, rep.N1) == (1, 1)
    with pytest.raises(EpsWindowEmpty):
        theorem_bounds(2, 1, 2, 1, 1)


@pytest.mark.parametrize("l,m,s,t", list(itertools.product(range(1, 5), repeat=4)))
def test_bounds_match_enumeration(l, m, s, t):
    a = 1
    if s <= a * l:
        with pytest.raises(EpsWindowEmpty):
            theorem_bounds(l, m, s, t, a)
        return
    rep = theorem_bounds(l, m, s, t, a)
    M, N1, N2 = _enumerate(m - 1, t), _enumerate(m - 1, t + s), _enumerate(m, s + t)
    N = N1 + (l + 1) * N2
    assert (rep.M, rep.N1, rep.N2, rep.N) == (M, N1, N2, N)
    assert rep.n1 == (l + 1) ** 2 * (N1 + N2 * (m + 1)) ** 2
    assert rep.Q == N - 1
    assert rep.valid == (M * s - a * N1 * l > 0)


def test_bounds_eps_outside_window():
    with pytest.raises(PreconditionError):
        theorem_bounds(1, 2, 2, 3, 1, eps=1.0)


# -- auxiliary map -----------------------------------------------------------------------

def _spec(coeffs, bases):
    return PowerSum(tuple(P(*coeffs)), tuple(P(*bases)))


def test_aux_map_smallest_instance():
    F = _spec(["1", "1"], ["exp(2*z)"])
    G = _spec(["1", "1"], ["exp(z)"])
    am = construct_auxiliary_map(F, G, 1, 1, 1)
    rep = theorem_bounds(1, 1, 2, 1, 1)
    assert (am.M, am.N1, am.N2) == (1, 1, 3)
    assert am.N == 1 + 2 * 3 and (am.M, am.N1) == (rep.M, rep.N1)
    assert am.identity_holds and am.general_position
    assert len(am.hyperplanes) == am.N + am.M
    assert am.x is None


def test_aux_map_with_quotient_components():
    F = _spec(["-1", "1"], ["exp(2*z)"])
    G = _spec(["-1", "1"], ["exp(z)"])
    am = construct_auxiliary_map(F, G, 1, 2, 1)
    assert am.x is not None and am.x[0] == parse("exp(z)+1")
    assert am.identity_holds and am.general_position


def test_aux_map_diagonal_and_sizes():
    b0 = parse("z+1")
    F = _spec(["1", "2", "z"], ["exp(3*z)", "exp(-z)"])
    G = PowerSum((b0, *P("1", "-1", "3")), tuple(P("exp(z)", "exp(2*z)", "exp(i*z)")))
    for s, t in [(1, 1), (2, 1), (1, 2)]:
        am = construct_auxiliary_map(F, G, 2, s, t)
        assert am.M == math.comb(2 + t, 2) and am.N1 == math.comb(2 + t + s, 2)
        assert am.N2 == math.comb(3 + s + t, 3) and am.N == am.N1 + 3 * am.N2
        assert all(am.A[i][i] == b0 ** s for i in range(am.M))
        assert am.identity_holds and am.general_position


def test_aux_map_caps_and_preconditions():
    F = _spec(["1", "1"], ["exp(2*z)"])
    with pytest.raises(PreconditionError):
        construct_auxiliary_map(F, _spec(["0", "1"], ["exp(z)"]), 1, 1, 1)
    big = _spec(["1", "1", "1", "1"], ["exp(z)", "exp(2*z)", "exp(3*z)"])
    with pytest.raises(ResourceLimit):
        construct_auxiliary_map(F, big, 1, 5, 5)
