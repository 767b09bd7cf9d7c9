import itertools
import math

import numpy as np
import pytest
from conftest import random_exact_exppoly
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab.contour_zeros import locate_zeros_disk
from nevlab.errors import DegenerateCurve, PreconditionError
from nevlab.linalg import rank
from nevlab.nevanlinna import (
    INF,
    FixedHyperplane,
    HoloCurve,
    characteristic_T,
    common_zeros,
    counting_hyperplane,
    curve_characteristic,
    greedy_max_weight,
    independence_table,
    profile,
    proximity_hyperplane,
    proximity_m,
    verify_fmt,
    verify_fmt_hyperplane,
    verify_jensen,
    verify_truncated_borel,
    verify_truncation_lemma,
    verify_vojta_smt,
    weil_fixed,
)
from nevlab.parser import parse

PI = math.pi


def curve(*texts, reduced=True):
    return HoloCurve(tuple(parse(t) for t in texts), reduced)


@pytest.mark.parametrize("r", [1, 5, 20])
def test_proximity_of_exp(r):
    assert proximity_m(parse("exp(z)"), INF, r) == pytest.approx(r / PI, rel=1e-6)
    assert proximity_m(parse("exp(z)"), 0, r) == pytest.approx(r / PI, rel=1e-6)


def test_proximity_of_small_constant():
    assert proximity_m(parse("1/2"), INF, 3.0) == 0.0
    assert proximity_m(parse("-1"), INF, 3.0) == 0.0


def test_proximity_rejects_identical_target():
    with pytest.raises(ValueError):
        proximity_m(parse("2"), 2, 1.0)


@pytest.mark.parametrize("c,scale", [("1", 1), ("2", 2), ("(1+i)", math.sqrt(2)), ("(-3i)", 3)])
def test_characteristic_closed_form(c, scale):
    for r in (1, 5, 20):
        assert characteristic_T(parse(f"exp({c}*z)"), r) == pytest.approx(scale * r / PI, rel=1e-6)


def test_characteristic_constant_and_cosh():
    assert characteristic_T(parse("7/3"), 10) == pytest.approx(math.log(7 / 3), abs=1e-9)
    assert characteristic_T(parse("1/3"), 10) == pytest.approx(0.0, abs=1e-9)
    t = characteristic_T(parse("exp(z) + exp(-z)"), 20)
    assert 20 / PI - 1 <= t <= 40 / PI + 1


@pytest.mark.parametrize("text,r", [("z", math.e), ("z-1", 2.0), ("exp(z)", 5.0)])
def test_jensen_examples(text, r):
    assert verify_jensen(parse(text), r) < 1e-8


def test_jensen_random(rng):
    for _ in range(15):
        f = random_exact_exppoly(rng)
        radii = [rng.uniform(0.5, 3.5) for _ in range(3)]
        zs = locate_zeros_disk(f, max(radii))
        for r in radii:
            assert verify_jensen(f, r, zeros=zs.restrict(r)) < 1e-6


def test_fmt_examples():
    grid = [1 + 39 * k / 19 for k in range(20)]
    rep = verify_fmt(parse("exp(z)"), 0, grid)
    assert rep.extra["max_abs_defect"] < 1e-6
    rep = verify_fmt(parse("exp(z)"), 1, grid)
    assert rep.extra["oscillation"] <= 1.0 and bool(rep)
    rep = verify_fmt(parse("z"), 0, [1, 2, 5, 9])
    assert rep.extra["max_abs_defect"] < 1e-12


@pytest.mark.parametrize("a", ["0", "1", "-2", "2i", "1+i", "-3/2*i"])
def test_fmt_family_oscillation(a):
    f = parse(f"exp(z) - ({a})")
    rep = verify_fmt(f, 0, [1 + 39 * k / 19 for k in range(20)])
    assert rep.extra["oscillation"] <= 2.0


def test_fmt_rejects_constant():
    with pytest.raises(PreconditionError):
        verify_fmt(parse("3"), 0, [1.0])


def test_characteristic_nondecreasing():
    for text in ["exp(z) - 1", "z^2*exp(-i*z) + 3", "exp(2*z) + z*exp(-z) - 1"]:
        f = parse(text)
        vals = [characteristic_T(f, r) for r in np.linspace(0.5, 12, 15)]
        assert all(b >= a - 1e-8 for a, b in zip(vals, vals[1:]))


def test_profile_rows_and_csv():
    p = profile(parse("exp(z)"), INF, [1, 2, 3])
    assert p.T_vals == p.m_vals and all(n == 0 for n in p.N_vals)
    assert p.to_csv().count("\n") == 4
    q = profile(parse("exp(z)"), 1, [2, 8])
    assert all(n >= 0 for n in q.N_vals) and all(m >= 0 for m in q.m_vals)
    assert q.N_vals[1] > 0 and q.quadrature_nodes > 0


def test_curve_characteristic_examples():
    for r in (3, 10):
        assert curve_characteristic(curve("1", "exp(z)"), r) == pytest.approx(r / PI, rel=1e-6)
    assert curve_characteristic(curve("1", "5"), 4) == pytest.approx(math.log(5), abs=1e-9)
    assert curve_characteristic(curve("1", "1/2"), 4) == pytest.approx(0.0, abs=1e-9)
    c = curve("1", "exp(z)", "exp(2*z)")
    for r in (5, 10, 20):
        t = curve_characteristic(c, r)
        assert 2 * r / PI - 1 <= t <= r / PI + 2 * r / PI + 1


def test_curve_of_one_and_f_is_characteristic(rng):
    for _ in range(5):
        f = random_exact_exppoly(rng)
        c = HoloCurve((parse("1"), f))
        for r in (1.5, 4.0):
            assert curve_characteristic(c, r) == pytest.approx(characteristic_T(f, r), abs=1e-6)


def test_non_reduced_curve_correction():
    # [z : z^2] reduces to [1 : z]
    bad = curve("z", "z^2", reduced=False)
    good = curve("1", "z")
    assert common_zeros(bad.components, 3) == [(0j, 1)]
    for r in (0.5, 2, 6):
        assert curve_characteristic(bad, r) == pytest.approx(curve_characteristic(good, r), abs=1e-9)
    assert HoloCurve.build(bad.components, 3).reduced is False
    assert HoloCurve.build(good.components, 3).reduced is True


def test_weil_examples():
    H = FixedHyperplane((1, 0))
    assert weil_fixed(H, (1, 1)) == 0.0
    assert weil_fixed(H, (1, 2)) == pytest.approx(math.log(2))
    with pytest.raises(PreconditionError):
        weil_fixed(H, (0, 1))


points = st.tuples(*[st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)] * 3)


@given(points, st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
@settings(max_examples=80, deadline=None)
def test_weil_scaling(P, s):
    H = FixedHyperplane((1, 2j, -1))
    try:
        base = weil_fixed(H, P)
    except PreconditionError:
        return
    if not math.isfinite(base) or abs(sum(a * x for a, x in zip(H.coeffs, P))) < 1e-9:
        return
    assert weil_fixed(H, tuple(s * x for x in P)) == pytest.approx(base, abs=1e-9)
    sH = FixedHyperplane(tuple(s * a for a in H.coeffs))
    assert weil_fixed(sH, P) == pytest.approx(base - math.log(abs(s)), abs=1e-9)


def test_hyperplane_fmt_for_one_plus_exp():
    c = curve("1", "exp(z)")
    H = FixedHyperplane((1, 1))
    rep = verify_fmt_hyperplane(c, H, [1 + 29 * k / 19 for k in range(20)])
    assert rep.extra["oscillation"] <= 1.0
    assert counting_hyperplane(c, H, 10) > 0
    assert proximity_hyperplane(c, H, 10) >= -math.log(2)


def test_curve_inside_hyperplane_rejected():
    c = curve("exp(z)", "2*exp(z)")
    with pytest.raises(PreconditionError):
        counting_hyperplane(c, FixedHyperplane((2, -1)), 3)


@given(
    st.lists(st.floats(-5, 5), min_size=12, max_size=12),
    st.sampled_from([((1, 0), (0, 1), (1, 1), (1, -1)), ((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1))]),
)
@settings(max_examples=60, deadline=None)
def test_greedy_matches_brute_force(values, rows):
    q = len(rows)
    vals = np.array(values[: q * 3]).reshape(q, 3)
    table = independence_table([list(x) for x in rows])
    got, _ = greedy_max_weight(vals, table)
    for col in range(3):
        best = 0.0
        for size in range(1, len(rows[0]) + 1):
            for sub in itertools.combinations(range(q), size):
                if rank([list(rows[k]) for k in sub]) == size:
                    best = max(best, sum(vals[k, col] for k in sub))
        assert got[col] == pytest.approx(best)


LINES = [FixedHyperplane((1, 0)), FixedHyperplane((0, 1)), FixedHyperplane((1, 1))]


def test_vojta_three_lines():
    rep = verify_vojta_smt(curve("1", "exp(z)"), LINES, 0.5, [5, 10, 20, 40])
    assert rep.extra["violation_fraction"] == 0.0 and bool(rep)


def test_vojta_single_hyperplane():
    rep = verify_vojta_smt(curve("1", "exp(z)"), LINES[:1], 0.5, [10])
    assert rep.per_radius[0]["margin"] >= 0


def test_vojta_rational_curve():
    Hs = [FixedHyperplane((1, 0)), FixedHyperplane((0, 1)), FixedHyperplane((1, -1))]
    rep = verify_vojta_smt(curve("1", "z"), Hs, 0.5, [2, 8])
    assert all(x["margin"] >= 0 for x in rep.per_radius)


def test_vojta_degenerate_rejected():
    with pytest.raises(DegenerateCurve):
        verify_vojta_smt(curve("exp(z)", "3*exp(z)"), LINES, 0.5, [5])


def test_truncation_lemma_examples():
    assert verify_truncation_lemma(curve("1", "exp(z)"), LINES[:2], 10)
    rep = verify_truncation_lemma(curve("1", "z^2"), [FixedHyperplane((0, 1))], 2)
    x = rep.per_radius[0]
    assert x["N"] == pytest.approx(2 * math.log(2))
    assert x["N_trunc"] == pytest.approx(math.log(2))
    assert x["N_W"] == pytest.approx(math.log(2))
    assert bool(rep)
    # zero-free forms
    assert verify_truncation_lemma(curve("1", "exp(z)"), [FixedHyperplane((1, 0))], [3, 7])


def test_truncation_lemma_needs_general_position():
    with pytest.raises(PreconditionError):
        verify_truncation_lemma(curve("1", "exp(z)"), [FixedHyperplane((1, 1)), FixedHyperplane((2, 2))], 5)


def test_truncated_borel():
    rep = verify_truncated_borel([parse("exp(z)"), parse("-exp(z)")], [5])
    assert rep.status == "NOT_APPLICABLE" and rep.passed is None
    rep = verify_truncated_borel([parse("1"), parse("exp(z)-1"), parse("-exp(z)")], [5, 15])
    assert bool(rep)
    # the only vanishing subsum is the full set
    rep = verify_truncated_borel([parse("exp(z)"), parse("exp(2*z)+exp(z)"), parse("-exp(2*z)-2*exp(z)")], [4])
    assert bool(rep)


def test_truncated_borel_preconditions():
    with pytest.raises(PreconditionError) as exc:
        verify_truncated_borel([parse("1"), parse("-1"), parse("exp(z)"), parse("-exp(z)")], [3])
    assert exc.value.witness == (0, 1)
    with pytest.raises(PreconditionError):
        verify_truncated_borel([parse("1"), parse("exp(z)")], [3])
    with pytest.raises(PreconditionError):
        verify_truncated_borel([parse("1", "float"), parse("-1", "float")], [3])


def test_reports_serialize():
    import json

    rep = verify_vojta_smt(curve("1", "exp(z)"), LINES, 0.5, [5])
    d = rep.to_json()
    assert {"name", "params", "per_radius", "pass"} <= set(d)
    assert {"r", "lhs", "rhs", "margin"} <= set(d["per_radius"][0])
    json.dumps(d)
