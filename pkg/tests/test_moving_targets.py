import math
import random
from math import comb

import pytest
from conftest import random_moving_instance

from nevlab.errors import DegenerateCurve, PreconditionError, ResourceLimit
from nevlab.moving_targets import (
    MovingHyperplane,
    build_Vt,
    claim_holds,
    express_hat_hyperplanes,
    form_relation_holds,
    general_position_moving,
    generators_of,
    is_slow_growth,
    lift_curve,
    verify_moving_smt,
    verify_moving_truncation,
    weil_moving,
)
from nevlab.nevanlinna import FixedHyperplane, HoloCurve, verify_vojta_smt
from nevlab.parser import parse


def mh(*texts):
    return MovingHyperplane(tuple(parse(t) for t in texts))


def curve(*texts):
    return HoloCurve(tuple(parse(t) for t in texts))


def test_vt_examples():
    vb = build_Vt([parse("1")], 3)
    assert (vb.u, vb.w) == (1, 1) and vb.basis == (parse("1"),)
    vb = build_Vt([parse("z")], 1)
    assert vb.basis == (parse("1"), parse("z"))
    assert vb.extended_basis[2] == parse("z^2") and vb.w == 3
    vb = build_Vt([parse("exp(z)+1")], 1)
    assert (vb.u, vb.w) == (2, 3)
    assert vb.basis[1] == parse("exp(z)+1")


def test_vt_first_element_is_one():
    vb = build_Vt([parse("exp(z)"), parse("z")], 2)
    assert vb.basis[0] == parse("1")
    assert vb.extended_basis[: vb.u] == vb.basis


def test_vt_dimension_growth():
    gens = [parse("z"), parse("exp(z)"), parse("exp(i*z)")]
    ratios = []
    for t in range(7):
        vb = build_Vt(gens, t)
        assert vb.u == comb(t + 3, 3)
        assert vb.w == comb(t + 4, 3)
        ratios.append(vb.w / vb.u)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1.5


def test_vt_resource_cap():
    gens = [parse(f"exp({k}*z)") for k in range(1, 9)]
    with pytest.raises(ResourceLimit):
        build_Vt(gens, 12)


def test_vt_rejects_float():
    with pytest.raises(PreconditionError):
        build_Vt([parse("z", "float")], 1)


def test_lift_examples():
    c = curve("1", "exp(z)")
    assert lift_curve(c, build_Vt([parse("1")], 0)).components == c.components
    lifted = lift_curve(c, build_Vt([parse("z")], 0), check_radii=(10.0,))
    assert lifted.components == tuple(parse(t) for t in ["1", "z", "exp(z)", "z*exp(z)"])
    r, tf, tF, _ = lifted.sandwich[0]
    assert -0.5 <= tF - tf <= 2 * math.log(10) + 1


def test_hat_examples():
    hats = express_hat_hyperplanes(build_Vt([parse("1"), parse("-1")], 0), [mh("1", "-1")])
    assert len(hats) == 1 and hats[0].c == (1, -1)
    vb = build_Vt([parse("z"), parse("1")], 0)
    hats = express_hat_hyperplanes(vb, [mh("z", "1")])
    assert hats[0].c == (0, 1, 1, 0)


def test_hat_outside_span():
    vb = build_Vt([parse("z")], 0)
    with pytest.raises(PreconditionError) as exc:
        express_hat_hyperplanes(vb, [mh("exp(z)", "1")])
    assert exc.value.witness == (0, 0, 0)


def test_form_relation_random():
    rng = random.Random(5)
    for _ in range(25):
        n, rows, t = random_moving_instance(rng)
        Hs = [MovingHyperplane(tuple(r)) for r in rows]
        vb = build_Vt(generators_of(Hs), t)
        hats = express_hat_hyperplanes(vb, Hs)
        assert len(hats) == vb.u * len(Hs)
        assert all(form_relation_holds(vb, Hs[h.j], h) for h in hats)
        assert claim_holds(vb, Hs, hats)


def test_general_position_examples():
    assert general_position_moving([mh("1", "0"), mh("0", "1")], 1)
    assert not general_position_moving([mh("1", "1"), mh("exp(z)", "exp(z)")], 1)
    assert general_position_moving([mh("1", "exp(z)"), mh("1", "1")], 1)


def test_slow_growth():
    ref = curve("1", "exp(z)")
    assert is_slow_growth(parse("z^3"), ref)
    assert is_slow_growth(parse("5"), ref)
    assert not is_slow_growth(parse("exp(z)"), ref)
    assert is_slow_growth(parse("exp(z)+1"), 100.0)
    assert not is_slow_growth(parse("exp(z)+1"), 100.0, strict=True)
    with pytest.raises(PreconditionError):
        MovingHyperplane.checked((parse("exp(2*z)"), parse("1")), ref)


def test_weil_moving_normalized():
    H = mh("2", "2*z")
    assert weil_moving(H, 1.0, (1, 0)) == pytest.approx(0.0)
    assert weil_moving(H, 2.0, (1, 1)) == pytest.approx(-math.log(6 / 4))


def test_moving_smt_reduces_to_fixed():
    c = curve("1", "exp(z)")
    radii = [3.0, 11.0, 25.0]
    a = verify_moving_smt(c, [mh("1", "0"), mh("0", "1"), mh("1", "1")], 0, 0.5, radii)
    b = verify_vojta_smt(c, [FixedHyperplane((1, 0)), FixedHyperplane((0, 1)), FixedHyperplane((1, 1))], 0.5, radii)
    for x, y in zip(a.per_radius, b.per_radius):
        assert x["margin"] == pytest.approx(y["margin"], abs=1e-6)
    assert a.params["u"] == a.params["w"] == 1


def test_moving_smt_one_moving_target():
    rep = verify_moving_smt(curve("1", "exp(z)"), [mh("z", "1")], 1, 1.0, [10, 20])
    assert all(x["margin"] >= 0 for x in rep.per_radius)
    assert rep.extra["skipped_fraction"] == 0.0


def test_moving_smt_degenerate():
    with pytest.raises(DegenerateCurve):
        verify_moving_smt(curve("1", "z"), [mh("z", "1")], 0, 1.0, [5])


def test_moving_truncation_examples():
    c = curve("1", "exp(z)")
    assert verify_moving_truncation(c, [mh("1", "0"), mh("0", "1")], 0, 10)
    rep = verify_moving_truncation(curve("1", "z^2"), [mh("0", "1")], 0, 2)
    assert rep.params["Q"] == 1 and bool(rep)
    assert rep.per_radius[0]["N"] == pytest.approx(2 * math.log(2))
    # zero-free pullback
    rep = verify_moving_truncation(c, [mh("0", "2"), mh("1", "0")], 0, [4, 9])
    assert all(x["lhs"] <= 0 <= x["rhs"] for x in rep.per_radius)
    # e^{-z} in V(1) makes e^{-z} * e^z collide with the constant component
    with pytest.raises(DegenerateCurve):
        verify_moving_truncation(c, [mh("0", "exp(-z)")], 1, [4])


def test_moving_truncation_with_moving_target():
    rep = verify_moving_truncation(curve("1", "exp(z)"), [mh("z", "1"), mh("1", "0")], 1, [6, 12])
    assert rep.params["Q"] == 3 * 2 - 1
    assert bool(rep)
