"""Moving hyperplanes with exponential-polynomial coefficients.

The construction behind the moving-target Second Main Theorem: coefficient
spaces ``V(t)`` spanned by monomials in the target coefficients, the lifted
curve ``F = [h_m f_k]`` and the constant hyperplanes ``L^_ij`` with
``h_i L_j(x) = L^_ij(h_1 x_0, ..., h_w x_0, h_1 x_1, ..., h_w x_n)``.

Lifted coordinates are ordered with the component index ``k`` outer and the
basis index ``m`` inner, so coordinate ``k*w + m`` holds ``h_m f_k``.
All indices are 0-based.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .contour_zeros import counting_N, counting_N_truncated, locate_zeros_disk
from .errors import DegenerateCurve, NevlabError, PreconditionError, ResourceLimit
from .exp_poly import ExpPoly, common_domain, determinant, wronskian
from .linalg import IncrementalBasis, rank, solve_in_span
from .nevanlinna import (
    DEFAULT_TOL,
    HoloCurve,
    _circle,
    _log_norm,
    _require_reduced,
    _summarize,
    characteristic_T,
    curve_characteristic,
    greedy_max_weight,
)
from .quadrature import robust_circle_mean
from .reports import FAIL, PASS, VerifierReport, map_radii, row
from .scalars import EXACT

MONOMIAL_CAP = 10 ** 4
RANK_TOL = 1e-10


# -- slow growth ---------------------------------------------------------

def frequency_scale(reference) -> float:
    """Largest frequency modulus of a curve, a list of functions, or a number."""
    if isinstance(reference, (int, float)):
        return float(reference)
    comps = reference.components if isinstance(reference, HoloCurve) else list(reference)
    return max((f.max_freq_abs() for f in comps if not f.is_zero()), default=0.0)


def is_slow_growth(a: ExpPoly, reference, strict: bool = False) -> bool:
    """Growth-order surrogate for ``T_a = o(T_ref)`` on exponential polynomials.

    Constants are always slow.  Otherwise ``a`` must have every frequency of
    modulus below the reference scale; ``strict`` only admits polynomials
    (frequency 0) and needs a reference with a nonzero frequency.
    """
    if a.is_constant():
        return True
    scale = frequency_scale(reference)
    if strict:
        return a.max_freq_abs() == 0 and scale > 0
    return a.max_freq_abs() < scale


@dataclass(frozen=True)
class MovingHyperplane:
    """``L = gamma_0 X_0 + ... + gamma_n X_n`` with ExpPoly coefficients."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(self.coeffs)
        if not cs or all(g.is_zero() for g in cs):
            raise ValueError("moving hyperplane needs a nonzero coefficient")
        common_domain(cs)
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def checked(cls, coeffs: Sequence[ExpPoly], reference, strict: bool = False) -> MovingHyperplane:
        """Build after checking every coefficient grows slowly against ``reference``."""
        for k, g in enumerate(coeffs):
            if not is_slow_growth(g, reference, strict):
                raise PreconditionError(f"coefficient {k} is not of slow growth", witness=k)
        return cls(tuple(coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    def apply(self, xs: Sequence[ExpPoly]) -> ExpPoly:
        acc = ExpPoly.zero(self.coeffs[0].domain)
        for g, x in zip(self.coeffs, xs):
            acc = acc + g * x
        return acc

    def is_constant(self) -> bool:
        return all(g.is_constant() for g in self.coeffs)


def weil_moving(H: MovingHyperplane, z: complex, P: Sequence) -> float:
    """Moving Weil function at ``z``, normalized by ``max_k |gamma_k(z)|``."""
    g = [c.eval(z) for c in H.coeffs]
    xs = [complex(x) for x in P]
    num = abs(sum(a * x for a, x in zip(g, xs)))
    if num == 0:
        raise PreconditionError("point lies on the hyperplane at z", witness=(z, tuple(P)))
    return -math.log(num / (max(abs(x) for x in xs) * max(abs(a) for a in g)))


# -- V(t) ------------------------------------------------------------------

def _grlex_exponents(nvars: int, max_deg: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(max_deg + 1):
        layer = [e for e in itertools.product(range(d + 1), repeat=nvars) if sum(e) == d]
        layer.sort(reverse=True)
        out.extend(layer)
    return out


@dataclass(frozen=True)
class VtBasis:
    t: int
    generators: tuple
    basis: tuple
    extended_basis: tuple
    exponents: tuple

    @property
    def u(self) -> int:
        return len(self.basis)

    @property
    def w(self) -> int:
        return len(self.extended_basis)


def build_Vt(gammas: Sequence[ExpPoly], t: int) -> VtBasis:
    """Bases of ``V(t)`` and ``V(t+1)`` from monomials in the generators.

    Monomials are scanned in graded lexicographic order, so ``h_1 = 1``;
    a monomial joins the basis when it is independent of the earlier ones
    on frequency-monomial coordinates (exact).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    gens = []
    for g in gammas:
        if g not in gens:
            gens.append(g)
    if not gens:
        gens = [ExpPoly.constant(1)]
    if common_domain(gens) != EXACT:
        raise PreconditionError("V(t) is built in the exact domain")
    count = math.comb(len(gens) + t + 1, len(gens))
    if count > MONOMIAL_CAP:
        raise ResourceLimit(f"{count} monomials exceed the cap of {MONOMIAL_CAP}")

    products: dict[tuple, ExpPoly] = {}
    ib = IncrementalBasis()
    basis, extended, exps = [], [], []
    for e in _grlex_exponents(len(gens), t + 1):
        if sum(e) == 0:
            p = ExpPoly.constant(1)
        else:
            i = next(k for k, x in enumerate(e) if x)
            prev = e[:i] + (e[i] - 1,) + e[i + 1:]
            p = products[prev] * gens[i]
        products[e] = p
        if ib.add(p.coordinates()):
            extended.append(p)
            exps.append(e)
            if sum(e) <= t:
                basis.append(p)
    return VtBasis(t, tuple(gens), tuple(basis), tuple(extended), tuple(exps))


def generators_of(Hs: Sequence[MovingHyperplane]) -> list[ExpPoly]:
    out = []
    for H in Hs:
        for g in H.coeffs:
            if not g.is_zero() and g not in out:
                out.append(g)
    return out


# -- lifted curve ----------------------------------------------------------

@dataclass(frozen=True)
class LiftedCurve:
    base: HoloCurve
    basis: VtBasis
    components: tuple
    sandwich: tuple = ()

    def as_curve(self) -> HoloCurve:
        return HoloCurve(self.components, self.base.reduced)


def lift_curve(c: HoloCurve, vb: VtBasis, check_radii: Sequence[float] = (2.0, 5.0, 10.0)) -> LiftedCurve:
    """``F = [h_1 f_0 : ... : h_w f_0 : h_1 f_1 : ... : h_w f_n]``.

    At each radius in ``check_radii`` the sandwich
    ``T_f <= T_F <= T_f + sum T_{h_m}`` is evaluated and must hold.
    """
    if c.domain != EXACT:
        raise PreconditionError("lifting needs an exact curve")
    comps = tuple(h * f for f in c.components for h in vb.extended_basis)
    lifted = HoloCurve(comps, c.reduced)
    checks = []
    for r in check_radii:
        tf = curve_characteristic(c, r)
        tF = curve_characteristic(lifted, r)
        upper = tf + sum(characteristic_T(h, r) for h in vb.extended_basis)
        if not (tf - 1e-6 <= tF <= upper + 1e-6):
            raise NevlabError(f"characteristic sandwich fails at r={r}: {tf} <= {tF} <= {upper}")
        checks.append((r, tf, tF, upper))
    return LiftedCurve(c, vb, comps, tuple(checks))


# -- hat hyperplanes -------------------------------------------------------

@dataclass(frozen=True)
class HatHyperplane:
    """``L^_ij = sum_{k, nu} c[k*w + nu] X_{k nu}`` for basis index ``i`` and target ``j``."""

    i: int
    j: int
    c: tuple


def express_hat_hyperplanes(vb: VtBasis, Hs: Sequence[MovingHyperplane]) -> list[HatHyperplane]:
    """Coefficients ``c_ijk nu`` with ``h_i gamma_jk = sum_nu c_ijk nu h_nu``.

    Every hat hyperplane is checked against the defining identity before
    it is returned.
    """
    ext = list(vb.extended_basis)
    w = len(ext)
    out = []
    for j, H in enumerate(Hs):
        for i, h in enumerate(vb.basis):
            c = []
            for k, g in enumerate(H.coeffs):
                sol = solve_in_span(ext, h * g)
                if sol is None:
                    raise PreconditionError("h_i * gamma_jk lies outside V(t+1)", witness=(i, j, k))
                c.extend(sol)
            hat = HatHyperplane(i, j, tuple(c))
            if not form_relation_holds(vb, H, hat):
                raise NevlabError(f"form relation fails for ({i}, {j})")
            out.append(hat)
    assert all(len(x.c) == w * len(Hs[x.j].coeffs) for x in out)
    return out


def form_relation_holds(vb: VtBasis, H: MovingHyperplane, hat: HatHyperplane) -> bool:
    """Structural check of ``h_i L_j(x) = L^_ij(h_1 x_0, ..., h_w x_n)``.

    Both sides are linear in the formal variables ``x_k``; compare the
    coefficient of each ``x_k`` as exact exponential polynomials.
    """
    ext = vb.extended_basis
    w = len(ext)
    h = vb.basis[hat.i]
    for k, g in enumerate(H.coeffs):
        rhs = ExpPoly.zero()
        for nu in range(w):
            rhs = rhs + ext[nu].scale(hat.c[k * w + nu])
        if h * g != rhs:
            return False
    return True


def hats_in_general_position(hats: Sequence[HatHyperplane]) -> bool:
    """Exact independence of the coefficient vectors (the count is at most the dimension)."""
    if not hats:
        return True
    return rank([list(h.c) for h in hats]) == len(hats)


# -- general position over K_gamma -------------------------------------------

def _independent_over_K(Hs: Sequence[MovingHyperplane]) -> bool:
    """Rows ``gamma_j`` independent over the function field: some maximal minor is nonzero."""
    s = len(Hs)
    ncols = len(Hs[0].coeffs)
    if s > ncols:
        return False
    for cols in itertools.combinations(range(ncols), s):
        if not determinant([[H.coeffs[k] for k in cols] for H in Hs]).is_zero():
            return True
    return False


def general_position_moving(Hs: Sequence[MovingHyperplane], n: int | None = None) -> bool:
    """Every subset of size ``min(q, n+1)`` is linearly independent over ``K_gamma``."""
    if not Hs:
        return True
    n = Hs[0].n if n is None else n
    size = min(len(Hs), n + 1)
    return all(_independent_over_K(sub) for sub in itertools.combinations(Hs, size))


def claim_holds(vb: VtBasis, Hs: Sequence[MovingHyperplane], hats: Sequence[HatHyperplane] | None = None) -> bool:
    """For every ``J`` independent over ``K_gamma`` with ``u|J| <= w(n+1)``, the
    hat hyperplanes ``L^_ij`` (``i < u``, ``j in J``) are independent."""
    hats = express_hat_hyperplanes(vb, Hs) if hats is None else hats
    n1 = len(Hs[0].coeffs)
    for size in range(1, min(len(Hs), n1) + 1):
        for J in itertools.combinations(range(len(Hs)), size):
            if vb.u * size > vb.w * n1:
                continue
            if not _independent_over_K([Hs[j] for j in J]):
                continue
            if not hats_in_general_position([h for h in hats if h.j in J]):
                return False
    return True


# -- verifiers -----------------------------------------------------------------

@dataclass(frozen=True)
class _Setup:
    vb: VtBasis
    lifted: LiftedCurve
    W: ExpPoly
    forms: tuple


def _setup(c: HoloCurve, Hs: Sequence[MovingHyperplane], t: int, R: float) -> _Setup:
    if c.domain != EXACT or any(H.coeffs[0].domain != EXACT for H in Hs):
        raise PreconditionError("moving-target construction needs exact inputs")
    if any(len(H.coeffs) != len(c.components) for H in Hs):
        raise ValueError("hyperplane and curve dimensions differ")
    vb = build_Vt(generators_of(Hs), t)
    lifted = lift_curve(c, vb, check_radii=())
    W = wronskian(list(lifted.components))
    if W.is_zero():
        raise DegenerateCurve("curve components are dependent over K_gamma (lifted Wronskian vanishes)")
    _require_reduced(c, R)
    forms = []
    for j, H in enumerate(Hs):
        L = H.apply(c.components)
        if L.is_zero():
            raise PreconditionError("curve lies inside a moving hyperplane", witness=j)
        forms.append(L)
    return _Setup(vb, lifted, W, tuple(forms))


def _pointwise_independence(Hs, zs: np.ndarray, n1: int) -> tuple[np.ndarray, np.ndarray]:
    """``table[mask, node]`` for the evaluated rows and ``max_k log|gamma_jk|`` per target."""
    q = len(Hs)
    logs = np.stack([
        np.stack([g.log_abs_array(zs) if not g.is_zero() else np.full(zs.shape, -np.inf) for g in H.coeffs])
        for H in Hs
    ])  # (q, n1, nodes)
    top = logs.max(axis=1)  # (q, nodes)
    rows = []
    for H, t in zip(Hs, top):
        vals = []
        for g in H.coeffs:
            if g.is_zero():
                vals.append(np.zeros(zs.shape, dtype=complex))
                continue
            s, shift = g.eval_scaled(zs)
            with np.errstate(over="ignore", invalid="ignore"):
                v = s * np.exp(shift - np.where(np.isfinite(t), t, 0.0))
            vals.append(np.where(np.isfinite(t), v, 0.0))
        rows.append(np.stack(vals, axis=-1))  # (nodes, n1)
    rows = np.stack(rows, axis=1)  # (nodes, q, n1)
    table = np.zeros((1 << q, zs.size), dtype=bool)
    table[0] = True
    for mask in range(1, 1 << q):
        idx = [k for k in range(q) if mask >> k & 1]
        if len(idx) > n1:
            continue
        sv = np.linalg.svd(rows[:, idx, :], compute_uv=False)
        table[mask] = sv[:, -1] > RANK_TOL * np.maximum(sv[:, 0], 1e-300)
    return table, top


def moving_smt_integral(c: HoloCurve, Hs, forms, r: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``mean max_J sum lambda_{H_j(z)}(f(z))`` and the fraction of skipped nodes.

    Nodes where every coefficient of a target vanishes numerically leave
    that target out of ``J``.
    """
    seen = [0, 0]

    def parts(t):
        zs = _circle(r, t)
        lognorm, arg = _log_norm(c, zs)
        table, top = _pointwise_independence(Hs, zs, c.n + 1)
        bad = ~np.isfinite(top)
        vals = np.stack([lognorm + tp - L.log_abs_array(zs) for L, tp in zip(forms, top)])
        vals = np.where(bad, -np.inf, vals)
        total, chosen = greedy_max_weight(vals, table)
        return total, chosen * (c.n + 1) + arg, int(bad.any(axis=0).sum()), zs.size

    def integrand(t):
        total, _, skipped, count = parts(t)
        seen[0] += skipped
        seen[1] += count
        return total

    val, _ = robust_circle_mean(integrand, lambda t: parts(t)[1], tol)
    return val, (seen[0] / seen[1] if seen[1] else 0.0)


def verify_moving_smt(
    c: HoloCurve,
    Hs: Sequence[MovingHyperplane],
    t: int,
    eps: float,
    radii: Sequence[float],
    allowed_violation: float = 0.1,
    tol: float = DEFAULT_TOL,
) -> VerifierReport:
    """Margins of the moving-target SMT.

    ``lhs = mean max_J sum lambda_{H_j(z)}(f) + N_W(0, r) / u`` with ``W`` the
    Wronskian of all ``w(n+1)`` lifted components; ``rhs = (n+1+eps) T_f(r)``.
    """
    radii = sorted(radii)
    st = _setup(c, Hs, t, max(radii))
    wz = locate_zeros_disk(st.W, max(radii))
    u = st.vb.u

    def one(r):
        prox, skipped = moving_smt_integral(c, Hs, st.forms, r, tol)
        nw = counting_N(st.W, 0, r, zeros=wz.restrict(r))
        T = curve_characteristic(c, r, tol)
        return row(r, prox + nw / u, (c.n + 1 + eps) * T, proximity=prox, N_W=nw, T=T, skipped_fraction=skipped)

    rows = map_radii(one, radii)
    params = {
        "curve": [str(f) for f in c.components],
        "targets": [[str(g) for g in H.coeffs] for H in Hs],
        "t": t,
        "eps": eps,
        "u": u,
        "w": st.vb.w,
    }
    rep = _summarize("moving-smt", params, rows, allowed_violation)
    rep.extra["skipped_fraction"] = max(x["skipped_fraction"] for x in rows)
    return rep


def verify_moving_truncation(
    c: HoloCurve, Hs: Sequence[MovingHyperplane], t: int, r, slack: float = 0.05, Q: int | None = None
) -> VerifierReport:
    """``sum N_f(H_j) - N_W(0)/u <= sum N^(Q)_f(H_j) + slack * T_f``, by default ``Q = w(n+1) - 1``."""
    radii = sorted(r) if isinstance(r, (list, tuple)) else [float(r)]
    if not general_position_moving(Hs, c.n):
        raise PreconditionError("moving hyperplanes are not in general position")
    R = max(radii)
    st = _setup(c, Hs, t, R)
    u, w = st.vb.u, st.vb.w
    Q = w * (c.n + 1) - 1 if Q is None else Q
    if Q < 1:
        raise ValueError("truncation level Q must be positive")
    zsets = [locate_zeros_disk(L, R) for L in st.forms]
    wz = locate_zeros_disk(st.W, R)
    rows = []
    for rr in radii:
        full = sum(counting_N(L, 0, rr, zeros=z.restrict(rr)) for L, z in zip(st.forms, zsets))
        trunc = sum(counting_N_truncated(L, 0, rr, Q, zeros=z.restrict(rr)) for L, z in zip(st.forms, zsets))
        nw = counting_N(st.W, 0, rr, zeros=wz.restrict(rr))
        T = curve_characteristic(c, rr)
        rows.append(row(rr, full - nw / u, trunc + slack * T, N=full, N_trunc=trunc, N_W=nw, T=T))
    ok = all(x["margin"] >= 0 for x in rows)
    params = {"curve": [str(f) for f in c.components], "t": t, "Q": Q, "u": u, "w": w, "slack": slack}
    return VerifierReport("moving-truncation", params, rows, PASS if ok else FAIL)


__all__ = [
    "HatHyperplane",
    "LiftedCurve",
    "MovingHyperplane",
    "VtBasis",
    "build_Vt",
    "claim_holds",
    "express_hat_hyperplanes",
    "form_relation_holds",
    "frequency_scale",
    "general_position_moving",
    "generators_of",
    "hats_in_general_position",
    "is_slow_growth",
    "lift_curve",
    "moving_smt_integral",
    "verify_moving_smt",
    "verify_moving_truncation",
    "weil_moving",
]
