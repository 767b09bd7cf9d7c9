"""Nevanlinna functions of exponential polynomials and holomorphic curves.

Circle averages go through :func:`robust_circle_mean`, which splits the
circle wherever the integrand switches branch (``log+`` cut-offs, the
argmax of ``|f_i|``, the subset chosen by the greedy ``max_K``) so that
each panel integrates an analytic function.

Counting functions come from certified zero sets.  Verifiers locate zeros
once at the largest radius of their grid and restrict for smaller radii.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .contour_zeros import (
    ZeroSet,
    counting_N,
    counting_N_truncated,
    local_multiplicity,
    locate_zeros_disk,
    term_scale,
)
from .errors import DegenerateCurve, PreconditionError
from .exp_poly import ExpPoly, common_domain, wronskian
from .linalg import exppoly_rank, float_rank, rank
from .quadrature import robust_circle_mean
from .reports import (
    FAIL,
    NOT_APPLICABLE,
    PASS,
    VerifierReport,
    csv_text,
    map_radii,
    row,
)
from .scalars import EXACT, FLOAT, as_scalar, is_exact

INF = math.inf
DEFAULT_TOL = 1e-11
COMMON_ZERO_TOL = 1e-8


def _circle(r: float, theta: np.ndarray) -> np.ndarray:
    return r * np.exp(1j * np.asarray(theta, dtype=float))


def _is_infinity(a) -> bool:
    return a is None or (isinstance(a, float) and math.isinf(a)) or a == "inf"


# -- single functions -----------------------------------------------------

def proximity_m_nodes(f: ExpPoly, a, r: float, tol: float = DEFAULT_TOL) -> tuple[float, int]:
    """``m_f(a, r)`` and the number of quadrature nodes spent."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if _is_infinity(a):
        g, sign = f, 1.0
    else:
        g = f - ExpPoly.constant(as_scalar(a, f.domain), f.domain) if a != 0 else f
        sign = -1.0
    if g.is_zero():
        raise ValueError("f - a vanishes identically")

    def raw(theta):
        return sign * g.log_abs_array(_circle(r, theta))

    return robust_circle_mean(lambda t: np.maximum(raw(t), 0.0), lambda t: raw(t) > 0, tol)


def proximity_m(f: ExpPoly, a, r: float, tol: float = DEFAULT_TOL) -> float:
    """Proximity ``m_f(a, r)``; ``a`` is a scalar or ``math.inf``."""
    return proximity_m_nodes(f, a, r, tol)[0]


def characteristic_T(f: ExpPoly, r: float, tol: float = DEFAULT_TOL) -> float:
    """``T_f(r)``.  Exponential polynomials are entire, so this is ``m_f(inf, r)``."""
    if f.is_zero():
        raise ValueError("characteristic of the zero function is undefined")
    return proximity_m(f, INF, r, tol)


def log_abs_mean(f: ExpPoly, r: float, tol: float = DEFAULT_TOL) -> float:
    """Circle average of ``log|f|``."""
    return robust_circle_mean(lambda t: f.log_abs_array(_circle(r, t)), None, tol)[0]


def _zeros_for(g: ExpPoly, radii: Sequence[float], zeros: ZeroSet | None = None) -> ZeroSet:
    if zeros is not None:
        return zeros
    return locate_zeros_disk(g, max(radii))


def verify_jensen(f: ExpPoly, r: float, zeros: ZeroSet | None = None, tol: float = DEFAULT_TOL) -> float:
    """Residual of Jensen's formula for entire ``f`` on ``|z| = r``.

    Compares the circle mean of ``log|f|`` with ``N_f(0, r) + log|c_f|``
    where ``c_f`` is the lowest-order Taylor coefficient at 0.
    """
    if f.is_zero():
        raise ValueError("Jensen's formula needs a nonzero function")
    zs = _zeros_for(f, [r], zeros)
    lhs = log_abs_mean(f, r, tol)
    _, c = f.leading_taylor_at_zero(tol=1e-12)
    rhs = counting_N(f, 0, r, zeros=zs) + math.log(abs(complex(c)))
    return abs(lhs - rhs)


def verify_fmt(f: ExpPoly, a, radii: Sequence[float], bound: float = 2.0) -> VerifierReport:
    """First Main Theorem defect ``d(r) = m_f(a,r) + N_f(a,r) - T_f(r)`` on a grid.

    PASS iff the oscillation ``max d - min d`` is at most ``bound``.
    """
    if f.is_constant():
        raise PreconditionError("FMT needs a nonconstant function")
    radii = sorted(radii)
    g = f - ExpPoly.constant(as_scalar(a, f.domain), f.domain)
    zs = _zeros_for(g, radii)

    def one(r):
        m = proximity_m(f, a, r)
        n = counting_N(g, 0, r, zeros=zs.restrict(r))
        t = characteristic_T(f, r)
        return row(r, m + n, t, m=m, N=n, T=t, defect=m + n - t)

    rows = map_radii(one, radii)
    d = [x["defect"] for x in rows]
    osc = max(d) - min(d)
    return VerifierReport(
        "fmt",
        {"f": str(f), "a": str(a), "bound": bound},
        rows,
        PASS if osc <= bound else FAIL,
        {"oscillation": osc, "max_abs_defect": max(abs(x) for x in d)},
    )


@dataclass
class NevanlinnaProfile:
    radii: list[float]
    m_vals: list[float]
    N_vals: list[float]
    T_vals: list[float]
    target: str
    quadrature_nodes: int = 0

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "target": self.target,
            "quadrature_nodes": self.quadrature_nodes,
            "rows": [
                {"r": r, "m": m, "N": n, "T": t}
                for r, m, n, t in zip(self.radii, self.m_vals, self.N_vals, self.T_vals)
            ],
        }

    def to_csv(self) -> str:
        return csv_text(["r", "m", "N", "T"], zip(self.radii, self.m_vals, self.N_vals, self.T_vals))


def profile(f: ExpPoly, a, radii: Sequence[float]) -> NevanlinnaProfile:
    """m, N and T of ``(f, a)`` on an increasing grid; ``a = inf`` gives ``T = m``."""
    radii = sorted(radii)
    if _is_infinity(a):
        res = map_radii(lambda r: proximity_m_nodes(f, INF, r), radii)
        m = [x[0] for x in res]
        return NevanlinnaProfile(radii, m, [0.0] * len(m), list(m), f"({f}, inf)", sum(x[1] for x in res))
    g = f - ExpPoly.constant(as_scalar(a, f.domain), f.domain)
    zs = _zeros_for(g, radii)

    def one(r):
        m, nodes = proximity_m_nodes(f, a, r)
        t, nodes_t = proximity_m_nodes(f, INF, r)
        return m, counting_N(g, 0, r, zeros=zs.restrict(r)), t, nodes + nodes_t

    res = map_radii(one, radii)
    return NevanlinnaProfile(
        radii,
        [x[0] for x in res],
        [x[1] for x in res],
        [x[2] for x in res],
        f"({f}, {a})",
        sum(x[3] for x in res),
    )


# -- curves ---------------------------------------------------------------

@dataclass(frozen=True)
class HoloCurve:
    """``[f_0 : ... : f_n]``; ``reduced`` records that no common zero was found."""

    components: tuple
    reduced: bool = True

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 2:
            raise ValueError("a curve needs at least two components")
        if all(c.is_zero() for c in comps):
            raise ValueError("curve components are all zero")
        common_domain(comps)
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.components) - 1

    @property
    def domain(self) -> str:
        return self.components[0].domain

    def to_float(self) -> HoloCurve:
        return HoloCurve(tuple(c.to_float() for c in self.components), self.reduced)

    @classmethod
    def build(cls, components: Sequence[ExpPoly], radius: float) -> HoloCurve:
        """Curve with ``reduced`` decided by a common-zero search on ``|z| <= radius``."""
        comps = tuple(components)
        return cls(comps, not common_zeros(comps, radius))


def common_zeros(components: Sequence[ExpPoly], r: float) -> list[tuple[complex, int]]:
    """Common zeros in ``|z| <= r`` with the minimal order among the components."""
    live = [c for c in components if not c.is_zero()]
    if any(c.is_unit() for c in live):
        return []
    base = min(live, key=lambda c: (len(c.terms), c.max_degree()))
    out = []
    for z in locate_zeros_disk(base, r).zeros:
        if abs(z.location) > r:
            continue
        mult = z.multiplicity
        rho = min(z.cert_radius, 1e-3 * max(1.0, abs(z.location)))
        for g in live:
            if g is base:
                continue
            ff = g.to_float()
            if abs(ff.eval(z.location)) > COMMON_ZERO_TOL * max(1.0, term_scale(ff, z.location)):
                mult = 0
                break
            mult = min(mult, local_multiplicity(g, z.location, rho))
        if mult > 0:
            out.append((z.location, mult))
    return out


def is_reduced(c: HoloCurve, r: float) -> bool:
    return not common_zeros(c.components, r)


def _log_norm(c: HoloCurve, zs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``log max_i |f_i(z)|`` and the argmax index."""
    logs = np.stack([
        comp.log_abs_array(zs) if not comp.is_zero() else np.full(zs.shape, -np.inf)
        for comp in c.components
    ])
    idx = np.argmax(logs, axis=0)
    return np.take_along_axis(logs, idx[None, :], axis=0)[0], idx


def curve_characteristic(c: HoloCurve, r: float, tol: float = DEFAULT_TOL) -> float:
    """``T_f(r)`` as the circle mean of ``log max |f_i|``.

    For a curve not flagged reduced, the counting function of the common
    zeros (minimal order over the components) is subtracted, which is the
    characteristic of the reduced representation.
    """
    val, _ = robust_circle_mean(
        lambda t: _log_norm(c, _circle(r, t))[0],
        lambda t: _log_norm(c, _circle(r, t))[1],
        tol,
    )
    if c.reduced:
        return val
    for z, m in common_zeros(c.components, r):
        d = abs(z)
        val -= m * (math.log(r) if d <= 1e-9 * max(1.0, r) else math.log(r / d))
    return val


# -- fixed hyperplanes ----------------------------------------------------

@dataclass(frozen=True)
class FixedHyperplane:
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(self.coeffs)
        if not cs or all(complex(a) == 0 for a in cs):
            raise ValueError("hyperplane needs a nonzero coefficient")
        object.__setattr__(self, "coeffs", cs)

    @property
    def exact(self) -> bool:
        return all(is_exact(a) or isinstance(a, int) for a in self.coeffs)


def linear_form(H: FixedHyperplane, c: HoloCurve) -> ExpPoly:
    """The pulled-back form ``sum a_k f_k``."""
    if len(H.coeffs) != len(c.components):
        raise ValueError("hyperplane and curve dimensions differ")
    domain = c.domain if H.exact else FLOAT
    comps = c.components if domain == c.domain else [f.to_float() for f in c.components]
    acc = ExpPoly.zero(domain)
    for a, f in zip(H.coeffs, comps):
        acc = acc + f.scale(as_scalar(a, domain) if domain == EXACT else complex(a))
    return acc


def _form_or_raise(H: FixedHyperplane, c: HoloCurve) -> ExpPoly:
    L = linear_form(H, c)
    if L.is_zero():
        raise PreconditionError("curve image lies inside the hyperplane", witness=H.coeffs)
    return L


def weil_fixed(H: FixedHyperplane, P: Sequence) -> float:
    """``-log(|sum a_k x_k| / max |x_k|)``."""
    if len(P) != len(H.coeffs):
        raise ValueError("point and hyperplane dimensions differ")
    xs = [complex(x) for x in P]
    num = abs(sum(complex(a) * x for a, x in zip(H.coeffs, xs)))
    if num == 0:
        raise PreconditionError("point lies on the hyperplane", witness=tuple(P))
    return -math.log(num / max(abs(x) for x in xs))


def proximity_hyperplane(c: HoloCurve, H: FixedHyperplane, r: float, tol: float = DEFAULT_TOL) -> float:
    L = _form_or_raise(H, c)

    def integrand(t):
        zs = _circle(r, t)
        return _log_norm(c, zs)[0] - L.log_abs_array(zs)

    return robust_circle_mean(integrand, lambda t: _log_norm(c, _circle(r, t))[1], tol)[0]


def counting_hyperplane(c: HoloCurve, H: FixedHyperplane, r: float, zeros: ZeroSet | None = None) -> float:
    return counting_N(_form_or_raise(H, c), 0, r, zeros=zeros)


def counting_hyperplane_truncated(
    c: HoloCurve, H: FixedHyperplane, r: float, Q: int, zeros: ZeroSet | None = None
) -> float:
    return counting_N_truncated(_form_or_raise(H, c), 0, r, Q, zeros=zeros)


def verify_fmt_hyperplane(c: HoloCurve, H: FixedHyperplane, radii: Sequence[float], bound: float = 2.0) -> VerifierReport:
    """FMT for a hyperplane: oscillation of ``m_f(H,r) + N_f(H,r) - T_f(r)``."""
    radii = sorted(radii)
    zs = _zeros_for(_form_or_raise(H, c), radii)

    def one(r):
        m = proximity_hyperplane(c, H, r)
        n = counting_hyperplane(c, H, r, zeros=zs.restrict(r))
        t = curve_characteristic(c, r)
        return row(r, m + n, t, m=m, N=n, T=t, defect=m + n - t)

    rows = map_radii(one, radii)
    d = [x["defect"] for x in rows]
    osc = max(d) - min(d)
    return VerifierReport(
        "fmt-hyperplane",
        {"curve": [str(f) for f in c.components], "H": [str(a) for a in H.coeffs], "bound": bound},
        rows,
        PASS if osc <= bound else FAIL,
        {"oscillation": osc},
    )


# -- second main theorem ----------------------------------------------------

def greedy_max_weight(vals: np.ndarray, indep: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise maximum of ``sum_{k in K} vals[k]`` over independent sets ``K``.

    ``indep[mask]`` (or ``indep[mask, node]``) says whether the hyperplanes
    in ``mask`` are linearly independent.  Independent sets of a linear
    family form a matroid, so adding the largest positive values while
    independence is kept attains the maximum.
    """
    q, m = vals.shape
    order = np.argsort(-vals, axis=0, kind="stable")
    cols = np.arange(m)
    chosen = np.zeros(m, dtype=np.int64)
    total = np.zeros(m)
    for step in range(q):
        idx = order[step]
        v = vals[idx, cols]
        cand = chosen | (np.int64(1) << idx)
        ok = indep[cand] if indep.ndim == 1 else indep[cand, cols]
        ok = ok & (v > 0)
        chosen = np.where(ok, cand, chosen)
        total += np.where(ok, v, 0.0)
    return total, chosen


def independence_table(rows: Sequence[Sequence], tol: float = 1e-10) -> np.ndarray:
    """``table[mask]`` is True when the coefficient rows in ``mask`` are independent."""
    q = len(rows)
    exact = all(is_exact(a) or isinstance(a, int) for rw in rows for a in rw)
    table = np.zeros(1 << q, dtype=bool)
    table[0] = True
    for mask in range(1, 1 << q):
        sub = [rows[k] for k in range(q) if mask >> k & 1]
        if len(sub) > len(rows[0]):
            continue
        rk = rank(sub) if exact else float_rank(np.array(sub, dtype=complex), tol)
        table[mask] = rk == len(sub)
    return table


def general_position_fixed(Hs: Sequence[FixedHyperplane]) -> bool:
    """Every subset of size ``min(q, n+1)`` is linearly independent."""
    if not Hs:
        return True
    size = min(len(Hs), len(Hs[0].coeffs))
    exact = all(H.exact for H in Hs)
    for sub in itertools.combinations(Hs, size):
        rows = [list(H.coeffs) for H in sub]
        rk = rank(rows) if exact else float_rank(np.array(rows, dtype=complex))
        if rk < size:
            return False
    return True


def _require_nondegenerate(c: HoloCurve) -> ExpPoly:
    W = wronskian(list(c.components))
    if c.domain == EXACT:
        degenerate = W.is_zero()
    else:
        degenerate = exppoly_rank(list(c.components)) < len(c.components)
    if degenerate:
        raise DegenerateCurve("curve is linearly degenerate (Wronskian vanishes)")
    return W


def _require_reduced(c: HoloCurve, r: float) -> None:
    cz = common_zeros(c.components, r)
    if cz:
        raise PreconditionError("curve components share a zero", witness=cz[0])


def _summarize(name: str, params: dict, rows: list[dict], allowed: float) -> VerifierReport:
    bad = [x["r"] for x in rows if x["margin"] < 0]
    frac = len(bad) / len(rows) if rows else 0.0
    return VerifierReport(
        name,
        params,
        rows,
        PASS if frac <= allowed else FAIL,
        {"violation_fraction": frac, "outliers": bad},
    )


def verify_vojta_smt(
    c: HoloCurve,
    Hs: Sequence[FixedHyperplane],
    eps: float,
    radii: Sequence[float],
    allowed_violation: float = 0.1,
    tol: float = DEFAULT_TOL,
) -> VerifierReport:
    """Margins of the Second Main Theorem with Wronskian ramification.

    Per radius, ``lhs = mean_theta max_K sum_{k in K} lambda_{H_k}(f) + N_W(0, r)``
    and ``rhs = (n + 1 + eps) T_f(r)``.  The report passes when the fraction
    of radii with negative margin is at most ``allowed_violation``; the
    offending radii are listed either way.
    """
    radii = sorted(radii)
    W = _require_nondegenerate(c)
    _require_reduced(c, max(radii))
    forms = [_form_or_raise(H, c) for H in Hs]
    indep = independence_table([list(H.coeffs) for H in Hs])
    wz = _zeros_for(W, radii)

    def one(r):
        lhs_int = smt_integral(c, forms, indep, r, tol)
        nw = counting_N(W, 0, r, zeros=wz.restrict(r))
        t = curve_characteristic(c, r, tol)
        return row(r, lhs_int + nw, (c.n + 1 + eps) * t, proximity=lhs_int, N_W=nw, T=t)

    params = {
        "curve": [str(f) for f in c.components],
        "hyperplanes": [[str(a) for a in H.coeffs] for H in Hs],
        "eps": eps,
    }
    return _summarize("vojta-smt", params, map_radii(one, radii), allowed_violation)


def smt_integral(c: HoloCurve, forms: Sequence[ExpPoly], indep: np.ndarray, r: float, tol: float = DEFAULT_TOL) -> float:
    """``mean_theta max_K sum lambda_{H_k}(f(r e^{i theta}))`` for fixed forms."""

    def parts(t):
        zs = _circle(r, t)
        lognorm, arg = _log_norm(c, zs)
        vals = np.stack([lognorm - L.log_abs_array(zs) for L in forms])
        total, chosen = greedy_max_weight(vals, indep)
        return total, chosen * (c.n + 1) + arg

    return robust_circle_mean(lambda t: parts(t)[0], lambda t: parts(t)[1], tol)[0]


def verify_truncation_lemma(
    c: HoloCurve, Hs: Sequence[FixedHyperplane], r, slack: float = 1e-6
) -> VerifierReport:
    """``sum N_f(H_j) - N_W(0) <= sum N^(n)_f(H_j) + slack`` at each radius."""
    radii = sorted(r) if isinstance(r, (list, tuple)) else [float(r)]
    if not general_position_fixed(Hs):
        raise PreconditionError("hyperplanes are not in general position")
    W = _require_nondegenerate(c)
    _require_reduced(c, max(radii))
    forms = [_form_or_raise(H, c) for H in Hs]
    R = max(radii)
    zsets = [locate_zeros_disk(L, R) for L in forms]
    wz = locate_zeros_disk(W, R)
    rows = []
    for rr in radii:
        full = sum(counting_N(L, 0, rr, zeros=z.restrict(rr)) for L, z in zip(forms, zsets))
        trunc = sum(counting_N_truncated(L, 0, rr, c.n, zeros=z.restrict(rr)) for L, z in zip(forms, zsets))
        nw = counting_N(W, 0, rr, zeros=wz.restrict(rr))
        rows.append(row(rr, full - nw, trunc + slack, N=full, N_trunc=trunc, N_W=nw))
    ok = all(x["margin"] >= 0 for x in rows)
    params = {"curve": [str(f) for f in c.components], "n": c.n, "slack": slack}
    return VerifierReport("truncation-lemma", params, rows, PASS if ok else FAIL)


def vanishing_subsum(fs: Sequence[ExpPoly]) -> tuple[int, ...] | None:
    """A nonempty proper subset with exactly zero sum, or None."""
    idx = range(len(fs))
    for size in range(1, len(fs)):
        for sub in itertools.combinations(idx, size):
            acc = ExpPoly.zero(fs[0].domain)
            for i in sub:
                acc = acc + fs[i]
            if acc.is_zero():
                return sub
    return None


def verify_truncated_borel(fs: Sequence[ExpPoly], radii: Sequence[float], C: float = 50.0) -> VerifierReport:
    """Truncated Borel inequality for ``f_0 + ... + f_{n+1} = 0``.

    Checks ``T_f(r) <= sum_{j=0}^{n+1} N^(n)_{f_j}(0, r) + C log+ T_f(r) + C``
    with ``f = [f_0 : ... : f_n]``.  A two-term identity (``n = 0``) is
    reported NOT_APPLICABLE.
    """
    fs = list(fs)
    if len(fs) < 2:
        raise PreconditionError("need at least two functions")
    if len(fs) > 10:
        raise PreconditionError("at most ten functions (exhaustive subset check)")
    if common_domain(fs) != EXACT:
        raise PreconditionError("the identity must be checked in the exact domain")
    total = ExpPoly.zero()
    for f in fs:
        total = total + f
    if not total.is_zero():
        raise PreconditionError("the functions do not sum to zero", witness=str(total))
    sub = vanishing_subsum(fs)
    if sub is not None:
        raise PreconditionError("a proper subsum vanishes", witness=sub)
    n = len(fs) - 2
    params = {"functions": [str(f) for f in fs], "C": C, "n": n}
    if n == 0:
        return VerifierReport("truncated-borel", params, [], NOT_APPLICABLE,
                              {"reason": "two-term identity; the inequality is degenerate for n = 0"})
    radii = sorted(radii)
    c = HoloCurve(tuple(fs[: n + 1]))
    _require_reduced(c, max(radii))
    R = max(radii)
    zsets = [locate_zeros_disk(f, R) for f in fs]

    def one(r):
        t = curve_characteristic(c, r)
        nt = sum(counting_N_truncated(f, 0, r, n, zeros=z.restrict(r)) for f, z in zip(fs, zsets))
        return row(r, t, nt + C * max(0.0, math.log(t) if t > 0 else 0.0) + C, T=t, N_trunc=nt)

    rows = map_radii(one, radii)
    ok = all(x["margin"] >= 0 for x in rows)
    return VerifierReport("truncated-borel", params, rows, PASS if ok else FAIL)


__all__ = [
    "INF",
    "FixedHyperplane",
    "HoloCurve",
    "NevanlinnaProfile",
    "characteristic_T",
    "common_zeros",
    "counting_hyperplane",
    "counting_hyperplane_truncated",
    "curve_characteristic",
    "general_position_fixed",
    "greedy_max_weight",
    "independence_table",
    "is_reduced",
    "linear_form",
    "log_abs_mean",
    "profile",
    "proximity_hyperplane",
    "proximity_m",
    "smt_integral",
    "vanishing_subsum",
    "verify_fmt",
    "verify_fmt_hyperplane",
    "verify_jensen",
    "verify_truncated_borel",
    "verify_truncation_lemma",
    "verify_vojta_smt",
    "weil_fixed",
]
