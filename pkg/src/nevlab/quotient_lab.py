"""Quotients of exponential polynomials and the combinatorics behind them.

Entirety of ``F/G`` is checked on a finite disk only: a ``NotEntire``
certificate is a proof, while ``EntireUpTo`` is evidence up to its radius.
The auxiliary-map construction is verified after multiplying every
coordinate by ``G``, which leaves the projective curve unchanged and never
needs the quotient ``q = F/G`` itself.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

from .contour_zeros import local_multiplicity, locate_zeros_disk, term_scale
from .errors import (
    EpsWindowEmpty,
    NevlabError,
    PreconditionError,
    ResourceLimit,
    ZeroOnContour,
)
from .exp_poly import ExpPoly, Poly, common_domain, determinant
from .linalg import lll_reduce, nullspace, primitive_integer_vector
from .moving_targets import (
    MovingHyperplane,
    _grlex_exponents,
    frequency_scale,
    is_slow_growth,
)
from .nevanlinna import HoloCurve
from .reports import SCHEMA_VERSION
from .scalars import EXACT, GaussianRational, freq_sort_key

ENTIRE_UP_TO = "EntireUpTo"
NOT_ENTIRE = "NotEntire"
CONSISTENT = "CONSISTENT"
CANDIDATE = "CANDIDATE-COUNTEREXAMPLE"

RELATION_CAP = 10 ** 6
RELATION_TOL = 1e-10
PAIR_TERM_CAP = 16
MAP_CAP = 400
DIVISION_STEPS = 10_000


# -- divisibility ----------------------------------------------------------

@dataclass(frozen=True)
class DivisibilityCertificate:
    radius: float
    verdict: str
    witnesses: tuple

    @property
    def entire(self) -> bool:
        return self.verdict == ENTIRE_UP_TO

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "radius": self.radius,
            "verdict": self.verdict,
            "witnesses": [dict(w) for w in self.witnesses],
        }


def _winding_ladder(F: ExpPoly, z: complex, rho: float, floor: float) -> list[tuple[float, int]]:
    """Zero counts of ``F`` on circles about ``z`` shrinking by 8 from ``rho`` to ``floor``."""
    out = []
    r = rho
    while True:
        try:
            out.append((r, local_multiplicity(F, z, r)))
        except ZeroOnContour:
            pass
        if r <= floor:
            return out
        r = max(r / 8, floor)


def divides_report(F: ExpPoly, G: ExpPoly, R: float, tol: float = 1e-8) -> DivisibilityCertificate:
    """Check ``mult_z F >= mult_z G`` at every zero of ``G`` in ``|z| <= R``.

    The order of ``F`` at a zero of ``G`` is the winding count of ``F`` on the
    smallest circle of a shrinking ladder on which it is computable; the floor
    of the ladder keeps ``rho**mult`` above rounding noise.
    """
    if G.is_zero():
        raise PreconditionError("G vanishes identically")
    if F.is_zero():
        raise PreconditionError("F vanishes identically")
    common_domain([F, G])
    zs = locate_zeros_disk(G, R)
    Ff = F.to_float()
    passed = []
    for z in zs.zeros:
        w = z.location
        fz = Ff.eval(w)
        scale = max(1.0, term_scale(Ff, w))
        floor = min(z.cert_radius, max(1e-6, 10.0 ** (-9.0 / max(z.multiplicity, 1))) * max(1.0, abs(w)))
        ladder = _winding_ladder(Ff, w, z.cert_radius, floor)
        if not ladder:
            raise ZeroOnContour(f"no admissible circle for F about {w}")
        rho, mult_f = ladder[-1]
        entry = {
            "re": w.real,
            "im": w.imag,
            "mult_G": z.multiplicity,
            "mult_F": mult_f,
            "cert_radius": rho,
            "F_abs": abs(fz),
            "nonzero": abs(fz) > tol * scale,
        }
        if mult_f < z.multiplicity:
            return DivisibilityCertificate(zs.disk_radius, NOT_ENTIRE, (entry,))
        passed.append(entry)
    return DivisibilityCertificate(zs.disk_radius, ENTIRE_UP_TO, tuple(passed))


# -- rational dependence ------------------------------------------------------

@dataclass(frozen=True)
class IntegerRelation:
    values: tuple
    relation: tuple | None
    mode: str
    residual: float

    def to_json(self) -> dict:
        return {
            "values": [complex(v) for v in self.values],
            "relation": list(self.relation) if self.relation is not None else None,
            "mode": self.mode,
            "residual": self.residual,
        }


def _short_first(vecs: Sequence[Sequence[int]]) -> list[list[int]]:
    return sorted((list(v) for v in vecs if any(v)), key=lambda v: (sum(x * x for x in v), v))


def rational_dependence(freqs: Sequence, mode: str = "exact", cap: int = RELATION_CAP,
                        tol: float = RELATION_TOL) -> IntegerRelation:
    """Integer relation among complex numbers.

    ``exact`` works on Gaussian rationals through the kernel of the
    ``(Re; Im)`` matrix.  ``heuristic`` runs LLL on the embedding
    ``e_i | W Re v_i | W Im v_i`` with ``W = 1/tol``; a ``None`` relation there
    means only that nothing was found under ``cap``.
    """
    values = tuple(freqs)
    if not values:
        raise PreconditionError("need at least one value")
    mode = mode.lower()
    if mode == "exact":
        if not all(isinstance(v, GaussianRational) for v in values):
            raise PreconditionError("exact mode needs Gaussian-rational values")
        kernel = nullspace([[v.re for v in values], [v.im for v in values]])
        if not kernel:
            return IntegerRelation(values, None, "Exact", 0.0)
        ints = [primitive_integer_vector(v) for v in kernel]
        best = primitive_integer_vector(_short_first(lll_reduce(ints))[0])
        return IntegerRelation(values, tuple(best), "Exact", 0.0)
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")
    vs = [complex(v) for v in values]
    W = 1.0 / tol
    k = len(vs)
    lattice = [
        [1 if i == j else 0 for j in range(k)] + [round(W * v.real), round(W * v.imag)]
        for i, v in enumerate(vs)
    ]
    for vec in _short_first(lll_reduce(lattice)):
        c = vec[:k]
        if not any(c) or max(abs(x) for x in c) > cap:
            continue
        res = abs(math.fsum(x * v.real for x, v in zip(c, vs)) + 1j * math.fsum(x * v.imag for x, v in zip(c, vs)))
        if res <= tol:
            return IntegerRelation(values, tuple(primitive_integer_vector(c)), "Heuristic", res)
    return IntegerRelation(values, None, "Heuristic", math.inf)


# -- Corollary check ----------------------------------------------------------

@dataclass(frozen=True)
class CorollaryReport:
    verdict: str
    certificate: DivisibilityCertificate
    relation: IntegerRelation | None
    caveat: str = ""

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "verdict": self.verdict,
            "certificate": self.certificate.to_json(),
            "relation": self.relation.to_json() if self.relation is not None else None,
        }
        if self.caveat:
            out["caveat"] = self.caveat
        return out


def _nonzero_freqs(f: ExpPoly, name: str) -> list:
    freqs = f.freq_support()
    if not any(fr == 0 for fr in freqs):
        raise PreconditionError(f"{name} needs a nonzero frequency-0 coefficient")
    rest = [fr for fr in freqs if fr != 0]
    if not rest:
        raise PreconditionError(f"{name} needs at least one nonzero frequency")
    return rest


def corollary_check(F: ExpPoly, G: ExpPoly, R: float, cap: int = RELATION_CAP,
                    tol: float = RELATION_TOL) -> CorollaryReport:
    """Divisibility on ``|z| <= R`` together with a search for a rational relation
    among the nonzero frequencies of ``F`` and ``G``."""
    freqs = _nonzero_freqs(F, "F") + _nonzero_freqs(G, "G")
    cert = divides_report(F, G, R)
    mode = "exact" if common_domain([F, G]) == EXACT else "heuristic"
    rel = rational_dependence(freqs, mode, cap, tol)
    if not cert.entire:
        return CorollaryReport(CONSISTENT, cert, rel)
    if rel.relation is not None:
        return CorollaryReport(CONSISTENT, cert, rel)
    caveat = (
        f"F/G has no pole in |z| <= {cert.radius:g} only; "
        + ("the frequencies are independent over Q" if mode == "exact"
           else f"no relation with coefficients up to {cap} was found")
    )
    return CorollaryReport(CANDIDATE, cert, rel, caveat)


# -- exact division -------------------------------------------------------------

def _poly_div_exact(p: Poly, d: Poly) -> Poly | None:
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(p.coeffs)
    out = [GaussianRational(0)] * max(len(rem) - len(d.coeffs) + 1, 0)
    lead = d.coeffs[-1]
    for k in range(len(out) - 1, -1, -1):
        c = rem[k + len(d.coeffs) - 1] / lead
        out[k] = c
        for j, x in enumerate(d.coeffs):
            rem[k + j] = rem[k + j] - c * x
    if any(x != 0 for x in rem):
        return None
    return Poly(out)


def divide_exact(F: ExpPoly, G: ExpPoly) -> ExpPoly | None:
    """``q`` with ``G q == F`` in the ring of exact exponential polynomials, or None.

    Long division on leading terms under the lexicographic (Re, Im) order of
    frequencies, which is compatible with addition.
    """
    if G.is_zero():
        raise ZeroDivisionError("division by the zero exponential polynomial")
    if common_domain([F, G]) != EXACT:
        raise PreconditionError("exact division needs exact inputs")
    key = lambda fr: freq_sort_key(fr, EXACT)
    g_lead = max(G.terms, key=lambda t: key(t[0]))
    g_trail = min(G.terms, key=lambda t: key(t[0]))[0]
    if F.is_zero():
        return ExpPoly.zero()
    bound = key(min(F.terms, key=lambda t: key(t[0]))[0] - g_trail)
    q = ExpPoly.zero()
    rem = F
    for _ in range(DIVISION_STEPS):
        if rem.is_zero():
            return q
        r_lead = max(rem.terms, key=lambda t: key(t[0]))
        fr = r_lead[0] - g_lead[0]
        if key(fr) < bound:
            return None
        p = _poly_div_exact(r_lead[1], g_lead[1])
        if p is None:
            return None
        term = ExpPoly([(fr, p)])
        q = q + term
        rem = rem - term * G
    raise ResourceLimit("exact division did not terminate within the step cap")


# -- Borel / Green pairs ------------------------------------------------------------

def _minimal_vanishing(terms: Sequence[ExpPoly], i: int) -> tuple[int, ...] | None:
    others = [j for j in range(len(terms)) if j != i]
    for size in range(1, len(others) + 1):
        for sub in itertools.combinations(others, size):
            acc = terms[i]
            for j in sub:
                acc = acc + terms[j]
            if acc.is_zero():
                return (i,) + sub
    return None


def _check_identity(terms: Sequence[ExpPoly], gammas: Sequence[ExpPoly], reference) -> None:
    if len(terms) != len(gammas):
        raise PreconditionError("need one coefficient per function")
    if len(terms) < 2:
        raise PreconditionError("need at least two terms")
    if len(terms) > PAIR_TERM_CAP:
        raise ResourceLimit(f"more than {PAIR_TERM_CAP} terms")
    common_domain(list(terms) + list(gammas))
    for k, g in enumerate(gammas):
        if g.is_zero():
            raise PreconditionError(f"coefficient {k} is zero", witness=k)
        if not is_slow_growth(g, reference):
            raise PreconditionError(f"coefficient {k} is not of slow growth", witness=k)
    acc = ExpPoly.zero(terms[0].domain)
    for g, f in zip(gammas, terms):
        acc = acc + g * f
    if not acc.is_zero():
        raise PreconditionError("the weighted sum does not vanish identically")


def _pairs(terms: Sequence[ExpPoly], slow) -> list[tuple[int, int]]:
    """For every ``i`` a partner ``j`` from a minimal vanishing subsum through ``i``."""
    out = set()
    for i in range(len(terms)):
        sub = _minimal_vanishing(terms, i)
        if sub is None:
            raise PreconditionError(f"term {i} lies in no vanishing subsum", witness=i)
        ranked = sorted((slow(i, j), j) for j in sub[1:])
        cost, j = ranked[0]
        if cost is None or cost == math.inf:
            raise NevlabError(f"no slow-growth partner for term {i}")
        out.add((min(i, j), max(i, j)))
    return sorted(out)


def borel_pair(units: Sequence[ExpPoly], gammas: Sequence[ExpPoly], reference=None) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` with ``f_i/f_j`` of slow growth for ``sum gamma_i f_i = 0``.

    ``reference`` defaults to the frequency scale of the units themselves.
    Partners with equal frequency are preferred.
    """
    units = list(units)
    for k, u in enumerate(units):
        if not u.is_unit():
            raise PreconditionError(f"function {k} is not a unit", witness=k)
    reference = frequency_scale(units) if reference is None else reference
    _check_identity(units, gammas, reference)
    scale = frequency_scale(reference)
    freqs = [complex(u.terms[0][0]) for u in units]

    def slow(i, j):
        d = abs(freqs[i] - freqs[j])
        return d if d == 0 or d < scale else math.inf

    terms = [g * u for g, u in zip(gammas, units)]
    return _pairs(terms, slow)


def _proportional(f: ExpPoly, g: ExpPoly) -> bool:
    a, b = f.coordinates(), g.coordinates()
    if set(a) != set(b) or not a:
        return False
    k = next(iter(a))
    ratio = a[k] / b[k]
    return all(a[key] == ratio * b[key] for key in a)


def green_pair(fs: Sequence[ExpPoly], gammas: Sequence[ExpPoly], k: int, reference=None) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` with ``(f_i/f_j)^k`` of slow growth for ``sum gamma_i f_i^k = 0``."""
    fs = list(fs)
    n = len(fs) - 1
    if k < n * n or k < 1:
        raise PreconditionError(f"k = {k} is below n^2 = {n * n}")
    if any(f.is_zero() for f in fs):
        raise PreconditionError("functions must be nonzero")
    reference = frequency_scale(fs) if reference is None else reference
    powers = [f ** k for f in fs]
    _check_identity(powers, gammas, reference)
    scale = frequency_scale(reference)

    def slow(i, j):
        if _proportional(fs[i], fs[j]):
            return 0.0
        if fs[i].is_unit() and fs[j].is_unit():
            d = k * abs(complex(fs[i].terms[0][0]) - complex(fs[j].terms[0][0]))
            return d if d < scale else math.inf
        if fs[i].domain == EXACT:
            q = divide_exact(fs[i], fs[j])
            if q is not None:
                d = k * q.max_freq_abs()
                return d if d == 0 or d < scale else math.inf
        return math.inf

    terms = [g * p for g, p in zip(gammas, powers)]
    return _pairs(terms, slow)


# -- bounds ---------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    l: int
    m: int
    s: int
    t: int
    a: float
    w: int
    M: int
    N1: int
    N2: int
    N: int
    Q: int
    n1: int
    eps_max: float
    eps: float | None
    n0: float | None

    @property
    def valid(self) -> bool:
        return self.eps_max > 0

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            **{k: getattr(self, k) for k in ("l", "m", "s", "t", "a", "w", "M", "N1", "N2", "N", "Q", "n1")},
            "eps_max": self.eps_max,
            "eps": self.eps,
            "n0": self.n0,
            "valid": self.valid,
        }


def theorem_bounds(l: int, m: int, s: int, t: int, a: float = 1, eps: float | None = None, w: int = 1) -> BoundReport:
    """Index-set sizes and the thresholds ``n1`` and ``n0(eps)``.

    ``Q = w*N - 1`` is the truncation level for the ``N``-coordinate auxiliary
    curve; ``w`` is the coefficient-space dimension, 1 for constant
    coefficients.  ``eps`` defaults to half of ``eps_max``.
    """
    for name, v in (("l", l), ("m", m), ("s", s), ("t", t), ("w", w)):
        if int(v) != v or v < 1:
            raise PreconditionError(f"{name} must be a positive integer")
    if a < 1:
        raise PreconditionError("a must be at least 1")
    if s <= a * l:
        raise EpsWindowEmpty(f"s = {s} must exceed a*l = {a * l}")
    M = math.comb(m - 1 + t, m - 1)
    N1 = math.comb(m - 1 + t + s, m - 1)
    N2 = math.comb(m + s + t, m)
    N = N1 + (l + 1) * N2
    n1 = (l + 1) ** 2 * (N1 + N2 * (m + 1)) ** 2
    Q = w * N - 1
    weight = N * (s + t + 1) + N1 * (l + m)
    eps_max = (M * s - a * N1 * l) / (3 * a * weight)
    n0 = None
    if eps_max > 0:
        eps = eps_max / 2 if eps is None else eps
        if not 0 < eps < eps_max:
            raise PreconditionError(f"eps must lie in (0, {eps_max:.6g})")
        n0 = N * Q * a * (l + m) / (M * s - N1 * a * l - 3 * eps * a * weight)
    return BoundReport(l, m, s, t, float(a), w, M, N1, N2, N, Q, n1, eps_max, eps if n0 is not None else None, n0)


# -- auxiliary map ------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSum:
    """``c_0 + c_1 h_1^n + ... + c_k h_k^n`` with slow coefficients ``c_i``."""

    coeffs: tuple
    bases: tuple

    def __post_init__(self):
        cs, bs = tuple(self.coeffs), tuple(self.bases)
        if len(cs) != len(bs) + 1:
            raise ValueError("need one coefficient more than bases")
        if not bs:
            raise ValueError("need at least one base")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "bases", bs)

    def at(self, n: int) -> ExpPoly:
        acc = self.coeffs[0]
        for c, h in zip(self.coeffs[1:], self.bases):
            acc = acc + c * h ** n
        return acc


@dataclass(frozen=True)
class AuxiliaryMap:
    n: int
    s: int
    t: int
    M: int
    N1: int
    N2: int
    N: int
    q_index: tuple
    d_index: tuple
    scaled: tuple
    x: tuple | None
    A: tuple
    hyperplanes: tuple
    identity_holds: bool
    general_position: bool

    @property
    def curve(self) -> HoloCurve:
        """``[x_1 : ... : x_N]`` represented by the coordinates ``G x_i``."""
        return HoloCurve(self.scaled)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "s": self.s,
            "t": self.t,
            "M": self.M,
            "N1": self.N1,
            "N2": self.N2,
            "N": self.N,
            "hyperplane_count": len(self.hyperplanes),
            "q_components": self.x is not None,
            "diagonal": [str(self.A[i][i]) for i in range(self.M)],
            "identity_holds": self.identity_holds,
            "general_position": self.general_position,
        }


def _expand(linear: Sequence[tuple[ExpPoly, tuple]], power: int, dim: int, domain: str) -> dict:
    """``(sum coef * Y^e)^power`` as ``{exponent: coefficient}``."""
    out = {(0,) * dim: ExpPoly.constant(1, domain)}
    for _ in range(power):
        nxt: dict = {}
        for e, c in out.items():
            for coef, f in linear:
                key = tuple(x + y for x, y in zip(e, f))
                nxt[key] = nxt[key] + c * coef if key in nxt else c * coef
        out = {k: v for k, v in nxt.items() if not v.is_zero()}
    return out


def _triangular_det(rows: Sequence[Sequence[ExpPoly]]) -> ExpPoly | None:
    n = len(rows)
    if any(not rows[i][j].is_zero() for i in range(n) for j in range(i)):
        return None
    acc = ExpPoly.constant(1, rows[0][0].domain)
    for i in range(n):
        acc = acc * rows[i][i]
    return acc


def construct_auxiliary_map(F: PowerSum, G: PowerSum, n: int, s: int, t: int) -> AuxiliaryMap:
    """Coordinates, hyperplanes and the ``phi_c`` identity for ``F(n)/G(n)``.

    ``x_i = g^{n c_i} q`` (``|c_i| <= t + s``, ``c = (0, c_2, ..., c_m)``) come
    first, then ``x = f_i^n g^{n d}`` with ``f_0 = 1`` and ``|d| <= s + t``.
    Index sets are in ascending graded order.  Row ``i`` of ``A`` expands

        phi_{c_i} = [G_1^s q - F sum_{k<s} C(s,k) G^{s-1-k} (-b_1 g_1^n)^k] g^{n c_i}

    with ``G_1 = G - b_1 g_1^n``, which equals ``(-b_1)^s x_i g_1^{sn}``.
    """
    if min(n, s, t) < 1:
        raise PreconditionError("n, s, t must be positive")
    domain = common_domain(list(F.coeffs) + list(F.bases) + list(G.coeffs) + list(G.bases))
    if domain != EXACT:
        raise PreconditionError("the auxiliary map is built over exact data")
    a, f = F.coeffs, F.bases
    b, g = G.coeffs, G.bases
    l, m = len(f), len(g)
    if b[0].is_zero():
        raise PreconditionError("b_0 must be nonzero")
    q_index = tuple(_grlex_exponents(m - 1, t + s))
    d_index = tuple(_grlex_exponents(m, s + t))
    N1, N2 = len(q_index), len(d_index)
    M = sum(1 for c in q_index if sum(c) <= t)
    N = N1 + (l + 1) * N2
    if N > MAP_CAP:
        raise ResourceLimit(f"N = {N} exceeds the cap {MAP_CAP}")
    q_pos = {c: i for i, c in enumerate(q_index)}
    d_pos = {d: i for i, d in enumerate(d_index)}
    zero = ExpPoly.zero()

    Gn, Fn = G.at(n), F.at(n)
    gpow = [h ** n for h in g]
    fpow = [ExpPoly.constant(1)] + [h ** n for h in f]

    def gmono(d):
        acc = ExpPoly.constant(1)
        for h, e in zip(gpow, d):
            if e:
                acc = acc * h ** e
        return acc

    scaled = [gmono((0,) + c) * Fn for c in q_index]
    scaled += [fpow[i] * gmono(d) * Gn for i in range(l + 1) for d in d_index]
    q = divide_exact(Fn, Gn)
    x = None
    if q is not None:
        x = tuple([gmono((0,) + c) * q for c in q_index]
                  + [fpow[i] * gmono(d) for i in range(l + 1) for d in d_index])

    unit = lambda j: tuple(1 if k == j else 0 for k in range(m))
    g1_free = [(b[0], (0,) * m)] + [(b[j], unit(j - 1)) for j in range(2, m + 1)]
    g_full = [(b[0], (0,) * m)] + [(b[j], unit(j - 1)) for j in range(1, m + 1)]
    q_part = _expand(g1_free, s, m, EXACT)
    f_part = {}
    for k in range(s):
        tail = _expand(g_full, s - 1 - k, m, EXACT)
        lead = (-b[1]) ** k * math.comb(s, k) if k else ExpPoly.constant(1)
        for e, c in tail.items():
            key = tuple(x + (k if j == 0 else 0) for j, x in enumerate(e))
            f_part[key] = f_part[key] + lead * c if key in f_part else lead * c

    A = []
    for c in q_index[:M]:
        row = [zero] * N
        shift = (0,) + c
        for e, coef in q_part.items():
            row[q_pos[tuple(x + y for x, y in zip(e, shift))[1:]]] += coef
        for e, coef in f_part.items():
            d = tuple(x + y for x, y in zip(e, shift))
            for i in range(l + 1):
                if not a[i].is_zero():
                    row[N1 + i * N2 + d_pos[d]] -= a[i] * coef
        A.append(tuple(row))

    target = (-b[1]) ** s * gpow[0] ** s
    identity = all(
        MovingHyperplane(A[i]).apply(scaled) == target * scaled[i]
        and (x is None or MovingHyperplane(A[i]).apply(x) == target * x[i])
        for i in range(M)
    )
    diag = b[0] ** s
    if any(A[i][i] != diag for i in range(M)):
        raise NevlabError("diagonal coefficient differs from b_0^s")

    one = ExpPoly.constant(1)
    coords = [tuple(one if k == j else zero for k in range(N)) for j in range(N)]
    hyperplanes = tuple(MovingHyperplane(r) for r in coords + A)
    # H_{M+1}, ..., H_{N+M}: the phi rows on top of the coordinate rows X_M..X_{N-1}
    stack = list(A) + coords[M:]
    det = _triangular_det(stack)
    if det is None:
        if N > 10:
            raise ResourceLimit("non-triangular general-position check above size 10")
        det = determinant(stack)
    return AuxiliaryMap(
        n, s, t, M, N1, N2, N, q_index, d_index, tuple(scaled), x, tuple(A),
        hyperplanes, identity, not det.is_zero(),
    )
