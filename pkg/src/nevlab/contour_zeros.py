"""Argument-principle zero counting and certified zero location on disks.

Winding numbers are computed by adaptive Gauss-Legendre quadrature of
``f'/f`` along circles and box boundaries, using the exact derivative of the
exponential polynomial.  Zeros are isolated by quadrisection of a bounding
square and polished by damped Newton iteration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClusterUnresolved, NonConvergent, ZeroOnContour
from .exp_poly import ExpPoly
from .quadrature import GL_ORDER, TWO_PI, adaptive_integrate
from .scalars import as_scalar

SNAP_TOL = 0.25
WINDING_TOL = 1e-6
ARC_CAP = 2 ** 16
MAX_NUDGES = 21
MULTIPLICITY_CAP = 16
# split fractions tried in turn so box edges avoid zeros
_SPLITS = (0.5123, 0.4871, 0.5311, 0.4617, 0.5573, 0.4409)


@dataclass(frozen=True)
class Zero:
    location: complex
    multiplicity: int
    cert_radius: float
    flagged: bool = False


@dataclass(frozen=True)
class ZeroSet:
    disk_radius: float
    zeros: tuple[Zero, ...]
    total_count: int
    requested_radius: float = field(default=0.0)

    def restrict(self, r: float) -> ZeroSet:
        """Zeros with ``|z| <= r`` for ``r`` not exceeding the located radius."""
        if r > self.disk_radius:
            raise ValueError("cannot restrict a zero set to a larger disk")
        kept = tuple(z for z in self.zeros if abs(z.location) <= r)
        return ZeroSet(r, kept, sum(z.multiplicity for z in kept), r)

    def to_json(self) -> dict:
        return {
            "radius": self.disk_radius,
            "zeros": [
                {
                    "re": z.location.real,
                    "im": z.location.imag,
                    "mult": z.multiplicity,
                    "cert_radius": z.cert_radius,
                    **({"flagged": True} if z.flagged else {}),
                }
                for z in self.zeros
            ],
            "total": self.total_count,
        }


class _Ratio:
    """Vectorized ``f'/f`` that never overflows."""

    def __init__(self, f: ExpPoly):
        self.f = f.to_float()
        self.fp = self.f.derivative()

    def __call__(self, z: np.ndarray) -> np.ndarray:
        s, shift = self.f.eval_scaled(z)
        sd, shift_d = self.fp.eval_scaled(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return sd / s * np.exp(shift_d - shift)


def _winding_circle(ratio: _Ratio, center: complex, rho: float) -> complex:
    def integrand(theta):
        e = np.exp(1j * theta)
        return ratio(center + rho * e) * (1j * rho * e)

    val, _ = adaptive_integrate(
        integrand, np.linspace(0.0, TWO_PI, 17), WINDING_TOL * TWO_PI, ARC_CAP * GL_ORDER
    )
    return val / (2j * math.pi)


def _winding_box(ratio: _Ratio, lo: complex, hi: complex) -> complex:
    corners = np.array([lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag), lo])

    def integrand(t):
        k = np.clip(np.floor(t).astype(int), 0, 3)
        a = corners[k]
        d = corners[k + 1] - a
        return ratio(a + (t - k) * d) * d

    val, _ = adaptive_integrate(
        integrand, np.linspace(0.0, 4.0, 9), WINDING_TOL * TWO_PI, ARC_CAP * GL_ORDER
    )
    return val / (2j * math.pi)


def _snap(w: complex) -> int | None:
    if not (cmath.isfinite(w)):
        return None
    n = round(w.real)
    if abs(w.real - n) < SNAP_TOL and abs(w.imag) < SNAP_TOL:
        return int(n)
    return None


def _try_winding(fn, *args) -> int | None:
    try:
        return _snap(fn(*args))
    except NonConvergent:
        return None


def _require_nonzero(f: ExpPoly) -> None:
    if f.is_zero():
        raise ValueError("zero counting needs a nonzero function")


def count_with_radius(f: ExpPoly, r: float) -> tuple[int, float]:
    """Winding count over ``|z| = r'`` and the radius ``r'`` actually used.

    ``r'`` equals ``r`` unless the contour had to be nudged outward by a
    factor ``1 + 2^-k * 1e-3`` to dodge a zero.
    """
    _require_nonzero(f)
    if r <= 0:
        raise ValueError("radius must be positive")
    ratio = _Ratio(f)
    last: Exception | None = None
    for k in range(-1, MAX_NUDGES):
        rr = r if k < 0 else r * (1 + 2.0 ** (-k) * 1e-3)
        try:
            n = _snap(_winding_circle(ratio, 0j, rr))
        except NonConvergent as exc:
            last = exc
            continue
        if n is not None:
            return n, rr
        last = ZeroOnContour(f"winding integral not integral at r={rr}")
    if isinstance(last, NonConvergent) and "nodes" in str(last):
        raise NonConvergent(f"winding quadrature did not converge near r={r}") from last
    raise ZeroOnContour(f"a zero sits on |z|={r} after {MAX_NUDGES} nudges")


def count_zeros_disk(f: ExpPoly, r: float) -> int:
    """Number of zeros (with multiplicity) of ``f`` in ``|z| <= r``."""
    return count_with_radius(f, r)[0]


def term_scale(f: ExpPoly, z: complex) -> float:
    """Sum of term magnitudes at ``z``: the natural scale for residuals of ``f(z)``."""
    s = 0.0
    for freq, p in f.terms:
        pv = 0.0
        for c in reversed(p.coeffs):
            pv = pv * abs(z) + abs(complex(c))
        s += pv * math.exp((complex(freq) * z).real)
    return s


def newton(f: ExpPoly, fp: ExpPoly, z0: complex, mult: int = 1, tol: float = 1e-12, maxiter: int = 80):
    """Damped (multiplicity-aware) Newton; returns the limit or None."""
    z = complex(z0)
    fz = f.eval(z)
    for _ in range(maxiter):
        if fz == 0:
            return z
        dz = fp.eval(z)
        if dz == 0 or not cmath.isfinite(dz) or not cmath.isfinite(fz):
            return None
        step = mult * fz / dz
        lam = 1.0
        for _ in range(40):
            zn = z - lam * step
            fn = f.eval(zn)
            if abs(fn) < abs(fz) or abs(lam * step) < 1e-15 * max(1.0, abs(z)):
                break
            lam /= 2
        z, fz = zn, fn
        if abs(lam * step) <= 1e-15 * max(1.0, abs(z)):
            break
    if abs(fz) <= tol * max(1.0, term_scale(f, z)):
        return z
    return None


@dataclass
class _Box:
    lo: complex
    hi: complex
    count: int

    @property
    def side(self) -> float:
        return max(self.hi.real - self.lo.real, self.hi.imag - self.lo.imag)

    @property
    def center(self) -> complex:
        return (self.lo + self.hi) / 2

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.lo.real - pad <= z.real <= self.hi.real + pad
            and self.lo.imag - pad <= z.imag <= self.hi.imag + pad
        )


def _split(ratio: _Ratio, box: _Box) -> list[_Box] | None:
    for fr in _SPLITS:
        mx = box.lo.real + fr * (box.hi.real - box.lo.real)
        my = box.lo.imag + (1 - fr) * (box.hi.imag - box.lo.imag)
        kids = [
            (complex(box.lo.real, box.lo.imag), complex(mx, my)),
            (complex(mx, box.lo.imag), complex(box.hi.real, my)),
            (complex(box.lo.real, my), complex(mx, box.hi.imag)),
            (complex(mx, my), complex(box.hi.real, box.hi.imag)),
        ]
        counts = [_try_winding(_winding_box, ratio, lo, hi) for lo, hi in kids]
        if any(c is None or c < 0 for c in counts) or sum(counts) != box.count:
            continue
        return [_Box(lo, hi, c) for (lo, hi), c in zip(kids, counts) if c > 0]
    return None


def _certify(ratio: _Ratio, p: complex, k: int, rho0: float, rho_max: float) -> float | None:
    """Radius of a circle about ``p`` with winding ``k``, or None.

    Radii grow from ``rho0``; the first one whose winding integral converges
    decides, so a simple zero inside a larger cluster box is never mistaken
    for a ``k``-fold one.  Radii too small for float evaluation are skipped.
    """
    rho = rho0
    while rho <= rho_max * (1 + 1e-12):
        w = _try_winding(_winding_circle, ratio, p, rho)
        if w is not None:
            return rho if w == k else None
        rho *= 4
    return None


def locate_zeros_disk(f: ExpPoly, r: float, tol: float = 1e-12, strict: bool = False) -> ZeroSet:
    """Certified zeros of ``f`` in ``|z| <= r`` with multiplicities.

    Boxes at the subdivision floor that still hold several zeros are returned
    as one flagged entry carrying the box's winding count; with ``strict``
    they raise :class:`ClusterUnresolved` instead.
    """
    total, r_eff = count_with_radius(f, r)
    if total == 0:
        return ZeroSet(r_eff, (), 0, r)
    ff = f.to_float()
    fp = ff.derivative()
    ratio = _Ratio(ff)
    floor = 1e-7 * max(1.0, r_eff)
    # a multiplicity-k claim (k >= 2) must hold on a circle this small
    cluster = 1e-5 * max(1.0, r_eff)

    root = None
    for grow in (1.05, 1.0731, 1.1113, 1.1592):
        h = r_eff * grow
        c = _try_winding(_winding_box, ratio, complex(-h, -h), complex(h, h))
        if c is not None:
            root = _Box(complex(-h, -h), complex(h, h), c)
            break
    if root is None:
        raise NonConvergent("could not count zeros in the bounding square")

    found: list[Zero] = []
    stack = [root]
    while stack:
        box = stack.pop()
        k = box.count
        if k <= MULTIPLICITY_CAP:
            p = newton(ff, fp, box.center, mult=k, tol=tol)
            if p is not None and box.contains(p, pad=1e-12 * max(1.0, r_eff)):
                rho = _certify(ratio, p, k, box.side / 2 if k == 1 else min(box.side / 2, cluster), box.side / 2)
                if rho is not None:
                    found.append(Zero(p, k, rho))
                    continue
        kids = None if box.side < floor else _split(ratio, box)
        if kids is None and (box.side < floor or k > 1):
            # winding integrals near a tight cluster drown in rounding noise
            found.append(Zero(box.center, k, box.side * math.sqrt(2) / 2, flagged=True))
            continue
        if kids is None:
            raise NonConvergent(f"could not subdivide box {box.lo}..{box.hi}")
        stack.extend(kids)

    inside = [z for z in found if abs(z.location) <= r_eff]
    if sum(z.multiplicity for z in inside) != total:
        raise NonConvergent(
            f"located multiplicity {sum(z.multiplicity for z in inside)} != winding count {total}"
        )
    inside = _disjoint(ratio, inside, r_eff)
    inside = _snap_origin(f, inside)
    inside.sort(key=lambda z: (round(abs(z.location), 9), cmath.phase(z.location) % TWO_PI))
    if strict and any(z.flagged for z in inside):
        bad = next(z for z in inside if z.flagged)
        raise ClusterUnresolved(f"unresolved cluster of {bad.multiplicity} zeros near {bad.location}")
    return ZeroSet(r_eff, tuple(inside), total, r)


def _snap_origin(f: ExpPoly, zs: list[Zero]) -> list[Zero]:
    """Pin a zero to 0 when its disk holds 0 and its multiplicity is the exact order there."""
    if f.domain != "exact" or f.value_at_zero() != 0:
        return zs
    m0, _ = f.leading_taylor_at_zero()
    out = []
    for z in zs:
        if z.location != 0 and abs(z.location) < z.cert_radius and z.multiplicity == m0:
            z = Zero(0j, z.multiplicity, z.cert_radius - abs(z.location), z.flagged)
        out.append(z)
    return out


def local_multiplicity(f: ExpPoly, center: complex, rho: float) -> int:
    """Number of zeros of ``f`` in ``|z - center| < rho`` by the argument principle."""
    w = _try_winding(_winding_circle, _Ratio(f), complex(center), rho)
    if w is None:
        raise ZeroOnContour(f"winding about {center} with radius {rho} is not an integer")
    return w


def _disjoint(ratio: _Ratio, zs: list[Zero], r_eff: float) -> list[Zero]:
    out = []
    for i, z in enumerate(zs):
        rho = z.cert_radius
        others = [abs(z.location - w.location) for j, w in enumerate(zs) if j != i]
        if others:
            rho = min(rho, 0.45 * min(others))
        rho = min(rho, max(r_eff - abs(z.location), 0.0))
        flagged = z.flagged
        if rho < z.cert_radius:
            if rho <= 0 or _try_winding(_winding_circle, ratio, z.location, rho) != z.multiplicity:
                flagged = True
                rho = max(rho, 1e-15)
        out.append(Zero(z.location, z.multiplicity, rho, flagged))
    return out


def _zero_set_of(f: ExpPoly, a, r: float, zeros: ZeroSet | None) -> tuple[ExpPoly, ZeroSet]:
    g = f - ExpPoly.constant(as_scalar(a, f.domain), f.domain) if a != 0 else f
    if g.is_zero():
        raise ValueError("f - a vanishes identically")
    if zeros is None:
        zeros = locate_zeros_disk(g, r)
    return g, zeros


def _counting_sum(zeros: ZeroSet, r: float, cap: int | None) -> float:
    origin_tol = 1e-9 * max(1.0, r)
    total = 0.0
    for z in zeros.zeros:
        m = z.multiplicity if cap is None else min(z.multiplicity, cap)
        d = abs(z.location)
        if d <= origin_tol:
            total += m * math.log(r)
        elif d <= r:
            total += m * math.log(r / d)
    return total


def counting_N(f: ExpPoly, a, r: float, zeros: ZeroSet | None = None) -> float:
    """Integrated counting function ``N_f(a, r)`` of an entire ``f``.

    A precomputed zero set of ``f - a`` on a disk of radius ``>= r`` may be
    passed to avoid relocating.
    """
    _, zs = _zero_set_of(f, a, r, zeros)
    return _counting_sum(zs, r, None)


def counting_N_truncated(f: ExpPoly, a, r: float, Q: int, zeros: ZeroSet | None = None) -> float:
    """``N^{(Q)}_f(a, r)``: each multiplicity replaced by ``min(m, Q)``."""
    if Q < 1:
        raise ValueError("truncation level Q must be >= 1")
    _, zs = _zero_set_of(f, a, r, zeros)
    return _counting_sum(zs, r, Q)


__all__ = [
    "ClusterUnresolved",
    "Zero",
    "ZeroSet",
    "count_with_radius",
    "count_zeros_disk",
    "counting_N",
    "counting_N_truncated",
    "local_multiplicity",
    "locate_zeros_disk",
    "newton",
    "term_scale",
]
