"""Adaptive Gauss-Legendre quadrature on intervals and on the circle.

Integrands are vectorized callables.  Circle averages of piecewise-smooth
integrands (``log+``, pointwise maxima) are split at the points where a
caller-supplied branch label changes, so each panel sees an analytic
integrand and Gauss-Legendre converges geometrically.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Sequence

import numpy as np

from .errors import NonConvergent

TWO_PI = 2.0 * math.pi
GL_ORDER = 16
NODE_CAP = 2 ** 14

_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _gl_cache:
        _gl_cache[n] = np.polynomial.legendre.leggauss(n)
    return _gl_cache[n]


def _panel_values(func, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    x, w = gauss_legendre(n)
    half = (b - a)[:, None] / 2
    mid = (b + a)[:, None] / 2
    nodes = mid + half * x[None, :]
    vals = np.asarray(func(nodes.ravel())).reshape(nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise NonConvergent("integrand is not finite at a quadrature node")
    return (vals * w[None, :]).sum(axis=1) * half[:, 0]


def adaptive_integrate(
    func: Callable[[np.ndarray], np.ndarray],
    breaks: Sequence[float],
    tol: float,
    node_cap: int = NODE_CAP,
    order: int = GL_ORDER,
) -> tuple[complex | float, int]:
    """Integrate over ``[breaks[0], breaks[-1]]`` with panels split at ``breaks``.

    A panel is accepted when its value agrees with the sum of its two halves
    within ``tol`` scaled by the panel's share of the whole interval.
    Returns ``(integral, nodes_used)``.
    """
    br = np.asarray(sorted(breaks), dtype=float)
    a, b = br[:-1], br[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    total_len = br[-1] - br[0]
    vals = _panel_values(func, a, b, order)
    used = len(a) * order
    total = 0.0
    depth = 0
    while len(a):
        m = (a + b) / 2
        left = _panel_values(func, a, m, order)
        right = _panel_values(func, m, b, order)
        used += 2 * len(a) * order
        err = np.abs(vals - (left + right))
        allowed = tol * (b - a) / total_len
        ok = err <= allowed
        total = total + np.sum((left + right)[ok])
        bad = ~ok
        if not np.any(bad):
            break
        if used > node_cap or depth > 60:
            raise NonConvergent(f"adaptive quadrature exceeded {node_cap} nodes")
        a = np.concatenate([a[bad], m[bad]])
        b = np.concatenate([m[bad], b[bad]])
        vals = np.concatenate([left[bad], right[bad]])
        depth += 1
    return total, used


def label_breakpoints(
    labels: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    grid: int = 1024,
    iters: int = 48,
) -> list[float]:
    """Locate points in ``[lo, hi]`` where the integer label function changes."""
    t = np.linspace(lo, hi, grid + 1)
    lab = np.asarray(labels(t))
    idx = np.nonzero(lab[:-1] != lab[1:])[0]
    if len(idx) == 0:
        return []
    a = t[idx].copy()
    b = t[idx + 1].copy()
    la = lab[idx]
    for _ in range(iters):
        m = (a + b) / 2
        lm = np.asarray(labels(m))
        same = lm == la
        a = np.where(same, m, a)
        b = np.where(same, b, m)
    return list((a + b) / 2)


_phase_seed = 0


def set_phase_seed(seed: int) -> None:
    """Fix the phase offsets used when a circle average has to be retried."""
    global _phase_seed
    _phase_seed = int(seed)


def retry_phases(count: int = 3) -> list[float]:
    rng = random.Random(_phase_seed)
    return [0.0] + [rng.uniform(0.05, 0.35) * TWO_PI / 16 for _ in range(count - 1)]


def circle_mean(
    func: Callable[[np.ndarray], np.ndarray],
    labels: Callable[[np.ndarray], np.ndarray] | None = None,
    tol: float = 1e-11,
    node_cap: int = NODE_CAP,
    phase: float = 0.0,
    base_panels: int = 16,
) -> tuple[float, int]:
    """``(1/2pi) * integral_0^{2pi} func(theta) dtheta`` and the node count.

    ``tol`` is an absolute tolerance on the average, scaled by ``max(1, |avg|)``
    using a coarse first estimate.
    """
    lo, hi = phase, phase + TWO_PI
    breaks = list(np.linspace(lo, hi, base_panels + 1))
    if labels is not None:
        breaks += label_breakpoints(labels, lo, hi)
    coarse = np.asarray(func(np.linspace(lo, hi, 257)[:-1]))
    finite = coarse[np.isfinite(coarse)]
    scale = max(1.0, float(np.mean(np.abs(finite))) if finite.size else 1.0)
    integral, used = adaptive_integrate(func, breaks, tol * scale * TWO_PI, node_cap)
    return float(np.real(integral)) / TWO_PI, used + 257


def circle_average(func, labels=None, tol: float = 1e-11, node_cap: int = NODE_CAP,
                   phase: float = 0.0, base_panels: int = 16) -> float:
    return circle_mean(func, labels, tol, node_cap, phase, base_panels)[0]


def robust_circle_mean(func, labels=None, tol: float = 1e-11, node_cap: int = NODE_CAP) -> tuple[float, int]:
    """``circle_mean`` retried at shifted phases when a node lands on a singularity."""
    last: NonConvergent | None = None
    for ph in retry_phases():
        try:
            return circle_mean(func, labels, tol, node_cap, phase=ph)
        except NonConvergent as exc:
            last = exc
    raise NonConvergent(f"circle average failed at every phase: {last}")
