"""Distribution-function distances (Kolmogorov-Smirnov, L2) and monotone
pushforwards used to probe their invariance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .densities import ContinuousDistribution, DiscreteDensity
from .errors import NonMonotoneOnSupport
from .quadrature import integrate

GRID_POINTS = 10_000
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MonotoneMap:
    """Strictly increasing map with its inverse.

    ``derivative`` of the forward map is optional; a central difference is
    used when it is missing.
    """

    forward: Callable
    inverse: Callable
    derivative: Callable | None = None
    name: str = "map"

    def slope(self, x):
        if self.derivative is not None:
            return np.asarray(self.derivative(x), dtype=float)
        x = np.asarray(x, dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(x))
        return (self.forward(x + step) - self.forward(x - step)) / (2.0 * step)


def affine_map(slope: float, shift: float = 0.0) -> MonotoneMap:
    if slope <= 0:
        raise NonMonotoneOnSupport("affine map needs a positive slope")
    return MonotoneMap(
        lambda x: slope * np.asarray(x, dtype=float) + shift,
        lambda y: (np.asarray(y, dtype=float) - shift) / slope,
        lambda x: np.full(np.shape(x), float(slope)),
        f"affine({slope:g}, {shift:g})",
    )


def exp_map() -> MonotoneMap:
    return MonotoneMap(np.exp, lambda y: np.log(np.asarray(y, dtype=float)), np.exp, "exp")


def cubic_map() -> MonotoneMap:
    """x -> x^3 + x, inverted with Cardano's formula plus one Newton step."""

    def inverse(y):
        y = np.asarray(y, dtype=float)
        disc = np.sqrt(y * y / 4.0 + 1.0 / 27.0)
        x = np.cbrt(y / 2.0 + disc) + np.cbrt(y / 2.0 - disc)
        return x - (x**3 + x - y) / (3.0 * x * x + 1.0)

    return MonotoneMap(
        lambda x: np.asarray(x, dtype=float) ** 3 + np.asarray(x, dtype=float),
        inverse,
        lambda x: 3.0 * np.asarray(x, dtype=float) ** 2 + 1.0,
        "cubic",
    )


def transform(dist, fmap: MonotoneMap):
    """Distribution of fmap(X) for X ~ dist."""
    if isinstance(dist, DiscreteDensity):
        with np.errstate(over="ignore"):
            mapped = np.asarray(fmap.forward(dist.support), dtype=float)
        if mapped.size > 1 and not np.all(np.diff(mapped) > 0):
            raise NonMonotoneOnSupport(f"{fmap.name} is not strictly increasing on the support")
        if not np.all(np.isfinite(mapped)):
            raise NonMonotoneOnSupport(f"{fmap.name} overflows on the support")
        return DiscreteDensity(mapped, dist.masses)

    base = dist

    def cdf(y):
        return base.cdf(fmap.inverse(y))

    def pdf(y):
        x = fmap.inverse(y)
        return base.pdf(x) / fmap.slope(x)

    with np.errstate(over="ignore"):
        lo = float(fmap.forward(base.lower)) if math.isfinite(base.lower) else _limit(fmap, -1)
        hi = float(fmap.forward(base.upper)) if math.isfinite(base.upper) else _limit(fmap, 1)
    if not lo < hi:
        raise NonMonotoneOnSupport(f"{fmap.name} does not increase over the support")
    return ContinuousDistribution(pdf, cdf, lo, hi, f"{fmap.name}({base.name})")


def _limit(fmap: MonotoneMap, sign: int) -> float:
    with np.errstate(over="ignore"):
        v = float(fmap.forward(sign * 1e300))
    if math.isinf(v):
        return v
    return v if abs(v) > 1e-300 else 0.0


def _discrete_discrete(F: DiscreteDensity, G: DiscreteDensity) -> float:
    pts = np.union1d(F.support, G.support)
    right = np.abs(F.cdf(pts) - G.cdf(pts))
    left = np.abs(F.cdf_left(pts) - G.cdf_left(pts))
    return float(max(right.max(), left.max()))


def _discrete_continuous(F: DiscreteDensity, G: ContinuousDistribution) -> float:
    pts = F.support
    g = np.asarray(G.cdf(pts), dtype=float)
    right = np.abs(F.cdf(pts) - g)
    left = np.abs(F.cdf_left(pts) - g)
    return float(max(right.max(), left.max()))


def _continuous_continuous(F: ContinuousDistribution, G: ContinuousDistribution) -> float:
    f_lo, f_hi = F.effective_bounds()
    g_lo, g_hi = G.effective_bounds()
    lo, hi = min(f_lo, g_lo), max(f_hi, g_hi)
    grid = np.linspace(lo, hi, GRID_POINTS)

    def gap(x):
        return np.abs(np.asarray(F.cdf(x), dtype=float) - np.asarray(G.cdf(x), dtype=float))

    vals = gap(grid)
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    # golden-section search for the maximiser inside the bracketing cells
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = float(gap(c)), float(gap(d))
    for _ in range(80):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = float(gap(c))
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = float(gap(d))
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    return max(best, fc, fd)


def ks_distance(F, G) -> float:
    """sup_x |F(x) - G(x)|.

    Exact whenever either side is discrete: both one-sided limits are
    examined at every atom. Two continuous laws use a 10^4-point grid and
    golden-section refinement around the largest gap.
    """
    f_disc = isinstance(F, DiscreteDensity)
    g_disc = isinstance(G, DiscreteDensity)
    if f_disc and g_disc:
        return _discrete_discrete(F, G)
    if f_disc:
        return _discrete_continuous(F, G)
    if g_disc:
        return _discrete_continuous(G, F)
    return _continuous_continuous(F, G)


def ks_testing_gap(F, G, x0: float) -> float:
    """Power minus size, |G(x0) - F(x0)|, of the test that rejects when X <= x0."""
    return abs(float(G.cdf(x0)) - float(F.cdf(x0)))


def l2_density_distance(f: ContinuousDistribution, g: ContinuousDistribution, tol: float = 1e-8) -> float:
    """Squared L2 distance int (f - g)^2 dx between two densities."""
    f_lo, f_hi = f.effective_bounds(1e-14)
    g_lo, g_hi = g.effective_bounds(1e-14)
    lo, hi = min(f_lo, g_lo), max(f_hi, g_hi)
    brk = [b for b in (f.lower, f.upper, g.lower, g.upper) if math.isfinite(b)]

    def integrand(x):
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            d = np.nan_to_num(f.pdf(x), nan=0.0) - np.nan_to_num(g.pdf(x), nan=0.0)
        return d * d

    return integrate(integrand, lo, hi, tol=tol, breakpoints=brk, max_width=(hi - lo) / 64)
