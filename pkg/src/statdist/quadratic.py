"""Quadratic-form distances and kernel-smoothed distances.

Smoothed densities f*(y) = int k_h(y - x) dF(x) are evaluated in log space
so that ratios such as f*/g* stay finite far out in the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .densities import ContinuousDistribution, DiscreteDensity, align
from .divergences import _check_blend
from .errors import AsymmetricKernel, InputError, ZeroMassCell
from .quadrature import integrate

QUAD_TOL = 1e-8
GAUSS_REACH = 8.0
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadraticKernel:
    """Kernel K(s, t) on the real line.

    ``symmetric=True`` promises K(s, t) = K(t, s) and halves the number of
    evaluations; otherwise symmetry is checked when the kernel is used.
    """

    evaluator: Callable[[float, float], float]
    symmetric: bool = False
    provenance: str = "user"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, s: float, t: float) -> float:
        key = (float(s), float(t))
        if self.symmetric and key[0] > key[1]:
            key = (key[1], key[0])
        if key not in self._cache:
            self._cache[key] = float(self.evaluator(*key))
        return self._cache[key]

    def matrix(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        n = points.size
        out = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                if self.symmetric and j < i:
                    out[i, j] = out[j, i]
                else:
                    out[i, j] = self(points[i], points[j])
        return out


@dataclass(frozen=True)
class SmoothingKernel:
    """Density k_h of the additive error, either gaussian or uniform on [-h, h]."""

    shape: str = "gaussian"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.shape not in ("gaussian", "uniform"):
            raise InputError(f"unknown kernel shape {self.shape!r}")
        if not self.bandwidth > 0:
            raise InputError("bandwidth must be positive")

    @property
    def reach(self) -> float:
        """Half-width of the truncation window."""
        return GAUSS_REACH * self.bandwidth if self.shape == "gaussian" else self.bandwidth

    def logpdf(self, eps):
        eps = np.asarray(eps, dtype=float)
        h = self.bandwidth
        if self.shape == "gaussian":
            z = eps / h
            return -0.5 * z * z - _LOG_SQRT_2PI - math.log(h)
        with np.errstate(divide="ignore"):
            return np.where(np.abs(eps) <= h, -math.log(2.0 * h), -np.inf)

    def pdf(self, eps):
        return np.exp(self.logpdf(eps))

    def breakpoints(self, atoms) -> list:
        if self.shape == "uniform":
            atoms = np.asarray(atoms, dtype=float)
            return sorted(set((atoms - self.bandwidth).tolist() + (atoms + self.bandwidth).tolist()))
        return list(np.asarray(atoms, dtype=float))

    def window_mass(self) -> float:
        return integrate(self.pdf, -self.reach, self.reach, tol=1e-12, breakpoints=[0.0])


def _log_smoothed(dist, k: SmoothingKernel, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if isinstance(dist, DiscreteDensity):
        keep = dist.masses > 0
        with np.errstate(divide="ignore"):
            logw = np.log(dist.masses[keep])
        terms = logw[None, :] + k.logpdf(y[..., None] - dist.support[keep][None, :])
        return logsumexp(terms, axis=-1).reshape(y.shape)
    with np.errstate(divide="ignore"):
        return np.log(_smooth_continuous(dist, k, y))


def _smooth_continuous(dist: ContinuousDistribution, k: SmoothingKernel, y: np.ndarray) -> np.ndarray:
    flat = np.atleast_1d(y).ravel()
    out = np.empty(flat.size)
    brk = [b for b in (dist.lower, dist.upper) if math.isfinite(b)]
    for i, yi in enumerate(flat):
        lo = max(yi - k.reach, dist.lower)
        hi = min(yi + k.reach, dist.upper)
        if hi <= lo:
            out[i] = 0.0
            continue
        out[i] = integrate(
            lambda x, yi=yi: k.pdf(yi - x) * dist.pdf(x),
            lo,
            hi,
            tol=1e-11,
            breakpoints=brk + ([yi] if k.shape == "gaussian" else [yi - k.bandwidth, yi + k.bandwidth]),
            max_width=k.bandwidth,
        )
    return np.maximum(out, 0.0).reshape(np.shape(y))


def smooth_density(F, k: SmoothingKernel, at):
    """Density of X + eps at ``at`` when X ~ F and eps ~ k_h.

    Discrete F uses the finite sum; continuous F is integrated over the
    kernel's truncation window.
    """
    out = np.exp(_log_smoothed(F, k, np.asarray(at, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def _atoms_and_bounds(dist):
    if isinstance(dist, DiscreteDensity):
        atoms = dist.support[dist.masses > 0]
        return atoms, atoms.min(), atoms.max()
    lo, hi = dist.effective_bounds()
    return np.array([lo, hi]), lo, hi


def _window(k: SmoothingKernel, *dists, extend: bool = False) -> tuple[float, float, list]:
    atoms = []
    lo, hi = math.inf, -math.inf
    for d in dists:
        a, l, h = _atoms_and_bounds(d)
        atoms.append(a)
        lo, hi = min(lo, l), max(hi, h)
    ext = (hi - lo) if extend and k.shape == "gaussian" else 0.0
    brk = k.breakpoints(np.concatenate(atoms))
    return lo - k.reach - ext, hi + k.reach + ext, brk


def _contained(F, G) -> bool:
    """Whether every atom charged by F is also charged by G."""
    if not (isinstance(F, DiscreteDensity) and isinstance(G, DiscreteDensity)):
        return True
    fa = F.support[F.masses > 0]
    ga = G.support[G.masses > 0]
    return bool(np.all(np.isin(fa, ga)))


def _uniform_uncovered(F, G, k: SmoothingKernel) -> bool:
    """For the uniform kernel: does f* have mass where g* vanishes?"""
    if k.shape != "uniform" or not (isinstance(F, DiscreteDensity) and isinstance(G, DiscreteDensity)):
        return False
    h = k.bandwidth
    g_int = sorted((x - h, x + h) for x in G.support[G.masses > 0])
    merged = [list(g_int[0])]
    for a, b in g_int[1:]:
        if a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    for x in F.support[F.masses > 0]:
        if not any(a <= x - h and x + h <= b for a, b in merged):
            return True
    return False


def smoothed_pearson(F, G, k: SmoothingKernel, tol: float = QUAD_TOL) -> float:
    """Kernel-smoothed Pearson chi-squared int (f* - g*)^2 / g* dy."""
    if _uniform_uncovered(F, G, k):
        return math.inf
    lo, hi, brk = _window(k, F, G, extend=not _contained(F, G))

    def integrand(y):
        lf = _log_smoothed(F, k, y)
        lg = _log_smoothed(G, k, y)
        out = np.zeros_like(y)
        pos = np.isfinite(lg)
        with np.errstate(over="ignore"):
            r = np.expm1(lf[pos] - lg[pos])
        out[pos] = np.exp(lg[pos]) * r * r
        out[~pos & np.isfinite(lf)] = np.inf
        return out

    return max(0.0, integrate(integrand, lo, hi, tol=tol, breakpoints=brk, max_width=k.bandwidth / 2))


def smoothed_pearson_kernel(G, k: SmoothingKernel, tol: float = QUAD_TOL) -> QuadraticKernel:
    """K(s, t) = int k_h(y - s) k_h(y - t) / g*(y) dy, the quadratic-form kernel
    whose double sum against F - G reproduces ``smoothed_pearson``."""

    def evaluate(s: float, t: float) -> float:
        uniq = np.unique([s, t])
        pts = DiscreteDensity(uniq, np.full(uniq.size, 1.0 / uniq.size))
        lo, hi, brk = _window(k, pts, G, extend=not _contained(pts, G))

        def integrand(y):
            lg = _log_smoothed(G, k, y)
            num = k.logpdf(y - s) + k.logpdf(y - t)
            out = np.zeros_like(y)
            live = np.isfinite(num)
            out[live & ~np.isfinite(lg)] = np.inf
            ok = live & np.isfinite(lg)
            out[ok] = np.exp(num[ok] - lg[ok])
            return out

        return integrate(integrand, lo, hi, tol=tol, breakpoints=brk, max_width=k.bandwidth / 2)

    return QuadraticKernel(evaluate, True, "smoothed_pearson")


def pearson_kernel(m: DiscreteDensity) -> QuadraticKernel:
    """Diagonal kernel 1[s = t] / sqrt(m(s) m(t))."""
    if np.any(m.masses <= 0):
        t = m.support[np.argmax(m.masses <= 0)]
        raise ZeroMassCell(f"m has zero mass at t={t:g}")
    lookup = dict(zip(m.support.tolist(), m.masses.tolist()))

    def evaluate(s: float, t: float) -> float:
        if s != t:
            return 0.0
        ms = lookup.get(s, 0.0)
        return 1.0 / ms if ms > 0 else math.inf

    return QuadraticKernel(evaluate, True, "pearson_diagonal")


def locally_quadratic_distance(tau: DiscreteDensity, m: DiscreteDensity, K: QuadraticKernel) -> float:
    """sum_{x,y} K(x, y) (tau - m)(x) (tau - m)(y).

    Only points where tau and m differ are evaluated, which matters for
    kernels that cost a quadrature per entry.
    """
    support, t, q = align(tau, m)
    diff = t - q
    live = diff != 0
    if not np.any(live):
        return 0.0
    pts = support[live]
    d = diff[live]
    mat = K.matrix(pts)
    if not K.symmetric:
        scale = np.max(np.abs(mat[np.isfinite(mat)]), initial=1.0)
        asym = np.abs(mat - mat.T)
        if np.any(asym[np.isfinite(asym)] > 1e-12 * scale):
            raise AsymmetricKernel("kernel matrix is not symmetric on the support")
    if np.any(np.isinf(mat)):
        return math.inf
    return math.fsum((np.outer(d, d) * mat).ravel())


def smoothed_bwhd(F, G, k: SmoothingKernel, alpha: float, tol: float = QUAD_TOL) -> float:
    """int (f* - g*)^2 / (alpha sqrt(f*) + (1 - alpha) sqrt(g*))^2 dy.

    At alpha = 1/2 this is 4 int (sqrt(f*) - sqrt(g*))^2, i.e. eight times
    ``smoothed_squared_hellinger``.
    """
    _check_blend(alpha, closed=False)
    lo, hi, brk = _window(k, F, G)

    def integrand(y):
        f = np.exp(_log_smoothed(F, k, y))
        g = np.exp(_log_smoothed(G, k, y))
        den = (alpha * np.sqrt(f) + (1.0 - alpha) * np.sqrt(g)) ** 2
        out = np.zeros_like(y)
        pos = den > 0
        out[pos] = (f[pos] - g[pos]) ** 2 / den[pos]
        return out

    return max(0.0, integrate(integrand, lo, hi, tol=tol, breakpoints=brk, max_width=k.bandwidth / 2))


def smoothed_squared_hellinger(F, G, k: SmoothingKernel, tol: float = QUAD_TOL) -> float:
    """1/2 int (sqrt(f*) - sqrt(g*))^2 dy."""
    lo, hi, brk = _window(k, F, G)

    def integrand(y):
        f = np.exp(_log_smoothed(F, k, y))
        g = np.exp(_log_smoothed(G, k, y))
        return (np.sqrt(f) - np.sqrt(g)) ** 2

    return 0.5 * integrate(integrand, lo, hi, tol=tol, breakpoints=brk, max_width=k.bandwidth / 2)


def check_nonnegative_definite(K: QuadraticKernel, points, rng, trials: int = 100) -> float:
    """Smallest a' K a over random weight vectors a; should be >= -1e-9."""
    mat = K.matrix(points)
    worst = math.inf
    for _ in range(trials):
        a = rng.standard_normal(mat.shape[0])
        worst = min(worst, float(a @ mat @ a))
    return worst

