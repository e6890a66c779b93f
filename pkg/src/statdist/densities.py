"""Probability objects shared by every other module.

A ``DiscreteDensity`` lives on a finite, strictly increasing support.
Countably infinite sample spaces must be truncated by the caller before
construction (see ``poisson_family`` for one tail-absorbing truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DuplicateSupportPoint,
    EmptyGrid,
    EpsilonOutOfRange,
    GeneratorDomainError,
    InputError,
    LengthMismatch,
    MassSumOutOfTolerance,
    NegativeMass,
    PointNotInSupport,
    UnsortedGrid,
    ValueOutsideSupport,
)

MASS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteDensity:
    """Masses on a finite, strictly increasing support.

    Build instances through :func:`make_density`, which validates; the
    constructor itself only freezes the arrays.
    """

    support: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        support = np.array(self.support, dtype=float)
        masses = np.array(self.masses, dtype=float)
        support.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "masses", masses)

    def __len__(self) -> int:
        return self.support.size

    def __repr__(self) -> str:
        pairs = ", ".join(f"{t:g}: {p:.6g}" for t, p in zip(self.support, self.masses))
        return f"DiscreteDensity({{{pairs}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDensity):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(
            self.masses, other.masses
        )

    __hash__ = None

    def mass_at(self, t: float) -> float:
        idx = np.searchsorted(self.support, t)
        if idx < self.support.size and self.support[idx] == t:
            return float(self.masses[idx])
        return 0.0

    def cdf(self, x):
        """Right-continuous distribution function, F(x) = P(X <= x)."""
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        idx = np.searchsorted(self.support, np.asarray(x, dtype=float), side="right")
        return np.minimum(cum[idx], 1.0)

    def cdf_left(self, x):
        """Left limit F(x-) = P(X < x)."""
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        idx = np.searchsorted(self.support, np.asarray(x, dtype=float), side="left")
        return np.minimum(cum[idx], 1.0)

    def mean(self) -> float:
        return float(np.dot(self.support, self.masses))

    def on_support(self, support: Sequence[float]) -> np.ndarray:
        """Masses re-expressed on a superset support, zero-filled."""
        support = np.asarray(support, dtype=float)
        out = np.zeros(support.size)
        idx = np.searchsorted(support, self.support)
        hit = support[np.minimum(idx, support.size - 1)]
        if np.any(idx >= support.size) or not np.array_equal(hit, self.support):
            raise ValueOutsideSupport("target support does not contain every point of this density")
        out[idx] = self.masses
        return out


@dataclass(frozen=True)
class Sample:
    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise LengthMismatch("a sample needs at least one observation")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ContinuousDistribution:
    """A univariate continuous law given by its pdf and cdf.

    ``lower`` and ``upper`` bound the support and may be infinite.
    """

    pdf: Callable
    cdf: Callable
    lower: float = -math.inf
    upper: float = math.inf
    name: str = "continuous"

    @classmethod
    def from_scipy(cls, frozen, name: str | None = None) -> "ContinuousDistribution":
        lo, hi = frozen.support()
        return cls(frozen.pdf, frozen.cdf, float(lo), float(hi), name or frozen.dist.name)

    def effective_bounds(self, tail: float = 1e-12) -> tuple[float, float]:
        """Finite interval carrying all but ``tail`` mass on each side."""
        lo, hi = self.lower, self.upper
        if not math.isfinite(lo):
            step = 1.0
            lo = -step
            while float(self.cdf(lo)) > tail:
                step *= 2.0
                lo = -step
                if step > 1e12:
                    raise ValueError("cannot locate the lower tail")
        if not math.isfinite(hi):
            step = 1.0
            hi = step
            while 1.0 - float(self.cdf(hi)) > tail:
                step *= 2.0
                hi = step
                if step > 1e12:
                    raise ValueError("cannot locate the upper tail")
        return lo, hi


def uniform(low: float = 0.0, high: float = 1.0) -> ContinuousDistribution:
    width = high - low

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= low) & (x <= high), 1.0 / width, 0.0)

    def cdf(x):
        return np.clip((np.asarray(x, dtype=float) - low) / width, 0.0, 1.0)

    return ContinuousDistribution(pdf, cdf, low, high, "uniform")


def normal(loc: float = 0.0, scale: float = 1.0) -> ContinuousDistribution:
    from scipy.special import ndtr

    norm = 1.0 / (scale * math.sqrt(2.0 * math.pi))

    def pdf(x):
        z = (np.asarray(x, dtype=float) - loc) / scale
        return norm * np.exp(-0.5 * z * z)

    def cdf(x):
        return ndtr((np.asarray(x, dtype=float) - loc) / scale)

    return ContinuousDistribution(pdf, cdf, -math.inf, math.inf, "normal")


def _check_support(support: np.ndarray) -> None:
    if support.ndim != 1:
        raise LengthMismatch("support must be one-dimensional")
    diffs = np.diff(support)
    if np.any(diffs == 0):
        dup = support[1:][diffs == 0][0]
        raise DuplicateSupportPoint(f"support point {dup:g} appears more than once")
    if np.any(diffs < 0):
        raise UnsortedGrid("support points must be strictly increasing")


def make_density(support, masses, renormalize: bool = False, tol: float = MASS_TOL) -> DiscreteDensity:
    """Validate and freeze a discrete density.

    >>> make_density([0, 1], [0.5, 0.5]).masses
    array([0.5, 0.5])
    """
    support = np.asarray(support, dtype=float).ravel()
    masses = np.asarray(masses, dtype=float).ravel()
    if support.size != masses.size:
        raise LengthMismatch(f"{support.size} support points but {masses.size} masses")
    if support.size == 0:
        raise EmptyGrid("a density needs at least one support point")
    if not np.all(np.isfinite(support)) or not np.all(np.isfinite(masses)):
        raise InputError("support and masses must be finite")
    _check_support(support)
    if np.any(masses < 0):
        i = int(np.argmax(masses < 0))
        raise NegativeMass(f"mass {masses[i]:g} at t={support[i]:g} is negative")
    total = math.fsum(masses)
    if renormalize:
        if total <= 0:
            raise MassSumOutOfTolerance("cannot renormalize masses summing to zero")
        masses = masses / total
    elif abs(total - 1.0) > tol:
        raise MassSumOutOfTolerance(f"masses sum to {total!r}, not 1 (tolerance {tol:g})")
    return DiscreteDensity(support, masses)


def point_mass(t: float) -> DiscreteDensity:
    return DiscreteDensity(np.array([float(t)]), np.array([1.0]))


def empirical_density(sample: Sample | Sequence[float], support=None) -> DiscreteDensity:
    """Relative frequencies n(t)/n on ``support`` (default: the observed values).

    Counts are divided exactly via ``Fraction`` before conversion, so the
    masses are the correctly rounded multiples of 1/n.
    """
    if not isinstance(sample, Sample):
        sample = Sample(tuple(sample))
    values = np.asarray(sample.values)
    if support is None:
        support = np.unique(values)
    support = np.asarray(support, dtype=float)
    _check_support(support)
    idx = np.searchsorted(support, values)
    bad = (idx >= support.size) | (support[np.minimum(idx, support.size - 1)] != values)
    if np.any(bad):
        raise ValueOutsideSupport(f"observed value {values[bad][0]:g} is not in the support")
    counts = np.bincount(idx, minlength=support.size)
    n = sample.n
    masses = np.array([float(Fraction(int(c), n)) for c in counts])
    return DiscreteDensity(support, masses)


def align(first: DiscreteDensity, *others: DiscreteDensity) -> tuple[np.ndarray, ...]:
    """Put densities on the union of their supports.

    Returns ``(support, masses_1, masses_2, ...)`` with zero-filled masses.
    """
    dens = (first,) + others
    if all(np.array_equal(d.support, first.support) for d in others):
        return (first.support,) + tuple(d.masses for d in dens)
    support = first.support
    for d in others:
        support = np.union1d(support, d.support)
    return (support,) + tuple(d.on_support(support) for d in dens)


def contaminate(base: DiscreteDensity, point: float, epsilon: float) -> DiscreteDensity:
    """Gross-error mixture (1 - epsilon) * base + epsilon * delta_point."""
    if not 0.0 <= epsilon <= 1.0:
        raise EpsilonOutOfRange(f"epsilon={epsilon!r} is outside [0, 1]")
    idx = np.searchsorted(base.support, point)
    if idx >= base.support.size or base.support[idx] != point:
        raise PointNotInSupport(f"contamination point {point!r} is not in the support")
    masses = (1.0 - epsilon) * base.masses
    masses[idx] += epsilon
    return DiscreteDensity(base.support, masses)


def discretize(dist: ContinuousDistribution, grid) -> DiscreteDensity:
    """Cell-probability discretization onto ``grid``.

    Cell boundaries sit at midpoints between neighbouring grid points; the
    first and last cells absorb the infinite tails so the masses sum to one.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise EmptyGrid("grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise UnsortedGrid("grid must be strictly increasing")
    if grid.size == 1:
        return DiscreteDensity(grid, np.array([1.0]))
    cuts = np.asarray(dist.cdf(0.5 * (grid[:-1] + grid[1:])), dtype=float)
    cum = np.concatenate([[0.0], cuts, [1.0]])
    masses = np.clip(np.diff(cum), 0.0, None)
    return DiscreteDensity(grid, masses)


def midpoint_grid(low: float, high: float, n: int) -> np.ndarray:
    """Centres of ``n`` equal cells partitioning ``[low, high]``."""
    return low + (np.arange(n) + 0.5) * (high - low) / n


@dataclass(frozen=True)
class ParametricFamily:
    """The model class {m_theta : theta in Theta} on a fixed support.

    ``lower`` and ``upper`` bound Theta coordinate-wise.
    """

    support: np.ndarray
    generator: Callable[[np.ndarray], np.ndarray]
    lower: tuple
    upper: tuple
    name: str = "family"
    param_names: tuple = field(default=())

    @property
    def dim(self) -> int:
        return len(self.lower)

    def masses(self, theta) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if np.any(theta < np.asarray(self.lower)) or np.any(theta > np.asarray(self.upper)):
            raise GeneratorDomainError(f"theta={theta.tolist()} is outside the parameter box")
        try:
            m = np.asarray(self.generator(theta), dtype=float)
        except (ValueError, ArithmeticError) as exc:
            raise GeneratorDomainError(f"generator failed at theta={theta.tolist()}: {exc}") from exc
        if m.shape != np.shape(self.support) or not np.all(np.isfinite(m)) or np.any(m < 0):
            raise GeneratorDomainError(f"generator produced an invalid mass vector at theta={theta.tolist()}")
        if abs(math.fsum(m) - 1.0) > MASS_TOL:
            raise GeneratorDomainError(f"generator masses sum to {math.fsum(m)!r} at theta={theta.tolist()}")
        return m

    def __call__(self, theta) -> DiscreteDensity:
        return DiscreteDensity(self.support, self.masses(theta))


def binomial_family(trials: int, lower: float = 0.0, upper: float = 1.0) -> ParametricFamily:
    support = np.arange(trials + 1, dtype=float)
    coeffs = np.array([math.comb(trials, k) for k in range(trials + 1)], dtype=float)
    k = np.arange(trials + 1)

    def generate(theta):
        p = float(theta[0])
        return coeffs * p**k * (1.0 - p) ** (trials - k)

    return ParametricFamily(support, generate, (lower,), (upper,), f"binomial({trials})", ("p",))


def poisson_family(truncate: int, lower: float = 1e-6, upper: float = 50.0) -> ParametricFamily:
    """Poisson on {0..truncate}; the last cell absorbs the upper tail."""
    from scipy.stats import poisson

    support = np.arange(truncate + 1, dtype=float)

    def generate(theta):
        m = poisson.pmf(support, theta[0])
        m[-1] = poisson.sf(truncate - 1, theta[0])
        return m

    return ParametricFamily(support, generate, (lower,), (upper,), f"poisson({truncate})", ("rate",))


def two_point_family(lower: float, upper: float) -> ParametricFamily:
    """(p, 1 - p) on {0, 1}."""

    def generate(theta):
        p = float(theta[0])
        return np.array([p, 1.0 - p])

    return ParametricFamily(np.array([0.0, 1.0]), generate, (lower,), (upper,), "two-point", ("p",))
