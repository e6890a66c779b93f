"""Discrete distance catalogue: chi-squared family, power divergences,
Kullback-Leibler, Hellinger and blended weighted Hellinger.

Every distance accepts either two ``DiscreteDensity`` objects (aligned on
the union of their supports) or two already-aligned mass vectors, and
returns a float that may be ``inf``.

Zero-cell conventions: ``0 * log 0 = 0``, ``positive / 0 = inf`` and a cell
with zero mass under every density involved contributes nothing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .densities import DiscreteDensity, align
from .errors import AlphaOutOfRange, InfiniteDistance, InputError, ZeroDistance, ZeroVariance

BWHD_RECOMMENDED_MIN_ALPHA = 1.0 / 3.0


def _aligned(*dens):
    if all(isinstance(d, DiscreteDensity) for d in dens):
        return align(*dens)[1:]
    if any(isinstance(d, DiscreteDensity) for d in dens):
        raise InputError("mix of DiscreteDensity and raw mass vectors")
    arrays = tuple(np.asarray(d, dtype=float) for d in dens)
    if len({a.shape for a in arrays}) != 1:
        raise InputError("mass vectors must have equal length")
    return arrays


def _ratio_sum(num: np.ndarray, den: np.ndarray) -> float:
    """sum(num / den) with 0/0 -> 0 and positive/0 -> inf."""
    zero = den == 0
    if np.any(zero & (num > 0)):
        return math.inf
    keep = ~zero
    return math.fsum(num[keep] / den[keep])


def generalized_chisq(tau, m, a) -> float:
    """sum (tau - m)^2 / a for a probability mass function a."""
    t, q, w = _aligned(tau, m, a)
    return _ratio_sum((t - q) ** 2, w)


def pearson_chisq(tau, m) -> float:
    t, q = _aligned(tau, m)
    return _ratio_sum((t - q) ** 2, q)


def neyman_chisq(tau, m) -> float:
    t, q = _aligned(tau, m)
    return _ratio_sum((t - q) ** 2, t)


def _check_blend(alpha: float, closed: bool = True) -> None:
    ok = 0.0 <= alpha <= 1.0 if closed else 0.0 < alpha < 1.0
    if not ok:
        interval = "[0, 1]" if closed else "(0, 1)"
        raise AlphaOutOfRange(f"alpha={alpha!r} is outside {interval}")


def blended_chisq(tau, m, alpha: float) -> float:
    """Generalized chi-squared with denominator alpha*tau + (1 - alpha)*m.

    alpha = 0 is Pearson, alpha = 1 Neyman, alpha = 1/2 the symmetric
    chi-squared.
    """
    _check_blend(alpha)
    t, q = _aligned(tau, m)
    return _ratio_sum((t - q) ** 2, alpha * t + (1.0 - alpha) * q)


def symmetric_chisq(tau, m) -> float:
    """S^2 = sum 2 (tau - m)^2 / (tau + m); bounded by 4."""
    t, q = _aligned(tau, m)
    return 2.0 * _ratio_sum((t - q) ** 2, t + q)


def _power_terms(t: np.ndarray, q: np.ndarray, lam: float) -> np.ndarray:
    """Per-cell contributions m * phi(tau/m), each nonnegative.

    phi(u) = (u^(lam+1) - 1 - (lam+1)(u-1)) / (lam (lam+1)) differs from the
    displayed family only by a term that sums to zero, and keeps every cell
    nonnegative so round-off cannot push the total below 0.
    """
    k = lam + 1.0
    c = lam * k
    out = np.zeros_like(t)
    both = (t > 0) & (q > 0)
    u = t[both] / q[both]
    powm1 = np.expm1(k * np.log(u))
    out[both] = q[both] * (powm1 - k * (u - 1.0)) / c
    # tau = 0 < m: phi(0) = (0^k + lam) / c
    empty = (t == 0) & (q > 0)
    out[empty] = np.inf if k < 0 else q[empty] / k
    # m = 0 < tau: m * u^k -> inf for lam > 0, 0 for lam < 0
    orphan = (q == 0) & (t > 0)
    out[orphan] = np.inf if lam > 0 else -t[orphan] / lam
    return out


def _total(terms: np.ndarray) -> float:
    if np.any(np.isinf(terms)):
        return math.inf
    return max(0.0, math.fsum(terms))


def power_divergence(tau, m, lam: float) -> float:
    """Cressie-Read power divergence.

    lam = 1 is Pearson/2, lam = -2 Neyman/2, lam = -1/2 four times the
    squared Hellinger distance, and the removable singularities lam = 0
    (likelihood disparity) and lam = -1 (Kullback-Leibler) are evaluated
    through their limits.
    """
    t, q = _aligned(tau, m)
    if lam == 0:
        return likelihood_disparity(t, q)
    if lam == -1:
        return kl_divergence(t, q)
    return _total(_power_terms(t, q, float(lam)))


def likelihood_disparity(tau, m) -> float:
    """sum tau log(tau/m)."""
    t, q = _aligned(tau, m)
    return _total(_log_terms(t, q))


def kl_divergence(tau, m_beta) -> float:
    """sum m_beta (log m_beta - log tau).

    The expectation is taken under the model ``m_beta``; this is the
    reverse of the other common ordering. Infinite when tau vanishes on a
    cell that m_beta charges.
    """
    t, q = _aligned(tau, m_beta)
    return _total(_log_terms(q, t))


def _log_terms(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Cells of sum p log(p/r) written as p log(p/r) - p + r >= 0."""
    out = np.zeros_like(p)
    both = (p > 0) & (r > 0)
    u = p[both] / r[both]
    out[both] = r[both] * (u * np.log(u) - u + 1.0)
    out[(p > 0) & (r == 0)] = np.inf
    only_r = (p == 0) & (r > 0)
    out[only_r] = r[only_r]
    return out


def squared_hellinger(tau, m) -> float:
    """H^2 = 1/2 sum (sqrt(tau) - sqrt(m))^2, in [0, 1]."""
    t, q = _aligned(tau, m)
    return 0.5 * math.fsum((np.sqrt(t) - np.sqrt(q)) ** 2)


def bwhd_squared(tau, m, alpha: float) -> float:
    """Squared blended weighted Hellinger distance.

    sum (tau - m)^2 / (2 (alpha sqrt(tau) + (1 - alpha) sqrt(m))^2) for
    alpha in (0, 1). At alpha = 1/2 this is 2 * sum (sqrt(tau) - sqrt(m))^2,
    i.e. ``4 * squared_hellinger``.
    """
    _check_blend(alpha, closed=False)
    if alpha < BWHD_RECOMMENDED_MIN_ALPHA:
        warnings.warn(
            f"alpha={alpha:g} is below 1/3, outside the range usually recommended for BWHD",
            stacklevel=2,
        )
    t, q = _aligned(tau, m)
    w = alpha * np.sqrt(t) + (1.0 - alpha) * np.sqrt(q)
    return _ratio_sum((t - q) ** 2, 2.0 * w**2)


def extremal_function(tau, m, a) -> np.ndarray:
    """The standardized h maximising the mean gap for denominator a.

    h(t) = (tau - m) / (a sqrt(chi2_a)); Var_a(h) = 1 and
    E_tau h - E_m h = sqrt(chi2_a).
    """
    t, q, w = _aligned(tau, m, a)
    chi2 = _ratio_sum((t - q) ** 2, w)
    if chi2 == 0:
        raise ZeroDistance("tau and m coincide; the extremal function is undefined")
    if math.isinf(chi2):
        raise InfiniteDistance("chi-squared is infinite; no standardized extremal function")
    h = np.zeros_like(t)
    pos = w > 0
    h[pos] = (t[pos] - q[pos]) / (w[pos] * math.sqrt(chi2))
    return h


def mean_separation(h, tau, m, a) -> float:
    """Squared standardized mean gap (E_tau h - E_m h)^2 / Var_a(h)."""
    t, q, w = _aligned(tau, m, a)
    h = np.asarray(h, dtype=float)
    if h.shape != t.shape:
        raise InputError(f"h has {h.size} values for a support of size {t.size}")
    mean_a = math.fsum(w * h)
    centred = h - mean_a
    var = math.fsum(w * centred**2)
    scale = math.fsum(w * h**2)
    if var <= 1e-14 * max(scale, 1e-300):
        raise ZeroVariance("h is constant under a")
    gap = math.fsum(h * (t - q))
    return gap * gap / var


def bayes_test_function(f, g) -> np.ndarray:
    """Posterior probability g/(f + g) of the alternative under equal priors."""
    p, r = _aligned(f, g)
    s = p + r
    return np.where(s > 0, r / np.where(s > 0, s, 1.0), 0.5)


def bayes_risk(f, g) -> float:
    """Minimum quadratic Bayes risk 1/4 (1 - S^2/4)."""
    return 0.25 * (1.0 - symmetric_chisq(f, g) / 4.0)


def bayes_risk_direct(f, g) -> float:
    """The same risk as 1/2 sum f g / (f + g)."""
    p, r = _aligned(f, g)
    return 0.5 * _ratio_sum(p * r, p + r)


FAMILIES = (
    "power_divergence",
    "generalized_chisq",
    "blended_chisq",
    "symmetric_chisq",
    "pearson_chisq",
    "neyman_chisq",
    "kl",
    "squared_hellinger",
    "bwhd",
)


@dataclass(frozen=True)
class DistanceSpec:
    """A distance family together with its parameters."""

    family: str
    lam: float | None = None
    alpha: float | None = None
    denominator: DiscreteDensity | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown distance family {self.family!r}")
        if self.family == "power_divergence" and self.lam is None:
            raise InputError("power_divergence needs lam")
        if self.family == "blended_chisq":
            if self.alpha is None:
                raise InputError("blended_chisq needs alpha")
            _check_blend(self.alpha)
        if self.family == "bwhd":
            if self.alpha is None:
                raise InputError("bwhd needs alpha")
            _check_blend(self.alpha, closed=False)
        if self.family == "generalized_chisq" and self.denominator is None:
            raise InputError("generalized_chisq needs a denominator density")

    @property
    def label(self) -> str:
        if self.family == "power_divergence":
            return f"power_divergence(lambda={self.lam:g})"
        if self.family in ("blended_chisq", "bwhd"):
            return f"{self.family}(alpha={self.alpha:g})"
        return self.family

    def params(self) -> dict:
        out = {}
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.denominator is not None:
            out["denominator"] = {
                "t": self.denominator.support.tolist(),
                "mass": self.denominator.masses.tolist(),
            }
        return out

    @classmethod
    def pearson(cls):
        return cls("pearson_chisq")

    @classmethod
    def neyman(cls):
        return cls("neyman_chisq")

    @classmethod
    def symmetric(cls):
        return cls("symmetric_chisq")

    @classmethod
    def power(cls, lam: float):
        return cls("power_divergence", lam=float(lam))

    @classmethod
    def blended(cls, alpha: float):
        return cls("blended_chisq", alpha=float(alpha))

    @classmethod
    def bwhd(cls, alpha: float):
        return cls("bwhd", alpha=float(alpha))


def distance(tau, m, spec: DistanceSpec) -> float:
    fam = spec.family
    if fam == "power_divergence":
        return power_divergence(tau, m, spec.lam)
    if fam == "generalized_chisq":
        return generalized_chisq(tau, m, spec.denominator)
    if fam == "blended_chisq":
        return blended_chisq(tau, m, spec.alpha)
    if fam == "symmetric_chisq":
        return symmetric_chisq(tau, m)
    if fam == "pearson_chisq":
        return pearson_chisq(tau, m)
    if fam == "neyman_chisq":
        return neyman_chisq(tau, m)
    if fam == "kl":
        return kl_divergence(tau, m)
    if fam == "squared_hellinger":
        return squared_hellinger(tau, m)
    if fam == "bwhd":
        return bwhd_squared(tau, m, spec.alpha)
    raise InputError(f"unknown distance family {fam!r}")
