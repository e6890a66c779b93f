"""Pearson, symmetrized and logarithmic residual systems, plus the RAF class.

Zero cells are encoded with IEEE infinities rather than raising; a cell
with zero mass under both densities gets residual 0 in every system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import DiscreteDensity, align
from .errors import DeltaBelowMinusOne, LambdaUndefined

RANGES = {
    "pearson": (-1.0, np.inf),
    "symmetrized": (-1.0, 1.0),
    "logarithmic": (-np.inf, np.inf),
}


@dataclass(frozen=True, eq=False)
class ResidualVector:
    support: np.ndarray
    values: np.ndarray
    kind: str

    @property
    def range(self) -> tuple[float, float]:
        return RANGES[self.kind]

    def __len__(self) -> int:
        return self.values.size


def _pair(tau, m):
    if isinstance(tau, DiscreteDensity) and isinstance(m, DiscreteDensity):
        return align(tau, m)
    t = np.asarray(tau, dtype=float)
    q = np.asarray(m, dtype=float)
    return np.arange(t.size, dtype=float), t, q


def pearson_values(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = q > 0
    with np.errstate(over="ignore"):
        out[pos] = t[pos] / q[pos] - 1.0
    out[(q == 0) & (t > 0)] = np.inf
    return out


def symmetrized_values(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    s = t + q
    pos = s > 0
    out[pos] = (t[pos] - q[pos]) / s[pos]
    return out


def log_values(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    both = (t > 0) & (q > 0)
    out[both] = np.log(t[both]) - np.log(q[both])
    out[(t == 0) & (q > 0)] = -np.inf
    out[(q == 0) & (t > 0)] = np.inf
    return out


def pearson_residuals(tau, m) -> ResidualVector:
    """delta(t) = tau(t)/m(t) - 1, with +inf where m vanishes and tau does not."""
    support, t, q = _pair(tau, m)
    return ResidualVector(support, pearson_values(t, q), "pearson")


def symmetrized_residuals(tau, m) -> ResidualVector:
    """(tau - m)/(tau + m), in [-1, 1]."""
    support, t, q = _pair(tau, m)
    return ResidualVector(support, symmetrized_values(t, q), "symmetrized")


def log_residuals(tau, m) -> ResidualVector:
    support, t, q = _pair(tau, m)
    return ResidualVector(support, log_values(t, q), "logarithmic")


RESIDUALS = {
    "pearson": pearson_residuals,
    "symmetrized": symmetrized_residuals,
    "logarithmic": log_residuals,
}


def raf(delta, lam: float):
    """Residual adjustment function ((1 + delta)**lam - 1) / (lam + 1).

    Vectorised over ``delta``. lam = -1 is rejected: the closed form has a
    pole there and no limiting form is adopted.
    """
    if lam == -1:
        raise LambdaUndefined("the RAF class is undefined at lambda = -1")
    d = np.asarray(delta, dtype=float)
    if np.any(d < -1):
        raise DeltaBelowMinusOne(f"Pearson residuals live in [-1, inf); got {d.min():g}")
    if lam == 0:
        out = np.zeros_like(d)
    else:
        with np.errstate(divide="ignore"):
            out = np.expm1(lam * np.log1p(d)) / (lam + 1.0)
    return float(out) if out.ndim == 0 else out
