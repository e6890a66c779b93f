"""Minimum-distance estimation over a parametric family and contamination
sweeps comparing how far different distances let the estimate drift."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .densities import DiscreteDensity, ParametricFamily, contaminate
from .divergences import DistanceSpec, distance, generalized_chisq
from .errors import AllDistancesInfinite, GeneratorDomainError, StatDistError

FALLBACK_ALPHA = 0.99


@dataclass(frozen=True)
class FitOptions:
    grid_points: int = 64
    xatol: float = 1e-6
    max_refine: int = 500
    keep_trace: bool = False
    start: tuple | None = None
    fallback_blend: bool = False


@dataclass
class FitResult:
    theta_hat: np.ndarray
    distance_at_min: float
    evaluations: int
    converged: bool
    on_boundary: bool = False
    spec: DistanceSpec | None = None
    fallback_used: bool = False
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theta_hat": [float(v) for v in self.theta_hat],
            "distance_at_min": _jsonable(self.distance_at_min),
            "evaluations": self.evaluations,
            "converged": self.converged,
            "on_boundary": self.on_boundary,
            "spec": self.spec.label if self.spec else None,
            "fallback_used": self.fallback_used,
        }


def _jsonable(x: float):
    return "inf" if math.isinf(x) else x


class _Objective:
    def __init__(self, data_masses, family, spec, keep_trace):
        self.data = data_masses
        self.family = family
        self.spec = spec
        self.calls = 0
        self.trace = [] if keep_trace else None
        self.failures = 0
        self.last_error = None
        self.denominator = None
        if spec.family == "generalized_chisq":
            self.denominator = spec.denominator.on_support(family.support)

    def __call__(self, theta) -> float:
        theta = np.clip(np.atleast_1d(theta), self.family.lower, self.family.upper)
        self.calls += 1
        try:
            m = self.family.masses(theta)
        except GeneratorDomainError as exc:
            self.failures += 1
            self.last_error = exc
            return math.inf
        if self.denominator is not None:
            value = generalized_chisq(self.data, m, self.denominator)
        else:
            value = distance(self.data, m, self.spec)
        if self.trace is not None:
            self.trace.append((tuple(theta.tolist()), value))
        return value


def _data_on_family(data: DiscreteDensity, family: ParametricFamily) -> np.ndarray:
    if np.array_equal(data.support, family.support):
        return data.masses
    return data.on_support(family.support)


def min_distance_fit(
    data: DiscreteDensity,
    family: ParametricFamily,
    spec: DistanceSpec,
    options: FitOptions | None = None,
) -> FitResult:
    """Minimise distance(data, m_theta) over the family's parameter box.

    A coarse grid (``grid_points`` per dimension) locates a starting point,
    then bounded Nelder-Mead refines it. Ties on the grid go to the
    lexicographically smallest theta.
    """
    options = options or FitOptions()
    d = _data_on_family(data, family)
    lower = np.asarray(family.lower, dtype=float)
    upper = np.asarray(family.upper, dtype=float)
    obj = _Objective(d, family, spec, options.keep_trace)

    axes = [np.linspace(lo, hi, options.grid_points) for lo, hi in zip(lower, upper)]
    best_theta, best_val = None, math.inf
    for point in itertools.product(*axes):
        v = obj(np.array(point))
        if v < best_val:
            best_theta, best_val = np.array(point), v
    if options.start is not None:
        start = np.clip(np.asarray(options.start, dtype=float), lower, upper)
        v = obj(start)
        if v <= best_val:
            best_theta, best_val = start, v

    if best_theta is None:
        if obj.failures == obj.calls:
            raise GeneratorDomainError(f"generator failed at every grid point: {obj.last_error}")
        if options.fallback_blend and spec.family != "blended_chisq":
            result = min_distance_fit(
                data, family, DistanceSpec.blended(FALLBACK_ALPHA),
                FitOptions(options.grid_points, options.xatol, options.max_refine, options.keep_trace, options.start),
            )
            result.fallback_used = True
            return result
        raise AllDistancesInfinite(
            f"{spec.label} is infinite at every grid point; data cells with zero mass "
            f"make this distance unbounded (consider the blended fallback, alpha={FALLBACK_ALPHA})"
        )

    converged = True
    theta = best_theta
    if best_val > 0:
        span = upper - lower
        simplex = [theta]
        for i in range(len(theta)):
            step = np.zeros_like(theta)
            step[i] = span[i] / options.grid_points
            vertex = theta + step if theta[i] + step[i] <= upper[i] else theta - step
            simplex.append(vertex)
        res = minimize(
            obj,
            theta,
            method="Nelder-Mead",
            bounds=list(zip(lower, upper)),
            options={
                "xatol": options.xatol,
                "fatol": math.inf,
                "maxfev": options.max_refine,
                "initial_simplex": np.array(simplex),
            },
        )
        converged = bool(res.success) or res.fun == 0
        if res.fun <= best_val:
            theta = np.clip(res.x, lower, upper)

    value = obj(theta)
    obj.calls -= 1
    on_boundary = bool(np.any(np.isclose(theta, lower, rtol=0, atol=options.xatol))
                       or np.any(np.isclose(theta, upper, rtol=0, atol=options.xatol)))
    trace = obj.trace or []
    if on_boundary and options.keep_trace:
        trace.append(("boundary", tuple(theta.tolist())))
    return FitResult(theta, value, obj.calls, converged, on_boundary, spec, False, trace)


def distance_to_model(data: DiscreteDensity, family: ParametricFamily, spec: DistanceSpec) -> float:
    """inf over the family of distance(data, m); +inf when every model is infinitely far."""
    try:
        return min_distance_fit(data, family, spec).distance_at_min
    except AllDistancesInfinite:
        return math.inf


@dataclass(frozen=True)
class SweepRow:
    spec: str
    epsilon: float
    theta_hat: float
    shift: float
    converged: bool
    error: str = ""


def contamination_sweep(
    clean: DiscreteDensity,
    family: ParametricFamily,
    specs: list,
    point: float,
    epsilons,
    options: FitOptions | None = None,
) -> list[SweepRow]:
    """Fit each spec to (1 - eps) * clean + eps * delta_point for every eps.

    ``shift`` is the distance of the estimate from the eps = 0 fit, which
    is always computed even when 0 is not among ``epsilons``. Fit errors are
    recorded in the row instead of aborting the sweep.
    """
    rows = []
    for spec in specs:
        try:
            base = min_distance_fit(clean, family, spec, options).theta_hat
        except StatDistError as exc:
            for eps in epsilons:
                rows.append(SweepRow(spec.label, float(eps), math.nan, math.nan, False, str(exc)))
            continue
        for eps in epsilons:
            if eps == 0:
                rows.append(SweepRow(spec.label, 0.0, float(base[0]), 0.0, True))
                continue
            try:
                fit = min_distance_fit(contaminate(clean, point, eps), family, spec, options)
            except StatDistError as exc:
                rows.append(SweepRow(spec.label, float(eps), math.nan, math.nan, False, str(exc)))
                continue
            shift = float(np.max(np.abs(fit.theta_hat - base)))
            rows.append(SweepRow(spec.label, float(eps), float(fit.theta_hat[0]), shift, fit.converged))
    return rows


SWEEP_COLUMNS = ("spec", "epsilon", "theta_hat", "shift", "converged")


def write_sweep_csv(rows, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.spec, repr(r.epsilon), repr(r.theta_hat), repr(r.shift), str(r.converged).lower()])
