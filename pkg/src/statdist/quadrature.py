"""Vectorised adaptive Simpson quadrature.

Panels are refined breadth-first: every pending panel is bisected in one
numpy call, so integrands must accept and return arrays.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureFailure

MAX_PANELS = 2**16


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-8,
    breakpoints: Sequence[float] = (),
    max_width: float | None = None,
    max_panels: int = MAX_PANELS,
) -> float:
    """Integrate ``func`` over ``[a, b]`` to absolute tolerance ``tol``.

    ``breakpoints`` inside the interval seed the initial partition, which is
    useful for kinks and jumps. ``max_width`` caps the width of the seed
    panels so narrow features are not stepped over.

    Raises QuadratureFailure when the accepted-panel count would exceed
    ``max_panels`` before every panel meets its share of the tolerance, or
    when the integrand produces NaN.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise QuadratureFailure("integration limits must be finite")
    if b < a:
        return -integrate(func, b, a, tol, breakpoints, max_width, max_panels)
    if b == a:
        return 0.0

    edges = np.unique(np.concatenate([[a, b], [p for p in breakpoints if a < p < b]]))
    if max_width is not None and max_width > 0:
        pieces = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            n = max(1, int(np.ceil((hi - lo) / max_width)))
            pieces.append(np.linspace(lo, hi, n + 1)[:-1])
        pieces.append([b])
        edges = np.concatenate(pieces)
    if edges.size - 1 > max_panels:
        raise QuadratureFailure("seed partition exceeds the panel budget")

    total_width = b - a
    lo = edges[:-1]
    hi = edges[1:]
    f_lo = _call(func, lo)
    f_hi = _call(func, hi)
    f_mid = _call(func, 0.5 * (lo + hi))
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)

    result = 0.0
    accepted = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        left_mid = _call(func, 0.5 * (lo + mid))
        right_mid = _call(func, 0.5 * (mid + hi))
        half = (mid - lo) / 6.0
        left = half * (f_lo + 4.0 * left_mid + f_mid)
        right = half * (f_mid + 4.0 * right_mid + f_hi)
        err = np.abs(left + right - whole)
        local_tol = 15.0 * tol * (hi - lo) / total_width
        done = err <= local_tol
        # panels that cannot be split further in floating point are accepted as-is
        done |= (mid <= lo) | (mid >= hi)

        richardson = left + right + (left + right - whole) / 15.0
        result += float(np.sum(richardson[done]))
        accepted += int(np.count_nonzero(done))

        keep = ~done
        if not np.any(keep):
            break
        if accepted + 2 * int(np.count_nonzero(keep)) > max_panels:
            raise QuadratureFailure(
                f"tolerance {tol:g} not met within {max_panels} panels on [{a:g}, {b:g}]"
            )
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        new_f_lo = np.concatenate([f_lo[keep], f_mid[keep]])
        new_f_hi = np.concatenate([f_mid[keep], f_hi[keep]])
        f_mid = np.concatenate([left_mid[keep], right_mid[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        f_lo, f_hi = new_f_lo, new_f_hi

    if not np.isfinite(result):
        raise QuadratureFailure("integral is not finite")
    return result


def _call(func, x: np.ndarray) -> np.ndarray:
    y = np.asarray(func(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    if np.any(np.isnan(y)):
        raise QuadratureFailure("integrand returned NaN")
    return y
