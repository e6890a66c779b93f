import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import stats

from statdist import integrate
from statdist.errors import QuadratureFailure


def test_polynomial_exact():
    # Simpson is exact for cubics: [x^4/4 - x^2] from -1 to 2
    assert integrate(lambda x: x**3 - 2 * x, -1.0, 2.0) == pytest.approx(0.75, abs=1e-14)


def test_gaussian_mass():
    assert integrate(stats.norm.pdf, -8, 8) == pytest.approx(1 - 2 * stats.norm.sf(8), abs=1e-9)


def test_matches_scipy_quad_on_oscillating_integrand():
    f = lambda x: np.sin(5 * x) * np.exp(-x * x)  # noqa: E731
    ref, _ = sp_integrate.quad(f, -1, 3, epsabs=1e-13)
    assert integrate(f, -1, 3, tol=1e-10) == pytest.approx(ref, abs=1e-9)


def test_breakpoint_handles_kink():
    assert integrate(np.abs, -1.0, 2.0, breakpoints=[0.0]) == pytest.approx(2.5, abs=1e-14)


def test_max_width_finds_narrow_spike():
    spike = lambda x: stats.norm.pdf(x, 7.3, 0.01)  # noqa: E731
    assert integrate(spike, 0, 10, max_width=0.005) == pytest.approx(1.0, abs=1e-8)


def test_reversed_limits():
    assert integrate(np.cos, math.pi / 2, 0) == pytest.approx(-1.0, abs=1e-8)


def test_failures():
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: np.full_like(x, np.nan), 0, 1)
    with pytest.raises(QuadratureFailure):
        integrate(np.sin, 0, np.inf)
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: 1 / np.sqrt(np.abs(x - 0.3)), 0, 1, tol=1e-12, max_panels=64)
