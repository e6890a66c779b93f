import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy import stats

from statdist import (
    QuadraticKernel,
    SmoothingKernel,
    discretize,
    generalized_chisq,
    locally_quadratic_distance,
    make_density,
    midpoint_grid,
    normal,
    pearson_chisq,
    pearson_kernel,
    point_mass,
    smooth_density,
    smoothed_bwhd,
    smoothed_pearson,
    smoothed_pearson_kernel,
    smoothed_squared_hellinger,
)
from statdist.errors import AsymmetricKernel, InputError, ZeroMassCell
from statdist.quadratic import check_nonnegative_definite

RUN_TAU = make_density([0, 1], [0.5, 0.5])
RUN_M = make_density([0, 1], [0.25, 0.75])
G1 = SmoothingKernel("gaussian", 1.0)


class TestPearsonKernel:
    def test_entries(self):
        K = pearson_kernel(RUN_M)
        assert K(0, 0) == 4.0
        assert K(1, 1) == pytest.approx(4 / 3, abs=1e-15)
        assert K(0, 1) == 0.0

    def test_running_pair(self):
        assert locally_quadratic_distance(RUN_TAU, RUN_M, pearson_kernel(RUN_M)) == pytest.approx(1 / 3, abs=1e-15)

    def test_matches_generalized_chisq(self):
        rng = np.random.default_rng(5)
        m = make_density(np.arange(8.0), rng.dirichlet(np.ones(8)))
        K = pearson_kernel(m)
        worst = 0.0
        for _ in range(100):
            d = make_density(np.arange(8.0), rng.dirichlet(np.ones(8)))
            worst = max(worst, abs(locally_quadratic_distance(d, m, K) - generalized_chisq(d, m, m)))
        assert worst <= 1e-12

    def test_zero_mass_cell(self):
        with pytest.raises(ZeroMassCell):
            pearson_kernel(make_density([0, 1], [1.0, 0.0]))


class TestQuadraticForm:
    def test_identical(self):
        assert locally_quadratic_distance(RUN_M, RUN_M, QuadraticKernel(lambda s, t: 1.0)) == 0.0

    def test_rank_one_kernel_vanishes(self):
        value = locally_quadratic_distance(RUN_TAU, RUN_M, QuadraticKernel(lambda s, t: 1.0, symmetric=True))
        assert value == pytest.approx(0.0, abs=1e-16)

    def test_asymmetric_kernel_rejected(self):
        with pytest.raises(AsymmetricKernel):
            locally_quadratic_distance(RUN_TAU, RUN_M, QuadraticKernel(lambda s, t: s - 2 * t + 3))

    def test_user_kernel_matches_matrix_product(self):
        K = QuadraticKernel(lambda s, t: math.exp(-abs(s - t)))
        d = RUN_TAU.masses - RUN_M.masses
        mat = np.exp(-np.abs(np.subtract.outer([0.0, 1.0], [0.0, 1.0])))
        assert locally_quadratic_distance(RUN_TAU, RUN_M, K) == pytest.approx(d @ mat @ d, abs=1e-16)


class TestSmoothDensity:
    def test_point_mass(self):
        assert smooth_density(point_mass(0.0), G1, 0.0) == pytest.approx(stats.norm.pdf(0), abs=1e-15)
        assert smooth_density(point_mass(0.0), G1, 1.0) == smooth_density(point_mass(0.0), G1, -1.0)

    def test_two_atoms(self):
        expected = 0.5 * stats.norm.pdf(0.5) + 0.5 * stats.norm.pdf(-0.5)
        assert smooth_density(RUN_TAU, G1, 0.5) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.352065, abs=1e-6)

    def test_continuous_convolution(self):
        # N(0,1) convolved with N(0,1) is N(0,2)
        assert smooth_density(normal(0, 1), G1, 0.7) == pytest.approx(stats.norm.pdf(0.7, 0, math.sqrt(2)), abs=1e-9)

    def test_uniform_kernel(self):
        k = SmoothingKernel("uniform", 0.5)
        assert smooth_density(point_mass(0.0), k, 0.2) == 1.0
        assert smooth_density(point_mass(0.0), k, 0.7) == 0.0

    def test_kernel_validation(self):
        with pytest.raises(InputError):
            SmoothingKernel("triangle", 1.0)
        with pytest.raises(InputError):
            SmoothingKernel("gaussian", 0.0)


def _pearson_by_quad(F, G, h):
    """Independent oracle: scipy quad over the smoothed densities."""
    f = lambda y: float(np.dot(F.masses, stats.norm.pdf(y, F.support, h)))  # noqa: E731
    g = lambda y: float(np.dot(G.masses, stats.norm.pdf(y, G.support, h)))  # noqa: E731
    lo = min(F.support.min(), G.support.min()) - 12 * h
    hi = max(F.support.max(), G.support.max()) + 12 * h
    val, _ = sp_integrate.quad(lambda y: (f(y) - g(y)) ** 2 / g(y), lo, hi, epsabs=1e-12, limit=400)
    return val


class TestSmoothedPearson:
    def test_identical(self):
        assert smoothed_pearson(RUN_TAU, RUN_TAU, G1) == 0.0
        assert smoothed_pearson(point_mass(0.0), point_mass(0.0), G1) == 0.0

    def test_two_atoms_vs_point_mass(self):
        value = smoothed_pearson(RUN_TAU, point_mass(0.0), G1)
        # f*/g* = (1 + e^{y - 1/2}) / 2, so the integral is (e - 1) / 4 in closed form
        assert value == pytest.approx((math.e - 1) / 4, abs=1e-8)
        form = locally_quadratic_distance(RUN_TAU, point_mass(0.0), smoothed_pearson_kernel(point_mass(0.0), G1))
        assert abs(value - form) <= 1e-6

    def test_matches_scipy_quad(self):
        F = make_density([0, 0.5, 2], [0.2, 0.5, 0.3])
        G = make_density([0, 1, 2], [0.3, 0.3, 0.4])
        for h in (0.25, 0.5, 1.0):
            assert smoothed_pearson(F, G, SmoothingKernel("gaussian", h)) == pytest.approx(
                _pearson_by_quad(F, G, h), abs=1e-7
            )

    def test_uniform_kernel_uncovered_is_infinite(self):
        k = SmoothingKernel("uniform", 0.25)
        assert smoothed_pearson(point_mass(1.0), point_mass(0.0), k) == math.inf

    def test_small_bandwidth_recovers_discrete_pearson(self):
        F = make_density([0, 1, 2], [0.2, 0.5, 0.3])
        G = make_density([0, 1, 2], [0.3, 0.3, 0.4])
        chi = pearson_chisq(F, G)
        gaps = [abs(smoothed_pearson(F, G, SmoothingKernel("gaussian", h)) / chi - 1) for h in (0.5, 0.25, 0.1)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] <= 0.05

    def test_discretization_of_continuous_reference_decreases(self):
        g = normal(0, 1)
        k = SmoothingKernel("gaussian", 0.5)
        values = [smoothed_pearson(discretize(g, midpoint_grid(-4, 4, n)), g, k) for n in (4, 8, 16, 32)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestSmoothedPearsonKernel:
    G = make_density([0.0, 0.7, 1.5, 2.2, 3.0], [0.1, 0.3, 0.2, 0.25, 0.15])
    k = SmoothingKernel("gaussian", 0.5)

    def test_symmetric_entries(self):
        K = smoothed_pearson_kernel(self.G, self.k)
        assert K.symmetric
        assert K(0.7, 2.2) == K(2.2, 0.7)
        raw = smoothed_pearson_kernel(self.G, self.k).evaluator
        assert raw(0.7, 2.2) == pytest.approx(raw(2.2, 0.7), rel=1e-9)

    def test_nonnegative_definite(self):
        K = smoothed_pearson_kernel(self.G, self.k)
        assert check_nonnegative_definite(K, self.G.support, np.random.default_rng(3)) >= -1e-9

    def test_point_mass_reference_closed_form(self):
        # with G a point mass at 0: integral of phi_h(y-s) phi_h(y-t) / phi_h(y) dy = exp(s t / h^2)
        K = smoothed_pearson_kernel(point_mass(0.0), G1)
        for s, t in ((0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, -0.3)):
            assert K(s, t) == pytest.approx(math.exp(s * t), rel=1e-8)


class TestSmoothedBwhdHellinger:
    def test_identical(self):
        assert smoothed_bwhd(RUN_TAU, RUN_TAU, G1, 0.5) == 0.0
        assert smoothed_squared_hellinger(RUN_TAU, RUN_TAU, G1) == 0.0

    def test_half_is_eight_hellinger(self):
        F = make_density([0, 1, 2.5], [0.2, 0.5, 0.3])
        G = make_density([0, 1.5], [0.6, 0.4])
        b = smoothed_bwhd(F, G, G1, 0.5)
        assert abs(b - 8 * smoothed_squared_hellinger(F, G, G1)) <= 1e-6

    def test_hellinger_closed_form_for_point_masses(self):
        # two N(., h^2) laws a apart: 1 - exp(-a^2 / (8 h^2))
        h, a = 0.5, 1.0
        value = smoothed_squared_hellinger(point_mass(0.0), point_mass(a), SmoothingKernel("gaussian", h))
        assert value == pytest.approx(1 - math.exp(-(a**2) / (8 * h**2)), abs=1e-9)

    def test_nearly_singular_pair_near_ceiling(self):
        value = smoothed_bwhd(point_mass(0.0), point_mass(3.0), SmoothingKernel("gaussian", 0.5), 0.5)
        # ceiling for disjoint laws at alpha = 1/2 is 8; overlap is tiny
        ceiling = 8 * (1 - math.exp(-9 / 2))
        assert value == pytest.approx(ceiling, abs=1e-6)
        assert 7.9 < value < 8.0
