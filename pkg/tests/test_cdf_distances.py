import math

import numpy as np
import pytest
from conftest import pmf_strategy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from statdist import (
    MonotoneMap,
    affine_map,
    cubic_map,
    discretize,
    exp_map,
    ks_distance,
    ks_testing_gap,
    l2_density_distance,
    make_density,
    midpoint_grid,
    normal,
    transform,
    uniform,
)
from statdist.densities import ContinuousDistribution
from statdist.errors import NonMonotoneOnSupport

U01 = uniform(0, 1)
GRID4 = discretize(U01, midpoint_grid(0, 1, 4))


@st.composite
def discrete_laws(draw):
    k = draw(st.integers(1, 8))
    support = sorted(draw(st.sets(st.integers(-20, 30), min_size=k, max_size=k)))
    return make_density(np.asarray(support) / 10, draw(pmf_strategy(k)))


class TestKs:
    def test_identical(self):
        assert ks_distance(GRID4, GRID4) == 0
        assert ks_distance(U01, U01) == 0

    def test_uniform_vs_four_cells(self):
        assert ks_distance(U01, GRID4) == pytest.approx(0.125, abs=1e-15)
        assert ks_distance(GRID4, U01) == ks_distance(U01, GRID4)

    def test_singular_steps(self):
        assert ks_distance(make_density([0, 1], [1, 0]), make_density([0, 1], [0, 1])) == 1.0

    def test_continuous_pair_matches_closed_form(self):
        # N(0,1) vs N(1,1): largest gap at x = 1/2
        expected = stats.norm.cdf(0.5) - stats.norm.cdf(-0.5)
        assert ks_distance(normal(0, 1), normal(1, 1)) == pytest.approx(expected, abs=1e-12)

    def test_discrete_vs_scipy_ecdf_statistic(self):
        rng = np.random.default_rng(2)
        x = np.sort(rng.standard_normal(40))
        d = make_density(x, np.full(40, 1 / 40))
        ref = stats.kstest(x, "norm").statistic
        assert ks_distance(d, normal(0, 1)) == pytest.approx(ref, abs=1e-12)

    @settings(max_examples=100)
    @given(discrete_laws(), discrete_laws(), st.sampled_from(["cubic", "exp", "affine"]))
    def test_monotone_invariance(self, F, G, name):
        fmap = {"cubic": cubic_map(), "exp": exp_map(), "affine": affine_map(0.3, 4.0)}[name]
        assert ks_distance(transform(F, fmap), transform(G, fmap)) == pytest.approx(ks_distance(F, G), abs=1e-12)

    @given(discrete_laws(), discrete_laws(), discrete_laws())
    def test_metric(self, F, G, H):
        assert ks_distance(F, G) == ks_distance(G, F)
        assert ks_distance(F, G) <= ks_distance(F, H) + ks_distance(H, G) + 1e-12

    def test_discretization_rate(self):
        previous = math.inf
        for n in range(2, 257):
            ks = ks_distance(U01, discretize(U01, midpoint_grid(0, 1, n)))
            assert ks == pytest.approx(1 / (2 * n), abs=1e-9)
            assert ks < previous
            previous = ks


class TestTestingGap:
    def test_identical(self):
        assert ks_testing_gap(U01, U01, 0.3) == 0

    def test_maximiser_matches_ks(self):
        assert ks_testing_gap(U01, GRID4, 0.125) == pytest.approx(ks_distance(U01, GRID4), abs=1e-15)

    def test_below_both_supports(self):
        assert ks_testing_gap(U01, GRID4, -1.0) == 0


class TestL2:
    def test_identical(self):
        assert l2_density_distance(normal(0, 1), normal(0, 1)) == 0

    def test_gaussian_closed_form(self):
        # int (phi(x) - phi(x - c))^2 = (1 - exp(-c^2/4)) / sqrt(pi)
        expected = (1 - math.exp(-0.25)) / math.sqrt(math.pi)
        assert l2_density_distance(normal(0, 1), normal(1, 1)) == pytest.approx(expected, abs=1e-9)

    def test_location_invariance(self):
        base = l2_density_distance(normal(0, 1), normal(1, 1))
        assert l2_density_distance(normal(5, 1), normal(6, 1)) == pytest.approx(base, abs=1e-8)

    def test_scale_halves(self):
        base = l2_density_distance(normal(0, 1), normal(1, 1))
        scaled = l2_density_distance(normal(0, 2), normal(2, 2))
        assert scaled / base == pytest.approx(0.5, abs=1e-6)

    def test_not_invariant_under_cubic(self):
        f, g = normal(0, 1), normal(1, 1)
        before = l2_density_distance(f, g)
        cube = cubic_map()
        after = l2_density_distance(transform(f, cube), transform(g, cube))
        assert abs(after - before) / before > 0.10


class TestTransform:
    def test_identity(self):
        ident = MonotoneMap(lambda x: np.asarray(x, dtype=float), lambda y: np.asarray(y, dtype=float), name="id")
        d = make_density([0, 1, 3], [0.2, 0.3, 0.5])
        assert transform(d, ident) == d
        x = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(transform(normal(0, 1), ident).cdf(x), normal(0, 1).cdf(x))

    def test_cube_fixes_zero_and_one(self):
        cube = MonotoneMap(lambda x: np.asarray(x, dtype=float) ** 3, np.cbrt, name="cube")
        out = transform(make_density([0, 1], [0.5, 0.5]), cube)
        np.testing.assert_array_equal(out.support, [0, 1])
        np.testing.assert_array_equal(out.masses, [0.5, 0.5])

    def test_uniform_squared(self):
        sq = MonotoneMap(lambda x: np.asarray(x, dtype=float) ** 2, np.sqrt, lambda x: 2 * np.asarray(x), "square")
        out = transform(U01, sq)
        y = np.array([0.04, 0.25, 0.81])
        np.testing.assert_allclose(out.cdf(y), np.sqrt(y), rtol=1e-15)
        np.testing.assert_allclose(out.pdf(y), 0.5 / np.sqrt(y), rtol=1e-15)
        assert (out.lower, out.upper) == (0.0, 1.0)

    def test_cubic_inverse(self):
        cube = cubic_map()
        x = np.linspace(-50, 50, 1001)
        np.testing.assert_allclose(cube.inverse(cube.forward(x)), x, rtol=1e-13, atol=1e-13)

    def test_exp_pushforward_is_lognormal(self):
        out = transform(normal(0, 1), exp_map())
        y = np.array([0.2, 1.0, 3.0])
        np.testing.assert_allclose(out.cdf(y), stats.lognorm.cdf(y, 1.0), rtol=1e-12)
        np.testing.assert_allclose(out.pdf(y), stats.lognorm.pdf(y, 1.0), rtol=1e-12)

    def test_non_monotone_rejected(self):
        fold = MonotoneMap(lambda x: np.abs(np.asarray(x, dtype=float)), lambda y: y, name="fold")
        with pytest.raises(NonMonotoneOnSupport):
            transform(make_density([-1, 0.5], [0.5, 0.5]), fold)
        with pytest.raises(NonMonotoneOnSupport):
            affine_map(-1.0)

    def test_numeric_slope(self):
        m = MonotoneMap(np.exp, np.log, name="exp-numeric")
        np.testing.assert_allclose(m.slope(np.array([0.0, 1.0])), np.exp([0.0, 1.0]), rtol=1e-8)


def test_scipy_backed_continuous_law():
    law = ContinuousDistribution.from_scipy(stats.t(5))
    assert ks_distance(law, law) == 0
