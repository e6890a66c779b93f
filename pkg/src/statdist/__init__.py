"""Statistical distances, residuals, quadratic forms and minimum-distance fitting."""

from .cdf_distances import (
    MonotoneMap,
    affine_map,
    cubic_map,
    exp_map,
    ks_distance,
    ks_testing_gap,
    l2_density_distance,
    transform,
)
from .densities import (
    ContinuousDistribution,
    DiscreteDensity,
    ParametricFamily,
    Sample,
    align,
    binomial_family,
    contaminate,
    discretize,
    empirical_density,
    make_density,
    midpoint_grid,
    normal,
    point_mass,
    poisson_family,
    two_point_family,
    uniform,
)
from .divergences import (
    DistanceSpec,
    bayes_risk,
    bayes_risk_direct,
    bayes_test_function,
    blended_chisq,
    bwhd_squared,
    distance,
    extremal_function,
    generalized_chisq,
    kl_divergence,
    likelihood_disparity,
    mean_separation,
    neyman_chisq,
    pearson_chisq,
    power_divergence,
    squared_hellinger,
    symmetric_chisq,
)
from .errors import InputError, NumericalFailure, StatDistError
from .estimation import FitOptions, FitResult, contamination_sweep, distance_to_model, min_distance_fit
from .quadratic import (
    QuadraticKernel,
    SmoothingKernel,
    locally_quadratic_distance,
    pearson_kernel,
    smooth_density,
    smoothed_bwhd,
    smoothed_pearson,
    smoothed_pearson_kernel,
    smoothed_squared_hellinger,
)
from .quadrature import integrate
from .residuals import ResidualVector, log_residuals, pearson_residuals, raf, symmetrized_residuals

__version__ = "0.1.0"
