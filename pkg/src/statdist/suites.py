"""Seeded property suites used by ``statdist selftest`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`. Passing ``tol`` replaces every
numeric tolerance inside a suite, which is how an over-tight run is forced
to fail.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import cdf_distances as cdf
from . import densities as dens
from . import divergences as dv
from . import quadratic as qd
from .estimation import contamination_sweep, min_distance_fit


@dataclass
class SuiteResult:
    name: str
    claim: str
    passed: bool
    seconds: float = 0.0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28} {self.seconds:7.2f}s  {self.claim}"


class _Checker:
    def __init__(self, limit: int = 5):
        self.failures = []
        self.count = 0
        self.limit = limit

    def __call__(self, ok: bool, message) -> None:
        if not ok:
            self.count += 1
            if len(self.failures) < self.limit:
                self.failures.append(message() if callable(message) else message)


def random_pmf(rng, k: int, zero_prob: float = 0.1, positive: bool = False) -> np.ndarray:
    """Normalised uniform draws; with probability ``zero_prob`` one cell is zeroed."""
    u = rng.uniform(size=k)
    if not positive and k > 1 and rng.uniform() < zero_prob:
        u[rng.integers(k)] = 0.0
    return u / u.sum()


def _rng(seed: int, suite: int):
    return np.random.default_rng([seed, suite])


def _pick(tol, default):
    return default if tol is None else tol


def _close(a: float, b: float, tol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol


def s2_metric(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-12)
    rng = _rng(seed, 1)
    check = _Checker()
    for i in range(1000):
        k = int(rng.integers(2, 21))
        tau, m, g = (random_pmf(rng, k) for _ in range(3))
        d_tm = dv.symmetric_chisq(tau, m)
        check(d_tm == dv.symmetric_chisq(m, tau), f"triple {i}: S2 not symmetric")
        check(d_tm >= 0, f"triple {i}: S2 negative")
        check(dv.symmetric_chisq(tau, tau) == 0, f"triple {i}: S2(tau, tau) != 0")
        differs = np.max(np.abs(tau - m)) > t
        check(d_tm > 0 if differs else d_tm <= t, f"triple {i}: zero-iff-equal violated")
        d_tg, d_gm = dv.symmetric_chisq(tau, g), dv.symmetric_chisq(g, m)
        slack = math.sqrt(d_tg) + math.sqrt(d_gm) - math.sqrt(d_tm)
        check(slack >= -t, f"triple {i}: triangle slack {slack:.3e}")
        if differs and np.max(np.abs(g - tau)) > t and np.max(np.abs(g - m)) > t:
            check(slack > t, f"triple {i}: triangle not strict (slack {slack:.3e})")
    return SuiteResult("s2_metric", "symmetric chi-squared is a metric", check.count == 0, failures=check.failures)


def hellinger_sandwich(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-12)
    rng = _rng(seed, 2)
    check = _Checker()
    for i in range(1000):
        k = int(rng.integers(2, 21))
        tau, m = random_pmf(rng, k), random_pmf(rng, k)
        s2 = dv.symmetric_chisq(tau, m)
        h2 = dv.squared_hellinger(tau, m)
        check(h2 - s2 / 8 >= -t, f"pair {i}: H2 < S2/8 by {s2 / 8 - h2:.3e}")
        check(s2 / 4 - h2 >= -t, f"pair {i}: H2 > S2/4 by {h2 - s2 / 4:.3e}")
    a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    check(_close(dv.symmetric_chisq(a, b), 4.0, t), "singular pair: S2 != 4")
    check(_close(dv.squared_hellinger(a, b), 1.0, t), "singular pair: H2 != 1")
    return SuiteResult("hellinger_sandwich", "S2/8 <= H2 <= S2/4", check.count == 0, failures=check.failures)


def sup_characterization(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t_sup = _pick(tol, 1e-9)
    t_std = _pick(tol, 1e-10)
    rng = _rng(seed, 3)
    check = _Checker()
    for i in range(200):
        k = int(rng.integers(2, 7))
        tau, m = random_pmf(rng, k), random_pmf(rng, k)
        a = random_pmf(rng, k, positive=True)
        chi2 = dv.generalized_chisq(tau, m, a)
        if chi2 == 0:
            continue
        hs = rng.standard_normal((500, k))
        # vectorised ratio; mean_separation itself is spot-checked below
        gaps = hs @ (tau - m)
        centred = hs - (hs @ a)[:, None]
        var = (centred**2) @ a
        worst = float(np.max(gaps**2 / var))
        check(worst <= chi2 + t_sup, f"case {i}: random h exceeds chi2 by {worst - chi2:.3e}")
        for h in hs[:5]:
            direct = dv.mean_separation(h, tau, m, a)
            check(direct <= chi2 + t_sup, f"case {i}: mean_separation exceeds chi2")
        h_hat = dv.extremal_function(tau, m, a)
        attained = dv.mean_separation(h_hat, tau, m, a)
        check(abs(attained - chi2) <= t_sup, f"case {i}: extremal misses chi2 by {attained - chi2:.3e}")
        mean_a = math.fsum(a * h_hat)
        var_a = math.fsum(a * (h_hat - mean_a) ** 2)
        check(abs(var_a - 1.0) <= t_std, f"case {i}: Var_a(h_hat) = {var_a!r}")
        gap = math.fsum(h_hat * (tau - m))
        check(abs(gap - math.sqrt(chi2)) <= t_std, f"case {i}: mean gap {gap!r} vs {math.sqrt(chi2)!r}")

    # sup of squared Z (denominator m) and t statistics (denominator d) for empirical d
    for i in range(20):
        k = int(rng.integers(2, 7))
        m = random_pmf(rng, k, positive=True)
        values = rng.choice(k, size=60, p=m)
        d = dens.empirical_density(values.astype(float), np.arange(k, dtype=float)).masses
        pearson = dv.pearson_chisq(d, m)
        neyman = dv.neyman_chisq(d, m)
        if pearson > 0:
            h_hat = dv.extremal_function(d, m, m)
            check(abs(dv.mean_separation(h_hat, d, m, m) - pearson) <= t_sup, f"sample {i}: Z^2 sup != Pearson")
            for h in rng.standard_normal((50, k)):
                check(dv.mean_separation(h, d, m, m) <= pearson + t_sup, f"sample {i}: Z^2 > Pearson")
        if pearson > 0 and math.isfinite(neyman):
            h_hat = dv.extremal_function(d, m, d)
            check(abs(dv.mean_separation(h_hat, d, m, d) - neyman) <= t_sup, f"sample {i}: t^2 sup != Neyman")
    return SuiteResult("sup_characterization", "chi2_a = sup_h mean gap^2 / Var_a(h)", check.count == 0,
                       failures=check.failures)


def _kl_oracle(tau: np.ndarray, m: np.ndarray) -> float:
    """max sum h m subject to sum e^h tau <= 1, by brute force.

    The constraint is active at the optimum, so h = log(w / tau) for w on
    the probability simplex; search a grid of w, then refine in softmax
    coordinates.
    """
    k = tau.size

    def value(w):
        return float(np.sum(m * (np.log(w) - np.log(tau))))

    grid = np.linspace(0.0025, 0.9975, 400)
    if k == 2:
        cands = [np.array([x, 1 - x]) for x in grid]
    else:
        coarse = np.linspace(0.01, 0.98, 98)
        cands = [np.array([x, y, 1 - x - y]) for x in coarse for y in coarse if x + y < 0.995]
    best = max(cands, key=value)

    def neg(z):
        w = np.exp(np.append(z, 0.0))
        return -value(w / w.sum())

    z0 = np.log(best[:-1] / best[-1])
    res = minimize(neg, z0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    return max(value(best), -res.fun)


def _bwhd_oracle(tau: np.ndarray, m: np.ndarray, alpha: float) -> float:
    """Squared max of sum h (tau - m) subject to sum h^2 w^2 <= 1, by brute force.

    On the active constraint h = u / w for a unit vector u; search angles.
    """
    w = alpha * np.sqrt(tau) + (1 - alpha) * np.sqrt(m)
    c = (tau - m) / w

    def unit(angles):
        if angles.size == 1:
            return np.array([math.cos(angles[0]), math.sin(angles[0])])
        a, b = angles
        return np.array([math.cos(a), math.sin(a) * math.cos(b), math.sin(a) * math.sin(b)])

    def value(angles):
        return float(unit(np.asarray(angles)) @ c)

    if tau.size == 2:
        cands = [np.array([x]) for x in np.linspace(0, 2 * math.pi, 720, endpoint=False)]
    else:
        cands = [np.array([x, y]) for x in np.linspace(0, math.pi, 90) for y in np.linspace(0, 2 * math.pi, 180)]
    best = max(cands, key=value)
    res = minimize(lambda z: -value(z), best, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return max(value(best), -res.fun) ** 2


def optimization_forms(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-3)
    rng = _rng(seed, 4)
    check = _Checker()
    for i in range(20):
        k = int(rng.integers(2, 4))
        tau = random_pmf(rng, k, positive=True)
        m = random_pmf(rng, k, positive=True)
        kl = dv.kl_divergence(tau, m)
        oracle = _kl_oracle(tau, m)
        check(abs(oracle - kl) <= t, f"pair {i}: KL {kl:.6f} vs oracle {oracle:.6f}")
        alpha = float(rng.uniform(1 / 3, 0.95))
        bw = dv.bwhd_squared(tau, m, alpha)
        opt2 = _bwhd_oracle(tau, m, alpha)
        check(abs(opt2 - 2 * bw) <= t, f"pair {i}: optimum^2 {opt2:.6f} vs 2 BWHD^2 {2 * bw:.6f}")
    return SuiteResult("optimization_forms", "KL and BWHD as constrained maxima", check.count == 0,
                       failures=check.failures)


def _cell_risk_oracle(f: np.ndarray, g: np.ndarray) -> float:
    """Minimise 1/2 sum (1 - phi)^2 g + 1/2 sum phi^2 f cell by cell.

    Each cell is a convex quadratic A phi^2 + B phi + C on [0, 1]; its
    minimum is at the clipped vertex.
    """
    total = 0.0
    for fi, gi in zip(f, g):
        A = 0.5 * (fi + gi)
        B = -gi
        C = 0.5 * gi
        if A == 0:
            continue
        phi = min(1.0, max(0.0, -B / (2 * A)))
        total += A * phi * phi + B * phi + C
    return total


def bayes_risk_identity(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-10)
    rng = _rng(seed, 5)
    check = _Checker()
    for i in range(200):
        k = int(rng.integers(2, 21))
        f, g = random_pmf(rng, k), random_pmf(rng, k)
        risk = dv.bayes_risk(f, g)
        oracle = _cell_risk_oracle(f, g)
        check(abs(risk - oracle) <= t, f"pair {i}: risk {risk!r} vs oracle {oracle!r}")
        phi = dv.bayes_test_function(f, g)
        achieved = 0.5 * float(np.sum((1 - phi) ** 2 * g)) + 0.5 * float(np.sum(phi**2 * f))
        check(abs(achieved - oracle) <= t, f"pair {i}: phi_opt risk {achieved!r}")
    f = np.array([0.2, 0.3, 0.5])
    check(abs(dv.bayes_risk(f, f) - 0.25) <= t, "f = g: risk != 1/4")
    check(abs(dv.bayes_risk([1.0, 0.0], [0.0, 1.0])) <= t, "singular: risk != 0")
    return SuiteResult("bayes_risk", "minimum risk = (1 - S2/4)/4", check.count == 0, failures=check.failures)


LIMIT_OFFSET = 1e-8


def power_collapses(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-10)
    t_lim = _pick(tol, 1e-6)
    rng = _rng(seed, 6)
    check = _Checker()
    for i in range(200):
        k = int(rng.integers(2, 21))
        tau, m = random_pmf(rng, k), random_pmf(rng, k)
        pairs = [
            ("lambda=1 vs Pearson/2", dv.power_divergence(tau, m, 1), dv.pearson_chisq(tau, m) / 2),
            ("lambda=-2 vs Neyman/2", dv.power_divergence(tau, m, -2), dv.neyman_chisq(tau, m) / 2),
            ("lambda=-1/2 vs 4 H2", dv.power_divergence(tau, m, -0.5), 4 * dv.squared_hellinger(tau, m)),
        ]
        for label, got, want in pairs:
            check(_close(got, want, t), f"pair {i}: {label}: {got!r} vs {want!r}")
        tp, mp = random_pmf(rng, k, positive=True), random_pmf(rng, k, positive=True)
        for centre in (0.0, -1.0):
            limit = dv.power_divergence(tp, mp, centre)
            for off in (LIMIT_OFFSET, -LIMIT_OFFSET):
                near = dv.power_divergence(tp, mp, centre + off)
                check(abs(near - limit) <= t_lim, f"pair {i}: lambda={centre}{off:+g} gap {near - limit:.3e}")
    return SuiteResult("power_collapses", "power-divergence special cases and limits", check.count == 0,
                       failures=check.failures, notes=[f"limit offset {LIMIT_OFFSET:g}"])


def _random_atoms(rng, k: int) -> np.ndarray:
    return np.sort(rng.choice(np.arange(0.0, 4.0, 0.5), size=k, replace=False))


def quadratic_forms(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t_ex = _pick(tol, 1e-12)
    t_p10 = _pick(tol, 1e-6)
    rng = _rng(seed, 7)
    check = _Checker()
    for i in range(100):
        k = int(rng.integers(2, 21))
        support = np.arange(k, dtype=float)
        d = dens.DiscreteDensity(support, random_pmf(rng, k))
        m = dens.DiscreteDensity(support, random_pmf(rng, k, positive=True))
        quad = qd.locally_quadratic_distance(d, m, qd.pearson_kernel(m))
        want = dv.generalized_chisq(d, m, m)
        check(abs(quad - want) <= t_ex * max(1.0, want), f"pair {i}: Pearson kernel {quad!r} vs {want!r}")
    for i in range(20):
        k = int(rng.integers(2, 6))
        atoms = _random_atoms(rng, k)
        F = dens.DiscreteDensity(atoms, random_pmf(rng, k))
        G = dens.DiscreteDensity(atoms, random_pmf(rng, k, positive=True))
        for h in (0.25, 0.5, 1.0):
            kern = qd.SmoothingKernel("gaussian", h)
            direct = qd.smoothed_pearson(F, G, kern)
            form = qd.locally_quadratic_distance(F, G, qd.smoothed_pearson_kernel(G, kern))
            check(abs(direct - form) <= t_p10, f"pair {i}, h={h}: {direct!r} vs {form!r}")
    return SuiteResult("quadratic_forms", "Pearson kernel and smoothed-Pearson kernel identities",
                       check.count == 0, failures=check.failures)


MAPS = (cdf.cubic_map, cdf.exp_map, lambda: cdf.affine_map(2.5, -1.0))


def ks_properties(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t_inv = _pick(tol, 1e-12)
    t_disc = _pick(tol, 1e-9)
    rng = _rng(seed, 8)
    check = _Checker()
    maps = [make() for make in MAPS]
    for i in range(100):
        kf, kg = int(rng.integers(1, 11)), int(rng.integers(1, 11))
        F = dens.DiscreteDensity(np.sort(rng.choice(np.linspace(-2, 3, 101), kf, replace=False)), random_pmf(rng, kf))
        G = dens.DiscreteDensity(np.sort(rng.choice(np.linspace(-2, 3, 101), kg, replace=False)), random_pmf(rng, kg))
        base = cdf.ks_distance(F, G)
        for fmap in maps:
            moved = cdf.ks_distance(cdf.transform(F, fmap), cdf.transform(G, fmap))
            check(abs(moved - base) <= t_inv, f"pair {i}, {fmap.name}: {moved!r} vs {base!r}")
    u01 = dens.uniform(0.0, 1.0)
    prev = math.inf
    for n in range(2, 257):
        ks = cdf.ks_distance(u01, dens.discretize(u01, dens.midpoint_grid(0.0, 1.0, n)))
        check(abs(ks - 1 / (2 * n)) <= t_disc, f"N={n}: KS {ks!r} vs {1 / (2 * n)!r}")
        check(ks < prev, f"N={n}: KS not strictly decreasing")
        prev = ks
    f, g = dens.normal(0.0, 1.0), dens.normal(1.0, 1.0)
    before = cdf.l2_density_distance(f, g)
    cube = cdf.cubic_map()
    after = cdf.l2_density_distance(cdf.transform(f, cube), cdf.transform(g, cube))
    change = abs(after - before) / before
    check(change > 0.10, f"L2 changed by only {change:.1%} under x^3 + x")
    return SuiteResult("ks_properties", "KS invariance and discretization robustness; L2 not invariant",
                       check.count == 0, failures=check.failures, notes=[f"L2 change under x^3+x: {change:.1%}"])


def estimation_specs() -> list:
    uniform6 = dens.DiscreteDensity(np.arange(6.0), np.full(6, 1 / 6))
    return [
        dv.DistanceSpec.pearson(),
        dv.DistanceSpec.neyman(),
        dv.DistanceSpec.symmetric(),
        dv.DistanceSpec.blended(0.3),
        dv.DistanceSpec("generalized_chisq", denominator=uniform6),
        dv.DistanceSpec("kl"),
        dv.DistanceSpec("squared_hellinger"),
        dv.DistanceSpec.bwhd(0.5),
        dv.DistanceSpec.power(-2.0),
        dv.DistanceSpec.power(-0.5),
        dv.DistanceSpec.power(0.0),
        dv.DistanceSpec.power(2 / 3),
        dv.DistanceSpec.power(1.0),
    ]


SWEEP_EPSILONS = tuple(round(0.01 * i, 2) for i in range(1, 11))


def estimation_robustness(seed: int = 0, tol: float | None = None) -> SuiteResult:
    t = _pick(tol, 1e-5)
    rng = _rng(seed, 9)
    check = _Checker()
    family = dens.binomial_family(5)
    specs = estimation_specs()
    for i in range(50):
        p0 = float(rng.uniform(0.02, 0.98))
        target = family([p0])
        for spec in specs:
            fit = min_distance_fit(target, family, spec)
            err = abs(float(fit.theta_hat[0]) - p0)
            check(err <= t, f"target {i} (p={p0:.4f}), {spec.label}: error {err:.2e}")
    clean = family([0.3])
    trio = [dv.DistanceSpec.pearson(), dv.DistanceSpec.neyman(), dv.DistanceSpec.symmetric()]
    rows = contamination_sweep(clean, family, trio, 5.0, SWEEP_EPSILONS)
    shift = {(r.spec, r.epsilon): r.shift for r in rows}
    notes = []
    for eps in SWEEP_EPSILONS:
        p, n, s = shift[("pearson_chisq", eps)], shift[("neyman_chisq", eps)], shift[("symmetric_chisq", eps)]
        check(n <= p, f"eps={eps}: Neyman shift {n:.4g} > Pearson shift {p:.4g}")
        if not n <= s <= p:
            notes.append(f"warning: eps={eps}: S2 shift {s:.4g} not between Neyman {n:.4g} and Pearson {p:.4g}")
    return SuiteResult("estimation", "self-fit recovery; Neyman no less robust than Pearson",
                       check.count == 0, failures=check.failures, notes=notes)


SUITES = (
    ("1", s2_metric),
    ("2", hellinger_sandwich),
    ("3", sup_characterization),
    ("4", optimization_forms),
    ("5", bayes_risk_identity),
    ("6", power_collapses),
    ("7", quadratic_forms),
    ("8", ks_properties),
    ("9", estimation_robustness),
)


def run_suite(func, seed: int = 0, tol: float | None = None) -> SuiteResult:
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = func(seed, tol)
    result.seconds = time.perf_counter() - start
    return result


def run_all(seed: int = 0, tol: float | None = None) -> list[SuiteResult]:
    return [run_suite(func, seed, tol) for _, func in SUITES]
