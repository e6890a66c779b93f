"""Command-line frontend: ``statdist <command> ...``.

Exit codes: 0 success, 1 selftest failure, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import cdf_distances, quadratic, residuals, suites
from .densities import DiscreteDensity, binomial_family, contaminate, poisson_family, two_point_family
from .divergences import FAMILIES, DistanceSpec, distance
from .errors import InputError, NumericalFailure
from .estimation import FitOptions, contamination_sweep, min_distance_fit, write_sweep_csv
from .io import load, read_density, write_density

EXIT_OK, EXIT_SELFTEST, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def _family_name(text: str) -> str:
    name = text.replace("-", "_")
    aliases = {"pearson": "pearson_chisq", "neyman": "neyman_chisq", "symmetric": "symmetric_chisq",
               "blended": "blended_chisq", "power": "power_divergence", "hellinger": "squared_hellinger"}
    name = aliases.get(name, name)
    if name not in FAMILIES:
        raise InputError(f"unknown distance family {text!r}; choose from {', '.join(FAMILIES)}")
    return name


def _spec(family: str, lam, alpha, denominator) -> DistanceSpec:
    name = _family_name(family)
    denom = read_density(denominator) if (name == "generalized_chisq" and denominator) else None
    return DistanceSpec(name, lam=lam, alpha=alpha, denominator=denom)


def _add_spec_flags(p: argparse.ArgumentParser, default: str = "symmetric-chisq") -> None:
    p.add_argument("--family", default=default, help="distance family, e.g. pearson-chisq, power-divergence, bwhd")
    p.add_argument("--lam", type=float, help="lambda for power-divergence")
    p.add_argument("--alpha", type=float, help="blend weight for blended-chisq and bwhd")
    p.add_argument("--denominator", help="density CSV used as the denominator of generalized-chisq")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("binomial", "poisson", "two-point"), default="binomial")
    p.add_argument("--trials", type=int, default=5, help="binomial trials / poisson truncation point")
    p.add_argument("--bounds", type=float, nargs=2, metavar=("LO", "HI"), help="parameter box")
    p.add_argument("--grid-points", type=int, default=64)
    p.add_argument("--fallback-blend", action="store_true",
                   help="refit with blended chi-squared (alpha=0.99) when every model is infinitely far")


def _model(args):
    bounds = args.bounds
    if bounds is not None and not bounds[0] < bounds[1]:
        raise InputError("--bounds needs LO < HI")
    if args.model == "binomial":
        return binomial_family(args.trials, *(bounds or (0.0, 1.0)))
    if args.model == "poisson":
        return poisson_family(args.trials, *(bounds or (1e-6, 50.0)))
    return two_point_family(*(bounds or (0.0, 1.0)))


def _discrete(obj, path) -> DiscreteDensity:
    if not isinstance(obj, DiscreteDensity):
        raise InputError(f"{path}: expected a density CSV or a sample file")
    return obj


def _dump(args, named: dict) -> None:
    if not args.dump_inputs:
        return
    out = Path(args.dump_inputs)
    out.mkdir(parents=True, exist_ok=True)
    for name, obj in named.items():
        if isinstance(obj, DiscreteDensity):
            write_density(obj, out / f"{name}.csv")


def _csv_rows(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _cell(v):
    v = _jsonable(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def _flat_csv(report: dict) -> str:
    keys = sorted(report)
    return _csv_rows(keys, [[report[k] for k in keys]])


def cmd_distance(args):
    tau = _discrete(load(args.first), args.first)
    m = _discrete(load(args.second), args.second)
    _dump(args, {"first": tau, "second": m})
    spec = _spec(args.family, args.lam, args.alpha, args.denominator)
    value = distance(tau, m, spec)
    report = {"family": spec.family, "params": spec.params(), "value": value, "finite": math.isfinite(value)}
    return report, None


def cmd_residuals(args):
    tau = _discrete(load(args.first), args.first)
    m = _discrete(load(args.second), args.second)
    _dump(args, {"first": tau, "second": m})
    rv = residuals.RESIDUALS[args.kind](tau, m)
    report = {"kind": rv.kind, "t": rv.support, "residual": rv.values, "range": list(rv.range)}
    table = _csv_rows(["t", "residual"], zip(rv.support.tolist(), rv.values.tolist()))
    return report, table


def _fit_options(args) -> FitOptions:
    return FitOptions(grid_points=args.grid_points, fallback_blend=args.fallback_blend)


def cmd_fit(args):
    data = _discrete(load(args.data), args.data)
    _dump(args, {"data": data})
    family = _model(args)
    spec = _spec(args.family, args.lam, args.alpha, args.denominator)
    result = min_distance_fit(data, family, spec, _fit_options(args))
    report = result.to_dict()
    report["model"] = family.name
    return report, None


def cmd_sweep(args):
    family = _model(args)
    if args.clean:
        clean = _discrete(load(args.clean), args.clean)
    else:
        clean = family([args.theta])
    _dump(args, {"clean": clean, "contaminated_max": contaminate(clean, args.point, max(args.epsilons))})
    specs = [_spec(f, args.lam, args.alpha, args.denominator) for f in args.families]
    rows = contamination_sweep(clean, family, specs, args.point, args.epsilons, _fit_options(args))
    report = {"model": family.name, "point": args.point,
              "rows": [{"spec": r.spec, "epsilon": r.epsilon, "theta_hat": r.theta_hat, "shift": r.shift,
                        "converged": r.converged, **({"error": r.error} if r.error else {})} for r in rows]}
    buf = _io.StringIO()
    write_sweep_csv(rows, buf)
    return report, buf.getvalue()


def cmd_smooth_distance(args):
    F, G = load(args.first), load(args.second)
    _dump(args, {"first": F, "second": G})
    k = quadratic.SmoothingKernel(args.kernel, args.bandwidth)
    if args.measure == "pearson":
        value = quadratic.smoothed_pearson(F, G, k)
    elif args.measure == "hellinger":
        value = quadratic.smoothed_squared_hellinger(F, G, k)
    else:
        if args.alpha is None:
            raise InputError("--measure bwhd needs --alpha")
        value = quadratic.smoothed_bwhd(F, G, k, args.alpha)
    report = {"measure": args.measure, "kernel": args.kernel, "bandwidth": args.bandwidth,
              "value": value, "finite": math.isfinite(value)}
    if args.alpha is not None:
        report["alpha"] = args.alpha
    return report, None


def cmd_ks(args):
    F, G = load(args.first), load(args.second)
    _dump(args, {"first": F, "second": G})
    return {"ks": cdf_distances.ks_distance(F, G)}, None


def cmd_selftest(args):
    results = []
    lines = []
    for key, func in suites.SUITES:
        r = suites.run_suite(func, args.seed, args.tol)
        results.append(r)
        lines.append(f"[{key}] {r.line()}")
        lines.extend(f"      - {msg}" for msg in r.failures)
        lines.extend(f"      * {msg}" for msg in r.notes)
    passed = all(r.passed for r in results)
    lines.append(f"seed {args.seed}: {'all suites passed' if passed else 'FAILED'}")
    return "\n".join(lines) + "\n", (EXIT_OK if passed else EXIT_SELFTEST)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of standard output")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--dump-inputs", metavar="DIR", help="write parsed input densities as CSV into DIR")

    parser = argparse.ArgumentParser(prog="statdist", description="Statistical distances between discrete and "
                                     "continuous distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", parents=[common], help="distance between two densities")
    p.add_argument("first")
    p.add_argument("second")
    _add_spec_flags(p)
    p.set_defaults(handler=cmd_distance)

    p = sub.add_parser("residuals", parents=[common], help="residual vector of the first density against the second")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--kind", choices=sorted(residuals.RESIDUALS), default="pearson")
    p.set_defaults(handler=cmd_residuals)

    p = sub.add_parser("fit", parents=[common], help="minimum-distance fit of a parametric model")
    p.add_argument("data")
    _add_spec_flags(p)
    _add_model_flags(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("sweep", parents=[common], help="estimate drift under point contamination")
    p.add_argument("clean", nargs="?", help="clean density CSV; defaults to the model at --theta")
    p.add_argument("--theta", type=float, default=0.3)
    p.add_argument("--point", type=float, default=5.0)
    p.add_argument("--epsilons", type=float, nargs="+", default=list(suites.SWEEP_EPSILONS))
    p.add_argument("--families", nargs="+", default=["pearson-chisq", "neyman-chisq", "symmetric-chisq"])
    p.add_argument("--lam", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--denominator")
    _add_model_flags(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("smooth-distance", parents=[common], help="distance between kernel-smoothed laws")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--measure", choices=("pearson", "bwhd", "hellinger"), default="pearson")
    p.add_argument("--kernel", choices=("gaussian", "uniform"), default="gaussian")
    p.add_argument("--bandwidth", type=float, default=0.5)
    p.add_argument("--alpha", type=float)
    p.set_defaults(handler=cmd_smooth_distance)

    p = sub.add_parser("ks", parents=[common], help="Kolmogorov-Smirnov distance")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=cmd_ks)

    p = sub.add_parser("selftest", parents=[common], help="run the seeded property suites")
    p.add_argument("--tol", type=float, help="replace every suite tolerance (for checking that failures surface)")
    p.set_defaults(handler=cmd_selftest)
    return parser


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            text, code = args.handler(args)
            _emit(text, args)
            return code
        report, table = args.handler(args)
        if args.format == "csv":
            text = table if table is not None else _flat_csv(report)
        else:
            text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
        _emit(text, args)
        return EXIT_OK
    except (InputError, OSError) as exc:
        print(f"statdist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"statdist: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
