"""Reading and writing densities, samples and continuous-distribution specs.

Density files are CSV with header ``t,mass``; sample files hold one number
per line; continuous laws are JSON objects such as
``{"distribution": "normal", "loc": 0, "scale": 1}``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .densities import (
    ContinuousDistribution,
    DiscreteDensity,
    Sample,
    empirical_density,
    make_density,
    normal,
    uniform,
)
from .errors import InputError


class ParseError(InputError):
    pass


def read_density(path, renormalize: bool = False) -> DiscreteDensity:
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "mass"]:
            raise ParseError(f"{path}: expected header 't,mass', got {header!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}: row {lineno} has {len(row)} fields, expected 2")
            try:
                t, mass = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"{path}: row {lineno} is not numeric: {','.join(row)!r}") from None
            if not (math.isfinite(t) and math.isfinite(mass)):
                raise ParseError(f"{path}: row {lineno} contains a non-finite value")
            if mass < 0:
                raise ParseError(f"{path}: row {lineno} has negative mass {mass!r}")
            rows.append((t, mass, lineno))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    rows.sort()
    for (a, _, la), (b, _, lb) in zip(rows, rows[1:]):
        if a == b:
            raise ParseError(f"{path}: rows {la} and {lb} repeat support point {a!r}")
    try:
        return make_density([r[0] for r in rows], [r[1] for r in rows], renormalize=renormalize)
    except InputError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_density(density: DiscreteDensity, path) -> None:
    """Write with ``repr`` floats so a re-read is bit-identical."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "mass"])
        for t, m in zip(density.support.tolist(), density.masses.tolist()):
            writer.writerow([repr(t), repr(m)])


def read_sample(path) -> Sample:
    path = Path(path)
    values = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise ParseError(f"{path}: line {lineno} is not a number: {text!r}") from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: line {lineno} is not finite")
            values.append(v)
    if not values:
        raise ParseError(f"{path}: empty sample")
    return Sample(tuple(values))


def read_continuous(path) -> ContinuousDistribution:
    path = Path(path)
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return continuous_from_spec(spec, str(path))


def continuous_from_spec(spec: dict, where: str = "spec") -> ContinuousDistribution:
    if not isinstance(spec, dict) or "distribution" not in spec:
        raise ParseError(f"{where}: expected an object with a 'distribution' key")
    name = spec["distribution"]
    params = {k: v for k, v in spec.items() if k != "distribution"}
    try:
        if name == "uniform":
            return uniform(float(params.get("low", 0.0)), float(params.get("high", 1.0)))
        if name == "normal":
            return normal(float(params.get("loc", 0.0)), float(params.get("scale", 1.0)))
        import scipy.stats

        family = getattr(scipy.stats, name, None)
        if not isinstance(family, scipy.stats.rv_continuous):
            raise ParseError(f"{where}: unknown continuous distribution {name!r}")
        return ContinuousDistribution.from_scipy(family(**params), name)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: bad parameters for {name!r}: {exc}") from None


def load(path):
    """Density for ``.csv``, continuous law for ``.json``, else a sample file
    turned into its empirical density."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return read_density(path)
    if suffix == ".json":
        return read_continuous(path)
    return empirical_density(read_sample(path))
