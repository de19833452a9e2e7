"""Command line entry point.

    radondemon xd --d 2 --samples 1000000 --seed 42
    radondemon demon --n 5 --samples 1000000
    radondemon equiv --d 4 --samples 100000
    radondemon exact --id P52
    radondemon asym --n 20 --k 2
    radondemon census --points square.csv
    radondemon gale --points cloud.csv --out dual.csv
    radondemon couple-verify --n 7 --d 3 --samples 100000
    radondemon table1 --samples 100000

Exit codes: 0 success, 2 usage error, 3 degenerate input or other numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import census as census_mod
from .coupling import CouplingReport, verify_coupling
from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    InvalidDistributionError,
    UnknownIdentifierError,
)
from .estimator import (
    DEFAULT_CI_LEVEL,
    DEFAULT_SEED,
    TABLE1,
    DemonEstimate,
    EstimateResult,
    compare_distributions,
    default_workers,
    estimate_pnk,
    estimate_xd_demon,
    estimate_xd_geometric,
)
from .geometry import PointCloud, gale_dual
from .numerics import DEFAULT_TOL, RngStream
from .youden import (
    SplitDistribution,
    asymptotic_pnk,
    asymptotic_xd_tail,
    closed_form,
    known_identifiers,
)

SCHEMA_VERSION = "1"
SIGNIFICANT_DIGITS = 12
DEFAULT_TABLE1_SAMPLES = 100_000

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _num(x):
    """Round floats to the report precision; leave everything else alone."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def estimate_payload(result: EstimateResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": result.method,
        "d": result.d,
        "samples": result.samples,
        "seed": result.seed,
        "workers": result.workers,
        "counts": result.counts,
        "mass": result.mass,
        "ci_level": result.ci_level,
        "ci": {k: list(v) for k, v in result.ci.items()},
        "rejections": result.rejections,
        "wall_time_s": result.wall_time,
    }


def demon_payload(result: DemonEstimate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": result.method,
        "n": result.n,
        "samples": result.samples,
        "seed": result.seed,
        "workers": result.workers,
        "counts": result.counts,
        "mass": result.frequency,
        "ci_level": result.ci_level,
        "ci": {k: list(v) for k, v in result.ci.items()},
        "rejections": result.rejections,
        "wall_time_s": result.wall_time,
    }


def census_payload(c: census_mod.SeparationCensus) -> dict:
    radon, affine, linear = c.counts()
    expected = census_mod.cover_counts(c.n, c.dim) if c.n >= 1 and c.dim >= 1 else (0, 0, 0)
    return {
        "schema_version": SCHEMA_VERSION,
        "method": "census",
        "n": c.n,
        "d": c.dim,
        "counts": {"radon": radon, "affine": affine, "linear": linear},
        "cover_counts": dict(zip(("radon", "affine", "linear"), expected)),
        "radon": sorted(str(p) for p in c.radon),
        "affine": sorted(str(p) for p in c.affine),
        "linear": sorted(str(p) for p in c.linear),
    }


def coupling_payload(r: CouplingReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": "couple-verify",
        "n": r.n,
        "d": r.d,
        "draws": r.draws,
        "max_inner_product": r.max_inner_product,
        "max_gram_error": r.max_gram_error,
        "coordinate_variance": r.coordinate_variance,
        "target_variance": r.target_variance,
        "cross_covariance": r.cross_covariance,
        "target_covariance": r.target_covariance,
        "coordinate_skewness": r.coordinate_skewness,
        "sign_agreement": r.sign_agreement,
        "census_draws": r.census_draws,
        "census_pass_rate": r.census_pass_rate,
    }


def _payload(result) -> dict:
    if isinstance(result, EstimateResult):
        return estimate_payload(result)
    if isinstance(result, DemonEstimate):
        return demon_payload(result)
    if isinstance(result, census_mod.SeparationCensus):
        return census_payload(result)
    if isinstance(result, CouplingReport):
        return coupling_payload(result)
    if isinstance(result, dict):
        return {"schema_version": SCHEMA_VERSION, **result}
    raise TypeError(f"cannot report {type(result).__name__}")


def _rows(result):
    if isinstance(result, (EstimateResult, DemonEstimate)):
        mass = result.mass if isinstance(result, EstimateResult) else result.frequency
        return ["k", "count", "mass", "ci_lo", "ci_hi"], [
            [k, result.counts[k], mass[k], result.ci[k][0], result.ci[k][1]] for k in result.counts
        ]
    payload = _payload(result)
    return ["field", "value"], [[k, json.dumps(_num(v), sort_keys=True)] for k, v in sorted(payload.items())]


def emit_report(result, fmt: str = "json") -> bytes:
    """Serialise a run result deterministically (sorted keys, 12 significant digits)."""
    if fmt == "json":
        text = json.dumps(_num(_payload(result)), sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        header, rows = _rows(result)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(_num(v))
    return v


def parse_csv_report(text: str, d: int) -> SplitDistribution:
    """Inverse of the CSV form of an ``X_d`` estimate."""
    rows = list(csv.DictReader(io.StringIO(text)))
    counts = {int(r["k"]): int(r["count"]) for r in rows}
    total = sum(counts.values())
    return SplitDistribution(d, {k: float(r["mass"]) for k, r in zip(counts, rows)}, total)


def _write(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data)


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def _positive(args, *names):
    for name in names:
        value = getattr(args, name)
        if value is not None and value < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive, got {value}")


def cmd_xd(args):
    _require(args, "d")
    if args.d < 2:
        raise UsageError("--d must be at least 2")
    return estimate_xd_geometric(args.d, args.samples, args.seed, args.workers, args.ci_level, args.tol)


def cmd_demon(args):
    if args.n is None and args.d is not None:
        args.n = args.d + 2
    _require(args, "n")
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    return estimate_pnk(args.n, args.samples, args.seed, args.workers, args.ci_level)


def cmd_equiv(args):
    _require(args, "d")
    if args.d < 2:
        raise UsageError("--d must be at least 2")
    geo = estimate_xd_geometric(args.d, args.samples, args.seed, args.workers, args.ci_level, args.tol)
    dem = estimate_xd_demon(args.d, args.samples, args.seed, args.workers, args.ci_level)
    tv, chi2 = compare_distributions(dem.distribution, geo.distribution)
    return {
        "method": "equiv",
        "d": args.d,
        "samples": args.samples,
        "seed": args.seed,
        "workers": args.workers,
        "tv": tv,
        "chi_square": chi2,
        "geometric": {k: v for k, v in estimate_payload(geo).items() if k != "schema_version"},
        "demon": {k: v for k, v in estimate_payload(dem).items() if k != "schema_version"},
    }


def cmd_exact(args):
    if args.id is None:
        return {"method": "exact", "values": {i: _exact_entry(i) for i in known_identifiers()}}
    return {"method": "exact", **_exact_entry(args.id)}


def _exact_entry(identifier):
    value = closed_form(identifier)
    return {"id": value.identifier, "value": value.value, "closed_form": value.closed_form}


def cmd_asym(args):
    if args.d is not None:
        if args.d < 1:
            raise UsageError("--d must be positive")
        tail = asymptotic_xd_tail(args.d)
        return {"method": "asym", "d": args.d, "pr_xd_eq_1": tail, "pr_convex_position": 1 - tail}
    _require(args, "n", "k")
    if not 1 <= args.k <= args.n - 1:
        raise UsageError("need 1 <= k <= n - 1")
    return {"method": "asym", "n": args.n, "k": args.k, "value": asymptotic_pnk(args.n, args.k)}


def _load_or_sample(args) -> PointCloud:
    if args.points is not None:
        cloud = PointCloud.read_csv(args.points)
        if args.n is not None and args.n != cloud.n:
            raise UsageError(f"--n {args.n} disagrees with {cloud.n} points in {args.points}")
        if args.d is not None and args.d != cloud.dim:
            raise UsageError(f"--d {args.d} disagrees with dimension {cloud.dim} in {args.points}")
        return cloud
    _require(args, "n", "d")
    rng = RngStream(args.seed, 0)
    return PointCloud(rng.normal((args.n, args.d)))


def cmd_census(args):
    cloud = _load_or_sample(args)
    if cloud.n > census_mod.MAX_POINTS:
        raise UsageError(f"census is limited to {census_mod.MAX_POINTS} points")
    return census_mod.enumerate_separations(cloud)


def cmd_gale(args):
    cloud = _load_or_sample(args)
    dual = gale_dual(cloud, args.tol)
    return dual.to_csv().encode("utf-8")


def cmd_couple_verify(args):
    _require(args, "n", "d")
    if not 1 <= args.d <= args.n - 2:
        raise UsageError("need 1 <= d <= n - 2")
    return verify_coupling(args.n, args.d, args.samples, RngStream(args.seed, 0))


def cmd_table1(args):
    samples = args.samples if args.samples_given else DEFAULT_TABLE1_SAMPLES
    rows = {}
    for d, published in TABLE1.items():
        est = estimate_xd_geometric(d, samples, args.seed, args.workers, args.ci_level, args.tol)
        rows[d] = {
            "counts": est.counts,
            "mass": est.mass,
            "ci": {k: list(v) for k, v in est.ci.items()},
            "published": published,
            "max_abs_diff": max(abs(est.mass[k] - published[k]) for k in published),
            "rejections": est.rejections,
        }
    return {"method": "table1", "samples": samples, "seed": args.seed, "workers": args.workers, "rows": rows}


COMMANDS = {
    "xd": (cmd_xd, "estimate the law of X_d from Gaussian Radon partitions"),
    "demon": (cmd_demon, "estimate P(n, k), the above-mean count law"),
    "equiv": (cmd_equiv, "estimate X_d both ways and compare"),
    "exact": (cmd_exact, "closed-form values"),
    "asym": (cmd_asym, "asymptotic P(n, k), or the X_d = 1 tail with --d"),
    "census": (cmd_census, "enumerate Radon partitions and separations"),
    "gale": (cmd_gale, "Gale dual of a CSV point cloud"),
    "couple-verify": (cmd_couple_verify, "check the Gaussian Gale-dual coupling"),
    "table1": (cmd_table1, "reproduce the empirical X_d table"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--ci-level", type=float, default=DEFAULT_CI_LEVEL)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--points", help="point cloud CSV: 'n,dim' header, then one point per row")
    common.add_argument("--id", help=f"closed-form identifier ({', '.join(known_identifiers())})")

    parser = _Parser(prog="radondemon", description="Radon partitions of Gaussian points and the above-mean count law.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.samples_given = args.samples is not None
        if args.samples is None:
            args.samples = 100_000
        if args.workers is None:
            args.workers = default_workers()
        _positive(args, "samples", "workers")
        if not 0 < args.ci_level < 1:
            raise UsageError("--ci-level must lie in (0, 1)")
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        if args.seed < 0:
            raise UsageError("--seed must be nonnegative")
        handler = COMMANDS[args.command][0]
        result = handler(args)
        data = result if isinstance(result, bytes) else emit_report(result, args.format)
        _write(data, args.out)
        return EXIT_OK
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, UnknownIdentifierError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateInputError, InvalidDistributionError, DimensionMismatchError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FileNotFoundError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
