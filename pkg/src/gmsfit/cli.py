"""
Command line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical or
runtime failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, RuntimeLimit
from .excursion import tau_pmf_table
from .fitness_law import ModelParams, cdf, mean, mean_half, pdf
from .gms_sim import SimConfig, run_full_simulation
from .hypergeom import SeriesControl, hyp2f1
from .stats import EmpiricalDistribution, histogram
from .validation import validate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str = "-"
    precision: int = 12

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.format}")
        if self.precision < 6:
            raise DomainError(f"precision must be >= 6, got {self.precision}")

    def num(self, x) -> str:
        if x is None:
            return ""
        if isinstance(x, (int, np.integer)):
            return str(int(x))
        return format(float(x), f".{self.precision}g")

    @contextlib.contextmanager
    def open(self):
        if self.path == "-":
            yield sys.stdout
        else:
            with open(self.path, "w", newline="") as fh:
                yield fh

    def write_table(self, header: list[str], rows) -> None:
        rows = [[self.num(v) for v in row] for row in rows]
        with self.open() as fh:
            if self.format == "csv":
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
            else:
                # Formatted numbers are re-parsed so json carries the same digits as csv.
                objs = [{h: (json.loads(v) if v else None) for h, v in zip(header, row)}
                        for row in rows]
                json.dump(objs, fh, indent=2)
                fh.write("\n")


def _probability(text: str) -> float:
    value = float(text)
    if not (0.0 < value <= 0.5):
        raise argparse.ArgumentTypeError(f"--p must satisfy 0 < p <= 0.5 (got {value})")
    return value


def _positive_int(name: str):
    def parse(text: str) -> int:
        value = int(text)
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1 (got {value})")
        return value
    return parse


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("--m values must be integers >= 1")
    return values


def _add_output(parser: argparse.ArgumentParser, default_format: str = "csv") -> None:
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=default_format)
    parser.add_argument("--precision", type=int, default=12,
                        help="significant digits (>= 6)")


def _add_series(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rel-tol", type=float, default=SeriesControl.rel_tol)
    parser.add_argument("--max-terms", type=int, default=SeriesControl.max_terms)
    parser.add_argument("--switch", type=float, default=SeriesControl.boundary_switch,
                        help="z above which the Euler transform is used")


def _series(args) -> SeriesControl:
    return SeriesControl(args.rel_tol, args.max_terms, args.switch)


def _output(args) -> OutputSpec:
    return OutputSpec(args.format, args.out, args.precision)


def cmd_exact(args) -> int:
    params = ModelParams(args.p, args.m)
    ctrl = _series(args)
    ts = np.linspace(0.0, 1.0, args.grid)
    cdfs = cdf(params, ts, ctrl)
    pdfs = np.empty_like(ts)
    interior = (ts > 0.0) & (ts < 1.0)
    pdfs[interior] = pdf(params, ts[interior], ctrl)
    pdfs[0] = params.q if params.m == 1 else 0.0
    rows = [[t, c, d] for t, c, d in zip(ts[:-1], cdfs[:-1], pdfs[:-1])]
    rows.append([1.0, cdfs[-1], None])
    _output(args).write_table(["t", "cdf", "pdf"], rows)
    return EXIT_OK


def cmd_mean(args) -> int:
    ctrl = _series(args)
    rows = []
    for m in args.m:
        exact = mean(ModelParams(args.p, m), ctrl)
        rows.append([m, exact, mean_half(m) if args.p == 0.5 else None])
    _output(args).write_table(["m", "mean_exact", "mean_half_closed_form_if_p_half"], rows)
    return EXIT_OK


def cmd_tau(args) -> int:
    table = tau_pmf_table(ModelParams(args.p, args.m), args.kmax)
    rows = [[e.length, e.probability, c] for e, c in zip(table.entries, table.cumulative())]
    _output(args).write_table(["length", "probability", "cumulative"], rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = ModelParams(args.p, args.m)
    config = SimConfig(params, seed=args.seed, n_excursions=args.excursions,
                       n_steps=args.steps, workers=args.workers)
    records = run_full_simulation(config)
    out = _output(args)
    if args.mode == "records":
        rows = [[i, r.length, r.births, r.deaths, r.strongest_fitness]
                for i, r in enumerate(records)]
        out.write_table(["excursion_ordinal", "length", "births", "deaths",
                         "strongest_fitness"], rows)
    elif records:
        dist = EmpiricalDistribution.from_samples([r.strongest_fitness for r in records])
        out.write_table(["bin_left", "bin_right", "count", "frequency"],
                        histogram(dist, args.bins, 0.0, 1.0).rows())
    else:
        out.write_table(["bin_left", "bin_right", "count", "frequency"], [])
    exact = mean(params)
    if records:
        sample_mean = float(np.mean([r.strongest_fitness for r in records]))
        print(f"excursions={len(records)} sample_mean={sample_mean:.6f} "
              f"analytic_mean={exact:.6f} abs_gap={abs(sample_mean - exact):.6f}",
              file=sys.stderr)
    else:
        print(f"excursions=0 analytic_mean={exact:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    params = ModelParams(args.p, args.m)
    reports = validate(params, args.excursions, args.seed, alpha=args.threshold,
                       workers=args.workers, corrupt_cdf=args.corrupt_cdf)
    out = _output(args)
    with out.open() as fh:
        if out.format == "json":
            json.dump([r.to_dict() for r in reports], fh, indent=2)
            fh.write("\n")
        else:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["test", "statistic", "n", "p_value_bound", "passed"])
            for r in reports:
                writer.writerow([r.test, out.num(r.statistic), out.num(r.n),
                                 out.num(r.p_value_bound), str(r.passed).lower()])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_hyp(args) -> int:
    value = hyp2f1(args.a, args.b, args.c, args.z, _series(args))
    print(format(value, f".{args.precision}g"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmsfit",
        description="Strongest-individual fitness in the subcritical GMS(m) model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", aliases=["pdf"], help="cdf and pdf on a grid over [0, 1]")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--m", type=_positive_int("--m"), default=1)
    p.add_argument("--grid", type=int, default=101, help="grid points, t=1 included")
    _add_series(p)
    _add_output(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("mean", help="exact mean for one or more m")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--m", type=_int_list, default=[1], help="comma separated, e.g. 1,2,10")
    _add_series(p)
    _add_output(p)
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("tau", help="excursion length pmf table")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--m", type=_positive_int("--m"), default=1)
    p.add_argument("--kmax", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("simulate", help="event-by-event GMS(m) simulation")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--m", type=_positive_int("--m"), default=1)
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--excursions", type=_positive_int("--excursions"))
    size.add_argument("--steps", type=_positive_int("--steps"),
                      help="births and deaths to simulate")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=_positive_int("--workers"), default=1)
    p.add_argument("--mode", choices=("records", "histogram"), default="records")
    p.add_argument("--bins", type=_positive_int("--bins"), default=50)
    _add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="KS cross-validation of simulators and exact law")
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--m", type=_positive_int("--m"), default=1)
    p.add_argument("--excursions", type=_positive_int("--excursions"), default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.001,
                   help="minimum p-value for a test to pass")
    p.add_argument("--workers", type=_positive_int("--workers"), default=1)
    p.add_argument("--corrupt-cdf", action="store_true",
                   help="negative control: compare against the wrong law")
    _add_output(p, default_format="json")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hyp", help="evaluate 2F1(a, b; c; z)")
    for name in ("a", "b", "c", "z"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--precision", type=int, default=17)
    _add_series(p)
    p.set_defaults(func=cmd_hyp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tau" and args.kmax < args.m:
        parser.error(f"--kmax must be >= m={args.m} (got {args.kmax})")
    if args.command in ("exact", "pdf") and args.grid < 2:
        parser.error(f"--grid must be >= 2 (got {args.grid})")
    if getattr(args, "precision", 12) < 6:
        parser.error("--precision must be >= 6")
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, RuntimeLimit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
