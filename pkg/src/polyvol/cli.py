"""Command-line interface.

Polytope files are plain text::

    # comment
    m d
    a_11 ... a_1d b_1
    ...
    a_m1 ... a_md b_m

and describe ``{x | a_i . x <= b_i}``.  Exit codes: 0 success, 1 bad
input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .errors import NumericalError
from .generators import parse_spec
from .geometry import HPolytope
from .lp import chebyshev_ball
from .rng import entropy_seed
from .volume import VolumeParams, estimate_with_statistics
from .walks import ORACLES, VARIANTS, WalkParams

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
DEFAULT_ROUNDING = 1.5
TIMING_FIELDS = ("elapsed",)


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def parse_polytope(text: str) -> HPolytope:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise ParseError(lineno, f"not a number in {line!r}") from None
        if header is None:
            if len(values) != 2 or not all(v.is_integer() and v >= 0 for v in values):
                raise ParseError(lineno, "header must be two non-negative integers 'm d'")
            header = (int(values[0]), int(values[1]))
            if header[1] < 1:
                raise ParseError(lineno, "dimension must be at least 1")
            continue
        m, d = header
        if len(rows) == m:
            raise ParseError(lineno, f"more than the {m} rows announced in the header")
        if len(values) != d + 1:
            raise ParseError(lineno, f"expected {d + 1} numbers, found {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise ParseError(lineno, "entries must be finite")
        rows.append(values)
    if header is None:
        raise ParseError(0, "empty input")
    if len(rows) != header[0]:
        raise ParseError(lineno if text else 0,
                         f"header announces {header[0]} rows, found {len(rows)}")
    M = np.array(rows, dtype=float).reshape(header[0], header[1] + 1)
    return HPolytope(M[:, :-1], M[:, -1])


def format_polytope(P: HPolytope) -> str:
    lines = [f"{P.n_facets} {P.dim}"]
    for a, b in zip(P.A, P.b):
        lines.append(" ".join(f"{x:.17g}" for x in (*a, b)))
    return "\n".join(lines) + "\n"


def read_polytope(path: str) -> HPolytope:
    with open(path) as fh:
        return parse_polytope(fh.read())


def write_polytope(P: HPolytope, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_polytope(P))


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse would otherwise exit with 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", metavar="PATH", help="polytope file")
    src.add_argument("--generate", metavar="KIND:PARAMS",
                     help="built-in polytope, e.g. cube:10, cross:10, simplex:10, product:5, "
                          "skinny-cube:10, rh:8,25[,seed], birkhoff:5")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyvol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the volume")
    _add_source(est)
    est.add_argument("--epsilon", type=_positive(float), default=1.0)
    est.add_argument("--walk", choices=VARIANTS, default="cdhr")
    est.add_argument("--walk-len", type=_positive(int), default=None)
    est.add_argument("--oracle", choices=ORACLES, default="facet")
    est.add_argument("--round", nargs="?", type=float, const=DEFAULT_ROUNDING, default=None,
                     metavar="T_R", help=f"enable rounding (threshold default {DEFAULT_ROUNDING})")
    est.add_argument("--seed", type=_seed, default=None)
    est.add_argument("--repeat", type=_positive(int), default=1)
    est.add_argument("--parallel", type=_positive(int), default=1)
    est.add_argument("--exact-volume", type=_positive(float), default=None)
    est.add_argument("--json", metavar="PATH")
    est.add_argument("--csv", metavar="PATH")

    cheb = sub.add_parser("chebyshev", help="largest inscribed ball")
    _add_source(cheb)
    cheb.add_argument("--json", metavar="PATH")

    gen = sub.add_parser("generate", help="write a built-in polytope in file format")
    gen.add_argument("spec", metavar="KIND:PARAMS")
    gen.add_argument("-o", "--output", metavar="PATH")
    return parser


def _load(args) -> tuple[HPolytope, str, float | None]:
    if args.file is not None:
        return read_polytope(args.file), args.file, None
    spec = parse_spec(args.generate)
    return spec.build(), spec.name, spec.exact_volume



def _round_timing(obj):
    if isinstance(obj, dict):
        return {k: (round(v, 3) if k in TIMING_FIELDS else _round_timing(v)) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_timing(v) for v in obj]
    return obj


def estimate_report(args, P: HPolytope, name: str, exact: float | None):
    if args.exact_volume is not None:
        exact = args.exact_volume
    seed = args.seed if args.seed is not None else entropy_seed()
    params = VolumeParams(
        epsilon=args.epsilon,
        walk=WalkParams(args.walk, args.walk_len, args.oracle),
        rounding=args.round,
        seed=seed,
    )
    stats = estimate_with_statistics(P, params, args.repeat, exact, args.parallel)
    report = {
        "polytope": {"name": name, "dim": P.dim, "facets": P.n_facets},
        "params": {"epsilon": args.epsilon, "walk": args.walk, "walk_length": args.walk_len,
                   "oracle": args.oracle, "rounding": args.round, "repeat": args.repeat},
        "seed": seed,
        "statistics": stats.to_dict(),
    }
    return stats, _round_timing(report)


def _print_summary(report, out):
    st = report["statistics"]
    poly = report["polytope"]
    print(f"polytope  {poly['name']}  (d={poly['dim']}, m={poly['facets']})", file=out)
    print(f"seed      {report['seed']}", file=out)
    for i, r in enumerate(st["runs"]):
        print(f"run {i:<4d}  volume {r['volume']:.6e}  N={r['n_samples']} W={r['walk_length']} "
              f"phases={r['beta'] - r['alpha']}  {r['elapsed']:.3f}s", file=out)
    for f in st["failures"]:
        print(f"run {f['repetition']:<4d}  FAILED  {f['error']}", file=out)
    print(f"mean {st['mean']:.6e}  min {st['min']:.6e}  max {st['max']:.6e}  "
          f"std {st['std']:.6e}  spread {st['spread']:.4f}", file=out)
    if st["exact_volume"] is not None:
        print(f"exact {st['exact_volume']:.6e}  relative error {st['rel_error']:.4f}", file=out)


CSV_FIELDS = ("repetition", "volume", "log_volume", "n_samples", "walk_length", "walk",
              "alpha", "beta", "det_correction", "rounding_iterations", "elapsed", "rel_error")


def write_csv(report, path: str) -> None:
    st = report["statistics"]
    exact = st["exact_volume"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, extrasaction="ignore")
        w.writeheader()
        for i, r in enumerate(st["runs"]):
            row = dict(r, repetition=i)
            row["rel_error"] = "" if exact is None else (exact - r["volume"]) / exact
            w.writerow(row)


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            spec = parse_spec(args.spec)
            text = format_polytope(spec.build())
            if args.output:
                with open(args.output, "w") as fh:
                    fh.write(text)
            else:
                out.write(text)
            return EXIT_OK
        P, name, exact = _load(args)
        if args.command == "chebyshev":
            ball = chebyshev_ball(P)
            print("center " + " ".join(f"{x:.17g}" for x in ball.center), file=out)
            print(f"radius {ball.radius:.17g}", file=out)
            if args.json:
                _dump_json({"center": ball.center.tolist(), "radius": ball.radius}, args.json)
            return EXIT_OK
        if args.round is not None and not args.round > 1:
            raise ValueError("rounding threshold must exceed 1")
        stats, report = estimate_report(args, P, name, exact)
        _print_summary(report, out)
        if args.json:
            _dump_json(report, args.json)
        if args.csv:
            write_csv(report, args.csv)
        return EXIT_NUMERIC if stats.failures else EXIT_OK
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
