"""Command-line entry point: ``lowlat-mpc {bench-mul,bench-nonlinear,bench-mlp}``.

Options may also come from a flat YAML or JSON file passed with
``--config``; keys are the long option names with dashes or underscores.
Explicit flags override the file.
"""
from __future__ import annotations

import argparse
import logging
import sys

import yaml

from .. import nonlinear
from ..config import ApproxConfig, SessionConfig, get_profile
from ..errors import MPCError
from .report import emit
from .runner import bench_mlp, bench_mul, bench_nonlinear, default_grid

log = logging.getLogger("lowlat_mpc")

METHOD_NAMES = {"naive": "naive", "multi": "multivariate"}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat YAML/JSON file of option values")
    p.add_argument("--parties", type=int, default=3)
    p.add_argument("--net", choices=["n_low", "n_med", "n_high", "custom"], default="n_med")
    p.add_argument("--latency-ms", type=float, default=None)
    p.add_argument("--bandwidth-gbps", type=float, default=None)
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--fxp-bits", type=int, default=16)
    p.add_argument("--ring-bits", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coalesce", choices=["on", "off"], default="on")
    p.add_argument("--exp-base", type=int, default=3)
    p.add_argument("--exp-iterations", type=int, default=8)
    p.add_argument("--log-order", type=int, default=8)
    p.add_argument("--log-iterations", type=int, default=2)
    p.add_argument("--reciprocal-iterations", type=int, default=10)
    p.add_argument("--trig-iterations", type=int, default=10)
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock compute time (makes reports non-reproducible)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowlat-mpc", description="Round, payload and latency benchmarks for the MPC engine.")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("bench-mul", help="sequential n-ary products, naive chain vs multivariate")
    _common(p)
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--method", choices=["naive", "multi"], default=None,
                   help="run one method only (default: both)")

    p = sub.add_parser("bench-nonlinear", help="accuracy and rounds of one nonlinear function")
    _common(p)
    p.add_argument("--function", choices=sorted(nonlinear.FUNCTIONS), default="exp")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--lo", type=float, default=None, help="grid start (default: domain start)")
    p.add_argument("--hi", type=float, default=None, help="grid end (default: domain end)")

    p = sub.add_parser("bench-mlp", help="secure inference of the bundled 8-16-3 MLP")
    _common(p)
    p.add_argument("--count", type=int, default=100)
    return parser


def load_config_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise SystemExit(f"{path}: expected a flat mapping of option names to values")
    return {str(k).replace("-", "_"): v for k, v in doc.items()}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = load_config_file(args.config)
        sub = parser.subcommands[args.command]
        known = set(vars(sub.parse_args([])))
        unknown = sorted(set(values) - known - {"command", "config"})
        if unknown:
            parser.error(f"unknown keys in {args.config}: {', '.join(unknown)}")
        # Re-parse so explicit flags win over the file.
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def session_config(args) -> SessionConfig:
    net = get_profile(args.net, args.latency_ms, args.bandwidth_gbps)
    approx = ApproxConfig(
        exp_base=args.exp_base, exp_iterations=args.exp_iterations, log_order=args.log_order,
        log_iterations=args.log_iterations, reciprocal_iterations=args.reciprocal_iterations,
        trig_iterations=args.trig_iterations)
    return SessionConfig(
        n_parties=args.parties, max_arity=args.max_arity, precision_bits=args.fxp_bits,
        ring_bits=args.ring_bits, seed=args.seed, net=net, coalesce=args.coalesce == "on",
        approx=approx)


def run(args) -> str:
    config = session_config(args)
    if args.command == "bench-mul":
        method = METHOD_NAMES[args.method] if args.method else None
        report = bench_mul(args.arity, args.count, method=method, config=config, timing=args.timing)
    elif args.command == "bench-nonlinear":
        grid = default_grid(args.function, args.points, args.lo, args.hi)
        report = bench_nonlinear(args.function, grid, config=config, timing=args.timing)
    else:
        report = bench_mlp(count=args.count, config=config, timing=args.timing)
    return emit(report, args.format, args.out)


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = run(args)
    except (MPCError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
