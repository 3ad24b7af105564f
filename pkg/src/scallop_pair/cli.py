"""Command line entry point.

Subcommands: phase-sweep, report, lambda-study, null-tests, integrate.
Exit codes: 0 success, 2 config validation failure, 3 singular-resistance
abort, 4 null-test assertion failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from . import experiments
from ._kernels import backend_name
from .dynamics import SingularResistance
from .experiments import ConfigError, RunConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_ASSERTION = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scallop-pair",
        description="Simulation and analysis of two hydrodynamically coupled "
                    "two-link scallops.",
    )
    parser.add_argument("--version", action="store_true", help="print version and backend")
    sub = parser.add_subparsers(dest="command")

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (CLI flags override it)")
        p.add_argument("--out", help="output directory (default: from config)")
        p.add_argument("--dt", type=float, help="integration step (run time units)")
        p.add_argument("--periods", type=int, help="number of stroke periods")
        p.add_argument("--convention", choices=("paper", "dimensional"),
                       help="length convention for dynamics and constants")

    add_common(sub.add_parser("phase-sweep", help="displacement vs phase offset"))
    add_common(sub.add_parser("report", help="theory vs numerics at phi = pi/2"))
    p_lambda = sub.add_parser("lambda-study", help="displacement constant vs coupling")
    add_common(p_lambda)
    p_lambda.add_argument("--kappa", type=float, default=10.0,
                          help="separation margin in kappa*a < h < L/kappa (default 10)")
    p_null = sub.add_parser("null-tests", help="no-net-motion symmetry checks")
    add_common(p_null)
    p_null.add_argument("--tolerance-scale", type=float, default=1.0,
                        help="multiplier on the null-test drift thresholds")
    p_int = sub.add_parser("integrate", help="export a single trajectory as CSV")
    add_common(p_int)
    p_int.add_argument("--phi", type=float, default=math.pi / 2.0,
                       help="phase offset of the sinusoidal stroke (default pi/2)")
    return parser


def _load_config(args) -> RunConfig:
    config = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.periods is not None:
        overrides["n_periods"] = args.periods
    if args.convention is not None:
        overrides["length_convention"] = (
            experiments.PAPER_CONVENTION if args.convention == "paper"
            else experiments.DIMENSIONAL_CONVENTION)
    if overrides:
        try:
            config = dataclasses.replace(config, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        from . import __version__

        print(f"scallop-pair {__version__} (kernel backend: {backend_name()})")
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    try:
        config = _load_config(args)
        if args.command == "phase-sweep":
            records = experiments.phase_sweep(config)
            amplitude, r_squared = experiments.sin_squared_fit(
                [r.phi for r in records], [r.delta_m_numeric for r in records])
            best = max((r for r in records if r.error is None),
                       key=lambda r: r.delta_m_numeric, default=None)
            failures = [r for r in records if r.error is not None]
            print(f"phase sweep: {len(records)} phases -> {config.output_dir}/phase_sweep.csv")
            if best is not None:
                print(f"  argmax phi = {best.phi:.6g} "
                      f"(delta_m = {best.delta_m_numeric:.6g})")
            print(f"  sin^2 fit: A = {amplitude:.6g}, R^2 = {r_squared:.4f}")
            for r in failures:
                print(f"  phi = {r.phi:.6g} failed: {r.error}", file=sys.stderr)
        elif args.command == "report":
            report = experiments.theory_vs_numeric_report(config)
            print(json.dumps(report, indent=2, sort_keys=True))
        elif args.command == "lambda-study":
            report = experiments.lambda_study(config, kappa=args.kappa)
            print(json.dumps(report, indent=2, sort_keys=True))
        elif args.command == "null-tests":
            report = experiments.null_tests(config, tolerance_scale=args.tolerance_scale)
            print(json.dumps(report, indent=2, sort_keys=True))
            if not report["all_passed"]:
                return EXIT_ASSERTION
        elif args.command == "integrate":
            trajectory = experiments.export_trajectory(config, phi=args.phi)
            print(f"trajectory -> {config.output_dir}/trajectory.csv "
                  f"({len(trajectory.times)} samples, "
                  f"delta_m = {trajectory.summary.delta_m:.6g})")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid run setup: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularResistance as exc:
        print(f"singular resistance matrix: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
