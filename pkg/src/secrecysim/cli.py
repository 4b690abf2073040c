"""Command line entry point.

    secrecysim run --config FILE --out FILE [--seed U64] [--trials N] [--threads K] [--slopes]
    secrecysim default-config

Exit codes: 0 success, 2 configuration error, 3 insufficient statistical
resolution for the requested slopes.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .errors import ConfigError, InsufficientResolutionError, InvalidParameterError
from .estimator import THREADS_ENV
from .sweep import ScenarioConfig, diversity_slopes, emit_csv, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3

log = logging.getLogger("secrecysim")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secrecysim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an MER sweep and write a CSV")
    run.add_argument("--config", required=True, help="JSON scenario file")
    run.add_argument("--out", required=True, help="CSV output path")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--trials", type=int, help="override n_trials")
    run.add_argument(
        "--threads", type=int, default=None, help=f"worker threads (default: ${THREADS_ENV} or 1)"
    )
    run.add_argument(
        "--slopes",
        action="store_true",
        help="also print log-log intercept slopes over the top MER points",
    )
    run.add_argument("--slope-window", type=int, default=3)
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("default-config", help="print the default scenario as JSON")
    return parser


def _run(args) -> int:
    try:
        config = ScenarioConfig.load(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.trials is not None:
            overrides["n_trials"] = args.trials
        if overrides:
            config = dataclasses.replace(config, **overrides)
        if args.threads is not None and args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    except (ConfigError, InvalidParameterError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %d MER points x %s", len(config.mer_grid_db), ", ".join(config.schemes))
    try:
        result = run_sweep(config, threads=args.threads)
    except InvalidParameterError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    slopes = None
    if args.slopes:
        try:
            slopes = diversity_slopes(result, args.slope_window)
        except InsufficientResolutionError as e:
            print(f"insufficient resolution: {e}", file=sys.stderr)
            return EXIT_RESOLUTION

    emit_csv(result, args.out)
    if slopes is not None:
        for (scheme, m), slope in slopes.items():
            print(f"{scheme}\tm={m}\tslope={slope:.4f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "default-config":
        sys.stdout.write(ScenarioConfig().to_json())
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
