"""``tfgkp <experiment> --config <file> [--seed N] [--out <file>]``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from .config import EXPERIMENTS, ConfigError, parse_config
from .experiments import ExperimentError, run_experiment
from .report import emit_report

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("tfgkp")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tfgkp", description="Run a time-frequency GKP experiment and write a CSV.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--seed", type=int, help="overrides the config seed")
    ap.add_argument("--out", help="output CSV (default: config 'output', else stdout)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"tfgkp: cannot read config {args.config}: {e.strerror or e}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, args.experiment)
    except ConfigError as e:
        for p in e.problems:
            print(f"tfgkp: config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        if args.seed < 0:
            print("tfgkp: config error: --seed must be >= 0", file=sys.stderr)
            return EXIT_CONFIG
        cfg = type(cfg)(**{**cfg.__dict__, "seed": args.seed})
    if cfg.seed is None:
        print("tfgkp: config error: no seed given (use 'seed' in the config or --seed)", file=sys.stderr)
        return EXIT_CONFIG

    start = time.perf_counter()
    try:
        table = run_experiment(cfg)
    except ExperimentError as e:
        print(f"tfgkp: {e}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("%s finished in %.2f s", cfg.experiment, time.perf_counter() - start)

    bad = table.non_finite()
    if bad:
        row, col = bad[0]
        print(f"tfgkp: non-finite value in row {row}, column {col} ({len(bad)} in total)", file=sys.stderr)
        return EXIT_NUMERIC
    out = args.out if args.out is not None else cfg.output
    try:
        emit_report(table, out)
    except OSError as e:
        print(f"tfgkp: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
