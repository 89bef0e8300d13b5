"""Command line front end for the downlink simulator.

Runs either the experiment described by a config file or one of the
named experiment presets, then writes a CSV report. Exit codes: 0 on
success, 1 for configuration problems (bad arguments, unreadable or
invalid config), 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .harness import (
    PRESETS,
    ConfigError,
    load_config,
    merge_reports,
    preset_configs,
    run_experiment,
    write_report,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description=(
            "Monte Carlo simulator for a hybrid optical/radio downlink "
            "with load-balanced user association."
        ),
    )
    parser.add_argument(
        "--config", required=True,
        help="experiment file (INI format; an empty file runs defaults)",
    )
    parser.add_argument(
        "--preset", choices=PRESETS, default=None,
        help="named experiment preset; overrides the design keys of the "
             "config but keeps its physics, trials, and seed",
    )
    parser.add_argument(
        "--trials", type=int, default=None,
        help="override the number of trials per sweep point",
    )
    parser.add_argument(
        "--seed", type=int, default=None,
        help="override the base seed",
    )
    parser.add_argument(
        "--out", default="results.csv",
        help="output CSV path (default: results.csv)",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; fold the
        # latter into the configuration-error code.
        return 0 if not exc.code else 1

    try:
        base = load_config(args.config)
        overrides = {}
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            base = replace(base, **overrides)
            base.validate()
        if args.preset is not None:
            configs = preset_configs(args.preset, base)
        else:
            configs = [base]
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    try:
        report = merge_reports([run_experiment(cfg) for cfg in configs])
        write_report(report, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2

    n_trials = sum(pt.trials for pt in report.points)
    print(
        f"wrote {len(report.points)} series point(s), {n_trials} trial(s) "
        f"total, {report.kind} schema: {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
