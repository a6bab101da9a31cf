"""Command line entry points.

``thermocollide run <config>`` executes an experiment config and writes
CSV datasets, a manifest, and rendered figures; ``thermocollide
validate <config>`` checks a config and echoes the derived quantities
without running anything.  Exit codes: 0 success, 2 config error,
3 when every sweep point failed.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, describe_config, load_config
from .experiments import run_experiment

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_ALL_FAILED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermocollide",
        description="Collision-model cyclic heat engine experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path to a flat key/value config file")
    run.add_argument("--jobs", type=int, default=None, help="worker pool size")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the output directory")
    run.add_argument(
        "--no-plots", action="store_true", help="skip rendering PNG figures"
    )

    validate = sub.add_parser("validate", help="validate a config without running")
    validate.add_argument("config", help="path to a flat key/value config file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if args.command == "validate":
        for line in describe_config(config):
            print(line)
        print("config OK")
        return EXIT_OK

    if args.jobs is not None and args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    result = run_experiment(
        config,
        output_dir=args.out,
        jobs=args.jobs,
        seed=args.seed,
        render=not args.no_plots,
    )
    print(f"wrote {len(result.csv_files)} dataset(s) to {result.output_dir}")
    for name in result.csv_files:
        print(f"  {name}")
    for name in result.figure_files:
        print(f"  {name}")
    if result.n_failed:
        print(
            f"{result.n_failed} of {result.n_points} point(s) failed; "
            "see manifest.json",
            file=sys.stderr,
        )
    if result.all_failed:
        return EXIT_ALL_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
