"""Command-line entry point.

Subcommands::

    spinmech run <config-file> [--seed N] [--out DIR] [--threads N]
    spinmech validate <config-file>
    spinmech list-scenarios

Exit codes: 0 success, 2 configuration problems, 3 numerical failures,
4 I/O failures.  ``--seed`` and ``--out`` override the config file;
``--threads`` only parallelizes, it never changes results.
"""

from __future__ import annotations

import argparse
import sys

from .config import apply_overrides
from .errors import ConfigurationError, InvalidInputError, NumericalOverflowError, SpinmechError
from .scenarios import human_summary, list_scenarios, parse_config, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmech",
        description="Run spin-ensemble simulation scenarios from config files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario config")
    run_p.add_argument("config", help="path to the config file")
    run_p.add_argument("--seed", type=int, default=None, help="override scenario.seed")
    run_p.add_argument("--out", default=None, help="override output.dir")
    run_p.add_argument(
        "--threads", type=int, default=1,
        help="worker threads for ensembles (does not change results)",
    )

    val_p = sub.add_parser("validate", help="check a config without running it")
    val_p.add_argument("config", help="path to the config file")

    sub.add_parser("list-scenarios", help="print the scenario catalogue")
    return parser


def _read_config_text(path: str) -> str:
    with open(path, "r") as fh:
        return fh.read()


def _print_config_errors(err: ConfigurationError) -> None:
    print("configuration errors:", file=sys.stderr)
    for msg in err.errors:
        print(f"  - {msg}", file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-scenarios":
        print(list_scenarios(), end="")
        return EXIT_OK

    try:
        text = _read_config_text(args.config)
    except OSError as e:
        print(f"cannot read config: {e}", file=sys.stderr)
        return EXIT_IO

    try:
        cfg = parse_config(text)
    except ConfigurationError as e:
        _print_config_errors(e)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"config OK: scenario '{cfg.scenario}', seed {cfg.seed}")
        return EXIT_OK

    cfg = apply_overrides(cfg, seed=args.seed, output_dir=args.out)
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run_scenario(cfg, n_workers=args.threads)
    except NumericalOverflowError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigurationError as e:
        _print_config_errors(e)
        return EXIT_CONFIG
    except InvalidInputError as e:
        print(f"invalid configuration value: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SpinmechError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O failure: {e}", file=sys.stderr)
        return EXIT_IO
    print(human_summary(summary))
    return EXIT_OK


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
