#!/usr/bin/env python3
"""Run every canned scenario config and print the summaries.

Usage:
    python scripts/run_all.py [--threads N] [--configs DIR] [--out-root DIR]

Output directories from the config files are kept unless --out-root is
given, in which case each scenario lands in <out-root>/<scenario>.
"""

import argparse
import sys
from pathlib import Path

from spinmech.config import apply_overrides
from spinmech.scenarios import human_summary, parse_config, run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--configs", default=Path(__file__).resolve().parent.parent / "configs"
    )
    parser.add_argument("--out-root", default=None)
    args = parser.parse_args()

    config_files = sorted(Path(args.configs).glob("*.cfg"))
    if not config_files:
        print(f"no .cfg files under {args.configs}", file=sys.stderr)
        return 1

    for path in config_files:
        cfg = parse_config(path.read_text())
        if args.out_root is not None:
            cfg = apply_overrides(
                cfg, output_dir=Path(args.out_root) / cfg.scenario
            )
        print(f"=== {path.name} ===")
        summary = run_scenario(cfg, n_workers=args.threads)
        print(human_summary(summary))
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
