"""Command-line entry point.

Subcommands select the mode; ``--config`` points at a YAML file whose keys
the remaining flags override::

    joinsafe simulate   --config sweep.yaml --runs 100 --out out/
    joinsafe experiment --config real.yaml --seed 7
    joinsafe advise     --config real.yaml
    joinsafe compress   --config real.yaml --out maps/
    joinsafe smooth     --config sim.yaml

Exits 0 on success; on failure prints a one-line diagnostic to stderr and
exits 1.
"""

from __future__ import annotations

import argparse
import sys

from .harness import MODES, load_config, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="joinsafe",
        description="Star-schema feature views, classifiers, and join-avoidance stress tests",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run in {mode} mode")
        p.add_argument("--config", default=None, help="YAML config file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--runs", type=int, default=None, help="Monte Carlo run count override")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=None, help="parallel worker count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(
            args.config, mode=args.mode,
            seed=args.seed, runs=args.runs, out=args.out, jobs=args.jobs,
        )
        written = run_experiment(config)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"joinsafe: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
