"""Command-line entry point.

``crossedqm run <config.toml>`` executes a scenario and exits 0 when every
check passes, 1 on a failed check (failing names go to stderr), 2 on an
invalid config and 3 when a resource cap is hit.  ``crossedqm
list-checks`` prints the available checks with one-line descriptions.
"""

from __future__ import annotations

import argparse
import sys

from .runner import list_checks, run_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossedqm",
        description="Finite-truncation verification suite for crossed-product quantum metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario config")
    run_p.add_argument("config", help="path to a scenario TOML file")
    run_p.add_argument("--out", default=None,
                       help="output directory (default from config or $CROSSEDQM_OUT)")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_p.add_argument("--max-ball", type=int, default=None,
                       help="override the ball-size cap")
    run_p.add_argument("--jobs", type=int, default=1,
                       help="run checks in parallel (results are identical to serial)")

    sub.add_parser("list-checks", help="describe the available checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-checks":
        table = list_checks()
        width = max(len(name) for name in table)
        for name in sorted(table):
            print(f"{name:<{width}}  {table[name]}")
        return 0
    return run_file(args.config, out=args.out, seed=args.seed,
                    max_ball=args.max_ball, jobs=args.jobs)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
