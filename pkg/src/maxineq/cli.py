"""Command line entry point: ``maxineq run | list-checks | describe``."""

from __future__ import annotations

import argparse
import sys

from . import experiment as ex


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxineq", description="Numerical checks of maximal inequalities "
                                "and strong laws for dependent sequences.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a YAML experiment config")
    run.add_argument("--config", required=True, help="path to the YAML config")
    run.add_argument("--seed", type=int, help="master seed (overrides the config)")
    run.add_argument("--paths", type=int, help="default number of simulated paths")
    run.add_argument("--out", help="output directory for reports")
    run.add_argument("--format", choices=ex.FORMATS, help="report format")
    run.add_argument("--workers", type=int, help="worker threads for independent checks")
    sub.add_parser("list-checks", help="print the check catalog")
    d = sub.add_parser("describe", help="describe one check")
    d.add_argument("check")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-checks":
        for info in ex.list_checks():
            print(f"{info.name:28s} {info.citation}")
        return 0
    if args.command == "describe":
        try:
            print(ex.describe(args.check))
        except KeyError:
            print(f"unknown check {args.check!r}", file=sys.stderr)
            return 2
        return 0
    try:
        code = ex.run(args.config, seed=args.seed, paths=args.paths, out=args.out, fmt=args.format,
                      workers=args.workers)
    except ex.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print("violations found" if code else "no violations")
    return code


if __name__ == "__main__":
    sys.exit(main())
