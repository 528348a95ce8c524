"""Command line entry point: ``minkcurv <command> --config <path>``."""
from __future__ import annotations

import argparse
import sys

from .config import COMMANDS, FORMATS, load_config
from .errors import ConfigError, InadmissibleNorm, MinkowskiError, ParseError
from .harness import COMMANDS as RUNNERS
from .harness import to_csv, to_json

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(
        prog="minkcurv",
        description="Curvature of surfaces in three-dimensional normed spaces.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=FORMATS, help="overrides the configured format")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: invalid configuration, {exc}", file=sys.stderr)
        return EXIT_CONFIG
    config.command = args.command
    fmt = args.format or config.format
    out = args.out or config.out

    try:
        table = RUNNERS[args.command](config)
    except InadmissibleNorm as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MinkowskiError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED

    text = to_csv(table) if fmt == "csv" else to_json(table, args.command)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "check" and not table.meta["passed"]:
        failed = [r[0] for r in table.rows if not r[4]]
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
