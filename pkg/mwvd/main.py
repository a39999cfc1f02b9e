"""Command-line entry point"""
import argparse
import logging
import sys

from .commands import diagram, experiment
from .config import LOG_LEVEL
from .errors import MWVDError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwvd",
        description="Multiplicative weighted Voronoi diagrams under random weights",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True)

    #Register commands
    experiment.register(subparsers)
    diagram.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except MWVDError as e:
        print(f"error in {e.stage}: {e}", file=sys.stderr)
        return 1
