"""CLI entry point for ManifoldLab.

Provides the command-line interface of the experiment runner:
- run: Execute one experiment from a JSON config
- list: Show the available experiments
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from manifoldlab import __version__
from manifoldlab.cli.commands import listing, run

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser with subcommands."""
    parser = argparse.ArgumentParser(
        prog="manifoldlab",
        description="ManifoldLab - numerical laboratory for geometric universality",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  manifoldlab list
  manifoldlab run configs/universality.json
  manifoldlab run configs/cycle.json --out runs/cycle -v

Exit codes: 0 all targets met, 2 a target failed, 1 error, 130 interrupted.

For more information on a command, use: manifoldlab <command> --help
""",
    )

    parser.add_argument(
        "-V",
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )

    # Create subparsers
    subparsers = parser.add_subparsers(
        title="commands",
        dest="command",
        description="Available commands",
        metavar="<command>",
    )

    # Register subcommands
    run.register_parser(subparsers)
    listing.register_parser(subparsers)

    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """DEBUG with ``verbose``, ERROR with ``quiet``, WARNING otherwise."""
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for CLI.

    Parameters
    ----------
    argv : Sequence[str], optional
        Command line arguments. If None, uses sys.argv[1:].

    Returns
    -------
    int
        Exit code: 0 pass, 2 metric-target failure, 1 error, 130 interrupt.
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return 0

    configure_logging(getattr(args, "verbose", False), getattr(args, "quiet", False))

    # Execute the command
    try:
        return int(args.func(args))
    except KeyboardInterrupt:
        print("\nOperation cancelled.", file=sys.stderr)
        return 130
    except Exception as e:
        notes = getattr(e, "__notes__", [])
        context = f" ({'; '.join(notes)})" if notes else ""
        print(f"Error: {e}{context}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
