"""CLI command listing the available experiments."""

import argparse

from manifoldlab.experiments import list_experiments


def register_parser(subparsers: argparse._SubParsersAction) -> None:
    """Register the 'list' command parser."""
    parser = subparsers.add_parser(
        "list",
        help="List available experiments",
        description="Show every experiment with a description and the claim it checks.",
    )
    parser.set_defaults(func=_run_list)


def format_listing() -> str:
    """Experiment catalog as text, one block per experiment."""
    blocks = []
    for info in list_experiments():
        blocks.append(f"{info.name}\n    {info.description}\n    checks: {info.certifies}")
    return "\n".join(blocks)


def _run_list(args: argparse.Namespace) -> int:
    """Print the experiment catalog."""
    print(format_listing())
    return 0
