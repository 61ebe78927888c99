"""CLI command modules."""

from manifoldlab.cli.commands import listing, run

__all__ = ["listing", "run"]
