"""Command-line interface for ManifoldLab."""

from manifoldlab.cli.main import main

__all__ = ["main"]
