"""CLI module initialization."""

from morphic_toolkit.cli.main import cli

__all__ = ["cli"]
