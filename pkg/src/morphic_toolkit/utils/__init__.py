"""Utility functions and helpers."""

from morphic_toolkit.utils.text_format import (
    format_morphism,
    load_morphisms,
    parse_morphism,
    parse_morphisms,
)

__all__ = ["format_morphism", "load_morphisms", "parse_morphism", "parse_morphisms"]
