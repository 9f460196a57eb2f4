"""Core module initialization."""

from morphic_toolkit.core.base import (
    BoundMode,
    BudgetExceededError,
    DomainError,
    InvariantViolation,
    LevelSchedule,
    MorphicError,
    MorphismParseError,
    OutputFormat,
    SymbolStream,
    Verdict,
    Word,
)
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings

__all__ = [
    "BoundMode",
    "BudgetExceededError",
    "DEFAULT_SETTINGS",
    "DomainError",
    "InvariantViolation",
    "LevelSchedule",
    "MorphicError",
    "MorphismParseError",
    "OutputFormat",
    "SymbolStream",
    "ToolkitSettings",
    "Verdict",
    "Word",
]
