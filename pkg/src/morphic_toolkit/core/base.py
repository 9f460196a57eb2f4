"""
Core abstractions and base classes for the morphic toolkit.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import TYPE_CHECKING, Optional, Tuple

if TYPE_CHECKING:
    from morphic_toolkit.core.words import Alphabet

# A word is a finite sequence of canonical letter indices (0..d-1).
Word = Tuple[int, ...]


class Verdict(str, Enum):
    """Outcome of a decision procedure."""

    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    PERIODIC = "Periodic"
    APERIODIC = "Aperiodic"
    COMMON_POWER = "CommonPower"
    NO_CONCLUSION = "NoConclusion"


class BoundMode(str, Enum):
    """How certificate constants are computed."""

    CERTIFICATE = "certificate"
    PRACTICAL = "practical"


class LevelSchedule(str, Enum):
    """Prefix schedule used by the level iteration of the equivalence procedures."""

    DERIVATION = "derivation"  # w_{n+1} = Θ(0)·w_n
    GEOMETRIC = "geometric"  # |u_n| = (max(K_σ, K_τ) + 1)^n
    GEOMETRIC_LITERAL = "geometric-literal"  # |u_n| = |v_n| = (K_σ + 1)^n


class OutputFormat(str, Enum):
    """Document formats emitted by the CLI."""

    TEXT = "text"
    JSON = "json"


class MorphicError(Exception):
    """Base class for every error raised by the toolkit."""

    pass


class DomainError(MorphicError, ValueError):
    """Raised when an input violates a precondition of an operation."""

    pass


class MorphismParseError(DomainError):
    """Raised when morphism text cannot be parsed."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class BudgetExceededError(MorphicError):
    """Raised when a configured resource budget would be exceeded."""

    pass


class InvariantViolation(MorphicError, RuntimeError):
    """Raised when an internal invariant fails; indicates a bug, never bad input."""

    pass


class SymbolStream(ABC):
    """
    A lazily materialized one-sided infinite sequence.

    Implementations guarantee that materialized symbols never change once
    produced, so any prefix returned earlier stays a prefix of later ones.
    """

    def __init__(self, memory_budget: int) -> None:
        self.memory_budget = memory_budget

    @property
    @abstractmethod
    def alphabet(self) -> "Alphabet":
        """Alphabet of the sequence."""
        pass

    @abstractmethod
    def prefix(self, n: int) -> Word:
        """Return the first ``n`` symbols."""
        pass

    def symbol(self, i: int) -> int:
        """Return the symbol at position ``i``."""
        return self.prefix(i + 1)[i]

    def labels(self, n: int) -> Tuple[str, ...]:
        """Return the first ``n`` symbols as human-readable labels."""
        return self.alphabet.labels_of(self.prefix(n))

    def _check_budget(self, n: int, name: Optional[str] = None) -> None:
        if n > self.memory_budget:
            raise BudgetExceededError(
                f"Materializing {n} symbols of {name or type(self).__name__} exceeds "
                f"the memory budget of {self.memory_budget} symbols"
            )
