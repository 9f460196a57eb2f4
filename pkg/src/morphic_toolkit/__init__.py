"""
Morphic Toolkit - return words, derived sequences and decision procedures

Works on fixed points of primitive substitutions and their images under
morphisms: return substitutions, λ morphisms, bounds, D0L/HD0L ω-equivalence,
HD0L periodicity and common powers, each decision backed by a replayable
certificate.
"""

__version__ = "0.1.0"

from morphic_toolkit.core.base import (
    BudgetExceededError,
    DomainError,
    MorphicError,
    Verdict,
)
from morphic_toolkit.core.config import ToolkitSettings
from morphic_toolkit.core.words import Alphabet, Morphism
from morphic_toolkit.decision.certificate import Certificate
from morphic_toolkit.decision.equivalence import d0l_equivalence, hd0l_equivalence
from morphic_toolkit.decision.normalization import normalize_morphic
from morphic_toolkit.decision.periodicity import hd0l_periodicity
from morphic_toolkit.decision.replay import verify_certificate
from morphic_toolkit.decision.rigidity import common_power_check
from morphic_toolkit.utils.text_format import format_morphism, parse_morphism

__all__ = [
    "Alphabet",
    "Morphism",
    "Certificate",
    "ToolkitSettings",
    "Verdict",
    "MorphicError",
    "DomainError",
    "BudgetExceededError",
    "d0l_equivalence",
    "hd0l_equivalence",
    "hd0l_periodicity",
    "common_power_check",
    "normalize_morphic",
    "verify_certificate",
    "parse_morphism",
    "format_morphism",
    "__version__",
]
