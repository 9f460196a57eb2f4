"""Return words, derived sequences, return substitutions and λ morphisms."""

from morphic_toolkit.returns.structure import (
    ReturnStructure,
    build_return_structure,
    derivation_tower,
    theta_refinement,
)
from morphic_toolkit.returns.substitution import (
    LambdaResult,
    ReturnSubstitution,
    lambda_morphism,
    return_substitution,
)

__all__ = [
    "LambdaResult",
    "ReturnStructure",
    "ReturnSubstitution",
    "build_return_structure",
    "derivation_tower",
    "lambda_morphism",
    "return_substitution",
    "theta_refinement",
]
