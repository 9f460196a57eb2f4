"""
Return substitutions σ_u and the λ morphisms attached to codings.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

from morphic_toolkit.core.base import DomainError, InvariantViolation, Word
from morphic_toolkit.core.stream import FixedPointStream, MorphicStream
from morphic_toolkit.core.words import Alphabet, Morphism
from morphic_toolkit.returns.structure import (
    ReturnStructure,
    build_return_structure,
    cut_at_occurrences,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReturnSubstitution:
    """σ_u together with the coding Θ it commutes with: ``Θ∘σ_u = σ∘Θ``."""

    inner: Morphism
    theta: Morphism


@dataclass
class LambdaResult:
    """λ_u and the return structure of the coded sequence on the coded prefix."""

    lambda_: Morphism
    image_rs: ReturnStructure


def check_commutation(sigma: Morphism, rs: ReturnStructure) -> None:
    """Verify ``Θ∘σ_u = σ∘Θ`` letter by letter."""
    if rs.substitution is None:
        raise DomainError("Return structure carries no return substitution")
    for i in range(rs.size):
        left = rs.theta.apply(rs.substitution.images[i])
        right = sigma.apply(rs.theta.images[i])
        if left != right:
            raise InvariantViolation(f"Θσ_u and σΘ differ on derived letter {i}")


def return_substitution(sigma: Morphism, x: FixedPointStream, u: Word) -> ReturnSubstitution:
    """
    The return substitution of ``σ`` on the prefix ``u`` of ``x = σ^ω(a)``.

    Args:
        sigma: Primitive substitution generating ``x``
        x: Fixed point of ``sigma``
        u: Non-empty prefix of ``x``

    Returns:
        σ_u and Θ_{x,u}

    Raises:
        DomainError: If ``x`` is not generated by ``sigma`` or ``u`` is not a prefix
        InvariantViolation: If the commutation law fails
    """
    if x.substitution != sigma:
        raise DomainError(f"The sequence is not a fixed point of {sigma.name or 'σ'}")
    rs = build_return_structure(x, u)
    check_commutation(sigma, rs)
    assert rs.substitution is not None
    return ReturnSubstitution(rs.substitution, rs.theta)


def lambda_morphism(rs: ReturnStructure, phi: Morphism) -> LambdaResult:
    """
    Compute λ_u with ``φ∘Θ_{x,u} = Θ_{φ(x),φ(u)}∘λ_u`` for a coding ``φ``.

    Each ``φ(Θ(i))`` is cut at the occurrences of ``φ(u)``. Derived letters are
    visited in order, which is the order of their first appearance, so the
    return words of ``φ(x)`` come out in their canonical order.

    Args:
        rs: Return structure of ``x`` on ``u``
        phi: Coding defined on the alphabet of ``x``

    Returns:
        λ_u and the return structure of ``φ(x)`` on ``φ(u)``

    Raises:
        DomainError: If ``phi`` is not a coding of the alphabet of ``x``
    """
    if not phi.is_coding:
        raise DomainError(f"{phi.name or 'Morphism'} is not a coding")
    if phi.source != rs.base.alphabet:
        raise DomainError(
            "Coding is not defined on the alphabet of the sequence: "
            f"{rs.base.alphabet.mismatch(phi.source)}"
        )
    fu = phi.apply(rs.prefix_u)
    words: List[Word] = []
    codes: Dict[Word, int] = {}
    images: List[Word] = []
    for i, word in enumerate(rs.return_words):
        image = phi.apply(word)
        pieces = cut_at_occurrences(image + fu, fu, len(image))
        if pieces is None:
            raise InvariantViolation(f"Coded return word {i} does not start with the coded prefix")
        decoded = []
        for piece in pieces:
            if piece not in codes:
                codes[piece] = len(words)
                words.append(piece)
            decoded.append(codes[piece])
        images.append(tuple(decoded))

    image_alphabet = Alphabet.indexed(len(words))
    lam = Morphism(rs.derived_alphabet, image_alphabet, tuple(images), "λ")
    theta = Morphism(image_alphabet, phi.target, tuple(words), "Θ")
    if phi.compose(rs.theta) != theta.compose(lam):
        raise InvariantViolation("φΘ and Θλ differ")
    image_rs = ReturnStructure(
        base=MorphicStream(rs.base, phi),
        prefix_u=fu,
        return_words=tuple(words),
        theta=theta,
        derived=MorphicStream(rs.derived, lam),
    )
    logger.debug(
        f"λ maps {rs.size} return words onto {len(words)} coded return words",
        extra={"prefix_length": len(fu), "return_words": len(words)},
    )
    return LambdaResult(lam, image_rs)


def image_return_structure(x: FixedPointStream, phi: Morphism, length: int) -> LambdaResult:
    """Return structure of ``φ(x)`` on its prefix of the given length, for a coding ``φ``."""
    return lambda_morphism(build_return_structure(x, x.prefix(length)), phi)
