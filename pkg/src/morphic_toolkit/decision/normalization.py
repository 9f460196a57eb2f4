"""
Morphic to substitutive normalization.

The image ``ρ(σ^ω(a))`` of a primitive fixed point under any morphism that
does not erase the whole sequence is rewritten as ``χ(τ^ω(seed))`` with ``χ``
a coding and ``τ`` a primitive substitution on marker letters ``(c,k)``.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from morphic_toolkit.core.base import DomainError, InvariantViolation, SymbolStream
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings
from morphic_toolkit.core.stream import FixedPointStream, MorphicStream
from morphic_toolkit.core.words import (
    Alphabet,
    Morphism,
    length_vector,
    primitivity,
    prolongable_letters,
    require_primitive,
)
from morphic_toolkit.utils.text_format import format_morphism

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationResult:
    """
    ``χ(τ^ω(seed)) = ρ(σ^ω(a))`` with the marker map ``ψ`` linking both sides.

    Attributes:
        tau: Primitive substitution on the marker alphabet
        chi: Coding from the marker alphabet onto the letters of the image
        seed: Marker letter ``(a,0)``
        psi: Marker map ``c ↦ (c,0)(c,1)…(c,|φ(c)|-1)``
        phi: The non-erasing morphism ``ρσ^k``
        k: Power of σ absorbed into ``φ``
        n: Power of σ simulated by ``τ``
    """

    tau: Morphism
    chi: Morphism
    seed: str
    psi: Morphism
    phi: Morphism
    k: int
    n: int

    def sequence(self, memory_budget: Optional[int] = None) -> SymbolStream:
        """The normalized sequence ``χ(τ^ω(seed))``."""
        return MorphicStream(FixedPointStream(self.tau, self.seed, memory_budget), self.chi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "n": self.n,
            "seed": self.seed,
            "markers": len(self.tau.source),
            "phi": format_morphism(self.phi),
            "psi": format_morphism(self.psi),
            "tau": format_morphism(self.tau),
            "chi": format_morphism(self.chi),
        }


def normalize_morphic(
    sigma: Morphism,
    a: str,
    rho: Morphism,
) -> NormalizationResult:
    """
    Normalize ``ρ(σ^ω(a))`` to a coding of a primitive fixed point.

    ``φ = ρσ^k`` with ``k = 0`` when ``ρ`` is already a coding and the minimal
    positivity exponent of ``σ`` otherwise, so that ``φ`` erases nothing.
    ``n`` is the least ``n ≥ 1`` with ``|σ^n(c)| ≥ |φ(c)|`` for every letter.
    Each letter ``c`` is split into ``|φ(c)|`` markers; ``τ`` sends the first
    markers of ``c`` to the markers of the first letters of ``σ^n(c)`` and the
    last marker to the markers of the remaining letters.

    Args:
        sigma: Primitive substitution prolongable on ``a``
        a: Seed letter
        rho: Morphism defined on the alphabet of ``sigma``

    Returns:
        The normalization, with ``τψ = ψσ^n`` and ``χψ = φ`` verified

    Raises:
        DomainError: If ``rho`` erases every letter or ``sigma`` is not primitive/prolongable
        InvariantViolation: If a construction identity fails
    """
    k0 = require_primitive(sigma)
    if a not in prolongable_letters(sigma):
        raise DomainError(f"{sigma.name or 'σ'} is not prolongable on letter {a}")
    if rho.source != sigma.source:
        raise DomainError(
            f"{rho.name or 'ρ'} is not defined on the alphabet of {sigma.name or 'σ'}: "
            f"{sigma.source.mismatch(rho.source)}"
        )
    if rho.erases_everything:
        raise DomainError(f"{rho.name or 'ρ'} erases every letter, so the image is finite")

    k = 0 if rho.is_coding else k0
    phi = rho.compose(sigma.power(k)).renamed("phi")
    if not phi.is_non_erasing:
        raise InvariantViolation("ρσ^k still erases a letter")

    targets = phi.lengths
    n = 1
    while any(length < target for length, target in zip(length_vector(sigma, n), targets)):
        n += 1
    sigma_n = sigma.power(n)

    pairs: List[Tuple[str, int]] = [
        (sigma.source.label(c), i) for c in range(len(sigma.source)) for i in range(targets[c])
    ]
    markers = Alphabet.markers(pairs)
    first_marker: List[int] = []
    offset = 0
    for length in targets:
        first_marker.append(offset)
        offset += length

    psi_images = tuple(
        tuple(range(first_marker[c], first_marker[c] + targets[c])) for c in range(len(targets))
    )
    psi = Morphism(sigma.source, markers, psi_images, "psi")

    tau_images = []
    for c, length in enumerate(targets):
        image = sigma_n.images[c]
        for i in range(length - 1):
            tau_images.append(psi.apply(image[i : i + 1]))
        tau_images.append(psi.apply(image[length - 1 :]))
    tau = Morphism(markers, markers, tuple(tau_images), "tau")

    used = sorted({b for image in phi.images for b in image})
    chi_target = Alphabet(tuple(phi.target.label(b) for b in used))
    chi_images = tuple(
        (chi_target.index(phi.target.label(phi.images[c][i])),)
        for c in range(len(targets))
        for i in range(targets[c])
    )
    chi = Morphism(markers, chi_target, chi_images, "chi")
    seed = markers.label(first_marker[sigma.source.index(a)])

    if tau.compose(psi) != psi.compose(sigma_n):
        raise InvariantViolation("τψ and ψσ^n differ")
    if chi.compose(psi) != phi.restrict_target():
        raise InvariantViolation("χψ and φ differ")
    if not primitivity(tau).primitive:
        raise InvariantViolation("Normalized substitution is not primitive")
    if seed not in prolongable_letters(tau):
        raise InvariantViolation(f"Normalized substitution is not prolongable on {seed}")

    logger.info(
        f"Normalized {rho.name or 'ρ'} over {sigma.name or 'σ'} with k={k}, n={n}, "
        f"{len(markers)} markers",
        extra={"k": k, "n": n, "markers": len(markers)},
    )
    return NormalizationResult(tau, chi, seed, psi, phi, k, n)


@dataclass(frozen=True)
class CodedFixedPoint:
    """
    A sequence ``coding(substitution^ω(seed))`` with a primitive substitution.

    Attributes:
        substitution: Primitive substitution prolongable on ``seed``
        seed: Seed letter
        coding: Coding onto the alphabet of the sequence
        normalization: Set when the sequence was obtained through ``normalize_morphic``
    """

    substitution: Morphism
    seed: str
    coding: Morphism
    normalization: Optional[NormalizationResult] = None

    def fixed_point(self, settings: ToolkitSettings = DEFAULT_SETTINGS) -> FixedPointStream:
        return FixedPointStream(self.substitution, self.seed, settings.memory_budget)

    def sequence(self, settings: ToolkitSettings = DEFAULT_SETTINGS) -> SymbolStream:
        return MorphicStream(self.fixed_point(settings), self.coding)


def coded_fixed_point(
    sigma: Morphism,
    a: str,
    phi: Optional[Morphism] = None,
) -> CodedFixedPoint:
    """
    Express ``φ(σ^ω(a))`` as a coding of a primitive fixed point.

    Letter-to-letter morphisms are used directly (with their target restricted
    to the letters they reach); any other morphism goes through
    ``normalize_morphic``.
    """
    require_primitive(sigma)
    if a not in prolongable_letters(sigma):
        raise DomainError(f"{sigma.name or 'σ'} is not prolongable on letter {a}")
    if phi is None:
        return CodedFixedPoint(sigma, a, Morphism.identity(sigma.source))
    if phi.source != sigma.source:
        raise DomainError(
            f"{phi.name or 'φ'} is not defined on the alphabet of {sigma.name or 'σ'}: "
            f"{sigma.source.mismatch(phi.source)}"
        )
    if all(len(image) == 1 for image in phi.images):
        return CodedFixedPoint(sigma, a, phi.restrict_target())
    result = normalize_morphic(sigma, a, phi)
    return CodedFixedPoint(result.tau, result.seed, result.chi, result)
