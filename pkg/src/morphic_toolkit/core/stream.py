"""
Lazily materialized infinite sequences: fixed points of substitutions and their
images under non-erasing morphisms.
"""

import logging
from typing import List, Optional

from morphic_toolkit.core.base import DomainError, InvariantViolation, SymbolStream, Word
from morphic_toolkit.core.config import DEFAULT_SETTINGS
from morphic_toolkit.core.words import (
    Alphabet,
    Morphism,
    find_occurrences,
    prolongable_letters,
    require_endomorphism,
)

logger = logging.getLogger(__name__)


class FixedPointStream(SymbolStream):
    """
    The fixed point ``σ^ω(a)`` of a substitution prolongable on ``a``.

    The buffer always equals ``σ(buffer[:cursor])``; it starts as ``σ(a)`` with
    cursor 1 and grows by appending the image of the letter under the cursor,
    so already materialized symbols are never rewritten.
    """

    def __init__(
        self,
        substitution: Morphism,
        seed: str,
        memory_budget: Optional[int] = None,
    ) -> None:
        super().__init__(memory_budget or DEFAULT_SETTINGS.memory_budget)
        require_endomorphism(substitution)
        if seed not in substitution.source:
            raise DomainError(
                f"Seed letter {seed!r} is not in the alphabet of {substitution.name or 'σ'}"
            )
        if seed not in prolongable_letters(substitution):
            raise DomainError(
                f"{substitution.name or 'Substitution'} is not prolongable on letter {seed}"
            )
        self.substitution = substitution
        self.seed = seed
        self.seed_index = substitution.source.index(seed)
        self._buffer: List[int] = list(substitution.images[self.seed_index])
        self._cursor = 1

    @property
    def alphabet(self) -> Alphabet:
        return self.substitution.source

    @property
    def materialized(self) -> int:
        return len(self._buffer)

    def prefix(self, n: int) -> Word:
        if n < 0:
            raise DomainError("Prefix length must be non-negative")
        if n > len(self._buffer):
            self._extend(n)
        return tuple(self._buffer[:n])

    def _extend(self, n: int) -> None:
        self._check_budget(n, f"{self.substitution.name or 'σ'}^ω({self.seed})")
        images = self.substitution.images
        buffer = self._buffer
        cursor = self._cursor
        while len(buffer) < n:
            if cursor >= len(buffer):
                # only possible when the seed letter does not grow
                raise InvariantViolation("Fixed-point buffer stopped growing")
            buffer.extend(images[buffer[cursor]])
            cursor += 1
        self._cursor = cursor
        logger.debug(f"Materialized {len(buffer)} symbols of {self!r}")

    def __repr__(self) -> str:
        return f"FixedPointStream({self.substitution.name or 'σ'}, seed={self.seed!r})"


class MorphicStream(SymbolStream):
    """The image ``φ(x)`` of a stream under a non-erasing morphism ``φ``."""

    def __init__(
        self,
        base: SymbolStream,
        morphism: Morphism,
        memory_budget: Optional[int] = None,
    ) -> None:
        super().__init__(memory_budget or base.memory_budget)
        if morphism.source != base.alphabet:
            raise DomainError(
                f"Morphism {morphism.name or ''} is not defined on the alphabet of the sequence: "
                f"{base.alphabet.mismatch(morphism.source)}"
            )
        if not morphism.is_non_erasing:
            raise DomainError("Images are only materialized under non-erasing morphisms")
        self.base = base
        self.morphism = morphism
        self._buffer: List[int] = []
        self._consumed = 0

    @property
    def alphabet(self) -> Alphabet:
        return self.morphism.target

    def prefix(self, n: int) -> Word:
        if n < 0:
            raise DomainError("Prefix length must be non-negative")
        if n > len(self._buffer):
            self._check_budget(n)
            images = self.morphism.images
            while len(self._buffer) < n:
                # each base symbol yields at least one output symbol
                needed = n - len(self._buffer)
                chunk = self.base.prefix(self._consumed + needed)[self._consumed :]
                for c in chunk:
                    self._buffer.extend(images[c])
                self._consumed += len(chunk)
        return tuple(self._buffer[:n])

    def __repr__(self) -> str:
        return f"MorphicStream({self.morphism.name or 'φ'}, {self.base!r})"


def fixed_point_prefix(s: SymbolStream, n: int) -> Word:
    """First ``n`` symbols of the stream; longer requests extend, never rewrite."""
    return s.prefix(n)


def factor_occurrences(x: SymbolStream, w: Word, horizon: int) -> List[int]:
    """
    Occurrences of ``w`` inside the first ``horizon`` symbols of ``x``.

    Returns all ``i ≤ horizon - |w|`` with ``x[i:i+|w|] = w``, ascending. The
    empty word occurs at every position ``0..horizon``.
    """
    if len(w) > horizon:
        return []
    if not w:
        return list(range(horizon + 1))
    return find_occurrences(x.prefix(horizon), w)


def image_prefix(x: SymbolStream, morphism: Morphism, n: int) -> Word:
    """
    First ``n`` symbols of ``morphism(x)`` for any morphism, erasing ones included.

    Raises:
        DomainError: If the image is finite within the memory budget of ``x``
    """
    length = max(n, 1)
    while True:
        length = min(length, x.memory_budget)
        image = morphism.apply(x.prefix(length))
        if len(image) >= n:
            return image[:n]
        if length >= x.memory_budget:
            raise DomainError("Image of the sequence is too short within the memory budget")
        length *= 2


def first_difference(x: SymbolStream, y: SymbolStream, horizon: int) -> Optional[int]:
    """
    First position below ``horizon`` where the label sequences of ``x`` and ``y`` differ.

    Sequences over different alphabets are compared through their labels.
    """
    left = x.labels(horizon)
    right = y.labels(horizon)
    for i, (p, q) in enumerate(zip(left, right)):
        if p != q:
            return i
    return None
