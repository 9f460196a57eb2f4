"""
Return words to a prefix, the coding morphism Θ and derived sequences.

The return words of ``x`` to a prefix ``u`` are the words separating two
consecutive occurrences of ``u``. They are numbered in order of first
appearance in the decomposition ``x = m₀m₁m₂⋯`` and that numbering is the
only one used anywhere in the package.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from morphic_toolkit.core.base import (
    BudgetExceededError,
    DomainError,
    InvariantViolation,
    SymbolStream,
    Word,
)
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Alphabet, Morphism, find_occurrences, first_occurrence

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class ReturnStructure:
    """
    Return words of a sequence to one of its prefixes.

    Attributes:
        base: The sequence ``x``
        prefix_u: Non-empty prefix ``u`` of ``x``
        return_words: Ordered return words; code ``i`` stands for ``return_words[i]``
        theta: Θ, sending derived letter ``i`` to ``return_words[i]``
        derived: The derived sequence, with ``theta(derived) = x``
        substitution: σ_u when ``x`` is a substitution fixed point, else ``None``
    """

    base: SymbolStream
    prefix_u: Word
    return_words: Tuple[Word, ...]
    theta: Morphism
    derived: SymbolStream
    substitution: Optional[Morphism] = None
    _codes: Dict[Word, int] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        self._codes = {word: i for i, word in enumerate(self.return_words)}

    @property
    def size(self) -> int:
        return len(self.return_words)

    @property
    def derived_alphabet(self) -> Alphabet:
        return self.theta.source

    @property
    def is_singleton(self) -> bool:
        return len(self.return_words) == 1

    def code(self, word: Word) -> int:
        """Derived letter of a return word."""
        try:
            return self._codes[word]
        except KeyError:
            raise DomainError(
                f"{self.base.alphabet.render(word)!r} is not a return word to "
                f"{self.base.alphabet.render(self.prefix_u)!r}"
            )

    def factorize(self, word: Word) -> Word:
        """
        Decode a concatenation of return words into derived letters.

        The factorization is unique: the cut points are exactly the occurrences
        of ``u`` in ``word·u`` starting before ``|word|``.

        Raises:
            DomainError: If ``word`` is not a concatenation of return words
        """
        if not word:
            return ()
        pieces = cut_at_occurrences(word + self.prefix_u, self.prefix_u, len(word))
        if pieces is None:
            raise DomainError("Word does not start with an occurrence of the prefix")
        return tuple(self.code(piece) for piece in pieces)

    def labels(self) -> List[str]:
        """Return words rendered with the labels of the base alphabet."""
        return [self.base.alphabet.render(word) for word in self.return_words]

    def label_key(self) -> Tuple[Tuple[str, ...], ...]:
        """Hashable label view of the return words, comparable across alphabets."""
        return tuple(self.base.alphabet.labels_of(word) for word in self.return_words)


def cut_at_occurrences(text: Word, u: Word, limit: int) -> Optional[List[Word]]:
    """
    Cut ``text[:limit]`` at the occurrences of ``u`` starting before ``limit``.

    Returns ``None`` when ``u`` does not occur at position 0.
    """
    positions = find_occurrences(text, u, 0, limit)
    if not positions or positions[0] != 0:
        return None
    positions.append(limit)
    return [text[p:q] for p, q in zip(positions, positions[1:])]


def _require_prefix(x: SymbolStream, u: Word) -> None:
    if not u:
        raise DomainError("Return words are only defined for a non-empty prefix")
    if x.prefix(len(u)) != tuple(u):
        raise DomainError(f"{x.alphabet.render(u)!r} is not a prefix of the sequence")


def first_return_word(x: SymbolStream, u: Word) -> Word:
    """``x[0:i]`` where ``i > 0`` is the second occurrence of the prefix ``u``."""
    _require_prefix(x, u)
    horizon = max(4 * len(u), 64)
    while True:
        horizon = min(horizon, x.memory_budget)
        window = x.prefix(horizon)
        i = first_occurrence(window, u, 1)
        if i != -1:
            return window[:i]
        if horizon >= x.memory_budget:
            raise BudgetExceededError(
                f"Prefix of length {len(u)} does not recur within the memory budget "
                f"of {x.memory_budget} symbols"
            )
        horizon *= 2


def build_return_structure(x: FixedPointStream, u: Word) -> ReturnStructure:
    """
    Compute the return words of ``x = σ^ω(a)`` to the prefix ``u`` and σ_u.

    Starting from the first return word, each newly reached code ``i`` has
    ``σ(Θ(i))`` cut at the occurrences of ``u``; unseen pieces become new
    codes. Codes are reached in the order in which they are first produced by
    iterating σ_u from letter 0, which is the order of first appearance in
    ``x``. The process stops once every known code has an image, so the list
    of return words is complete.

    Args:
        x: Fixed point of a primitive substitution
        u: Non-empty prefix of ``x``

    Returns:
        The return structure, with σ_u attached

    Raises:
        DomainError: If ``u`` is not a prefix of ``x``
        BudgetExceededError: If the closure outgrows the memory budget
    """
    if not isinstance(x, FixedPointStream):
        raise DomainError("Return substitutions are computed on fixed points of substitutions")
    u = tuple(u)
    sigma = x.substitution
    words: List[Word] = [first_return_word(x, u)]
    codes: Dict[Word, int] = {words[0]: 0}
    images: Dict[int, Word] = {}

    def decompose(code: int) -> Word:
        image = sigma.apply(words[code])
        pieces = cut_at_occurrences(image + u, u, len(image))
        if pieces is None:
            raise InvariantViolation(f"Image of return word {code} does not start with the prefix")
        result = []
        for piece in pieces:
            if piece not in codes:
                codes[piece] = len(words)
                words.append(piece)
            result.append(codes[piece])
        return tuple(result)

    images[0] = decompose(0)
    if images[0][0] != 0 or len(images[0]) < 2:
        raise InvariantViolation("Return substitution is not prolongable on its first letter")
    buffer: List[int] = list(images[0])
    cursor = 1
    while len(images) < len(words):
        if cursor >= len(buffer):
            raise InvariantViolation("Return-word closure stalled")
        code = buffer[cursor]
        if code not in images:
            images[code] = decompose(code)
        buffer.extend(images[code])
        cursor += 1
        if len(buffer) > x.memory_budget:
            raise BudgetExceededError(
                f"Return-word closure exceeded the memory budget of {x.memory_budget} symbols"
            )

    derived_alphabet = Alphabet.indexed(len(words))
    inner = Morphism(
        derived_alphabet,
        derived_alphabet,
        tuple(images[i] for i in range(len(words))),
        f"{sigma.name or 'σ'}_u",
    )
    theta = Morphism(derived_alphabet, x.alphabet, tuple(words), "Θ")
    derived = FixedPointStream(inner, "0", memory_budget=x.memory_budget)
    logger.debug(
        f"{len(words)} return words to a prefix of length {len(u)}",
        extra={"prefix_length": len(u), "return_words": len(words)},
    )
    return ReturnStructure(x, u, tuple(words), theta, derived, inner)


def derived_prefix(rs: ReturnStructure, n: int) -> Word:
    """First ``n`` symbols of the derived sequence."""
    return rs.derived.prefix(n)


def theta_refinement(rs_u: ReturnStructure, rs_w: ReturnStructure) -> Morphism:
    """
    The unique Θ with ``Θ_{x,u} ∘ Θ = Θ_{x,w}`` for ``u`` a prefix of ``w``.

    Each return word to ``w`` is a concatenation of return words to ``u``;
    Θ sends its code to the sequence of their codes.

    Raises:
        DomainError: If ``u`` is not a prefix of ``w`` or the bases differ
    """
    u, w = rs_u.prefix_u, rs_w.prefix_u
    if w[: len(u)] != u:
        raise DomainError("Refinement needs the first prefix to be a prefix of the second")
    if rs_u.base is not rs_w.base:
        horizon = len(w) + sum(len(r) for r in rs_w.return_words)
        if rs_u.base.labels(horizon) != rs_w.base.labels(horizon):
            raise DomainError("Return structures are built on different sequences")
    images = tuple(rs_u.factorize(word) for word in rs_w.return_words)
    return Morphism(rs_w.derived_alphabet, rs_u.derived_alphabet, images, "Θ")


def derivation_tower(x: FixedPointStream, levels: int) -> List[ReturnStructure]:
    """
    Return structures on the prefixes ``w_1 = x_0`` and ``w_{i+1} = Θ_{x,w_i}(0)·w_i``.

    The derived sequence on ``w_i`` is the i-th iterated derivation of ``x``
    on its first letter.
    """
    if levels < 1:
        return []
    tower = [build_return_structure(x, x.prefix(1))]
    while len(tower) < levels:
        tower.append(build_return_structure(x, next_tower_prefix(tower[-1])))
    return tower


def next_tower_prefix(rs: ReturnStructure) -> Word:
    """Prefix of the next derivation level above ``rs``."""
    return rs.return_words[0] + rs.prefix_u
