"""
Alphabets, words, morphisms and incidence matrices.

Letters are canonicalized to dense indices 0..d-1 at construction time; every
alphabet keeps the human-readable label of each index so that words can be
rendered and compared across alphabets.
"""

import logging
import re
from dataclasses import dataclass, field
from itertools import chain
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from morphic_toolkit.core.base import DomainError, Word

logger = logging.getLogger(__name__)

# Keywords and separators of the morphism text format; letters may not use them.
RESERVED_LABELS = frozenset({"morphism", "on", "to", "eps", "->"})
_SEPARATOR = re.compile(r"[\s{};#]")


@dataclass(frozen=True)
class Alphabet:
    """An ordered finite set of opaque letter labels."""

    letters: Tuple[str, ...]
    _index: Dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.letters:
            raise DomainError("An alphabet must contain at least one letter")
        index: Dict[str, int] = {}
        for i, letter in enumerate(self.letters):
            if not letter or _SEPARATOR.search(letter):
                raise DomainError(f"Invalid letter label: {letter!r}")
            if letter in RESERVED_LABELS:
                raise DomainError(f"Letter label {letter!r} is reserved by the morphism format")
            if letter in index:
                raise DomainError(f"Duplicate letter in alphabet: {letter}")
            index[letter] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def indexed(cls, size: int) -> "Alphabet":
        """Fresh alphabet ``0, 1, …, size-1`` used for derived alphabets."""
        return cls(tuple(str(i) for i in range(size)))

    @classmethod
    def markers(cls, pairs: Iterable[Tuple[str, int]]) -> "Alphabet":
        """Marker alphabet with one letter ``(c,k)`` per pair."""
        return cls(tuple(f"({c},{k})" for c, k in pairs))

    def __len__(self) -> int:
        return len(self.letters)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        """Canonical index of a letter label."""
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"Letter {label!r} is not in alphabet {{{' '.join(self.letters)}}}")

    def mismatch(self, other: "Alphabet") -> str:
        """How ``other`` differs from this alphabet, naming the letters involved."""
        missing = [c for c in self.letters if c not in other]
        extra = [c for c in other.letters if c not in self]
        parts = []
        if missing:
            parts.append(f"missing {' '.join(missing)}")
        if extra:
            parts.append(f"extra {' '.join(extra)}")
        if not parts:
            parts.append(f"letters ordered {other.text()} instead of {self.text()}")
        return "; ".join(parts)

    def text(self) -> str:
        return " ".join(self.letters)

    def label(self, index: int) -> str:
        return self.letters[index]

    def word(self, labels: Iterable[str]) -> Word:
        """Convert a sequence of labels into a word of indices."""
        return tuple(self.index(label) for label in labels)

    def labels_of(self, word: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.letters[i] for i in word)

    def render(self, word: Sequence[int]) -> str:
        """Render a word; single-character alphabets are concatenated, others space-separated."""
        if all(len(letter) == 1 for letter in self.letters):
            return "".join(self.labels_of(word))
        return " ".join(self.labels_of(word))


@dataclass(frozen=True)
class Morphism:
    """
    A morphism of free monoids ``source* → target*``.

    ``images[j]`` is the image of the source letter with index ``j``, as a word
    over the target alphabet.
    """

    source: Alphabet
    target: Alphabet
    images: Tuple[Word, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if len(self.images) != len(self.source):
            raise DomainError(
                f"Morphism {self.name or '<anonymous>'} defines {len(self.images)} images "
                f"for {len(self.source)} letters"
            )
        size = len(self.target)
        for image in self.images:
            if any(not 0 <= c < size for c in image):
                raise DomainError(f"Image {image} leaves the target alphabet")

    @classmethod
    def from_labels(
        cls,
        source: Alphabet,
        target: Alphabet,
        rules: Mapping[str, Sequence[str]],
        name: str = "",
    ) -> "Morphism":
        """
        Build a morphism from a label mapping.

        Args:
            source: Source alphabet
            target: Target alphabet
            rules: Image of each source letter as a sequence of target labels
            name: Optional display name

        Returns:
            The morphism

        Raises:
            DomainError: If a source letter has no rule or a rule names an unknown letter
        """
        missing = [a for a in source.letters if a not in rules]
        if missing:
            raise DomainError(f"No image given for letters: {' '.join(missing)}")
        extra = [a for a in rules if a not in source]
        if extra:
            raise DomainError(
                f"Rules given for letters outside the source alphabet: {' '.join(extra)}"
            )
        images = tuple(target.word(rules[a]) for a in source.letters)
        return cls(source, target, images, name)

    @classmethod
    def identity(cls, alphabet: Alphabet, name: str = "id") -> "Morphism":
        return cls(alphabet, alphabet, tuple((i,) for i in range(len(alphabet))), name)

    def __call__(self, word: Sequence[int]) -> Word:
        return self.apply(word)

    def apply(self, word: Sequence[int]) -> Word:
        images = self.images
        return tuple(chain.from_iterable(images[c] for c in word))

    def image(self, letter: int) -> Word:
        return self.images[letter]

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(image) for image in self.images)

    @property
    def norm(self) -> int:
        """|σ|, the maximal image length."""
        return max(self.lengths)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    @property
    def is_non_erasing(self) -> bool:
        return all(self.images)

    @property
    def is_erasing(self) -> bool:
        return not self.is_non_erasing

    @property
    def erases_everything(self) -> bool:
        return not any(self.images)

    @property
    def is_coding(self) -> bool:
        """Every image is a single letter and the images cover the target."""
        if any(len(image) != 1 for image in self.images):
            return False
        return {image[0] for image in self.images} == set(range(len(self.target)))

    def compose(self, other: "Morphism") -> "Morphism":
        """Return ``self ∘ other``."""
        if other.target != self.source:
            raise DomainError(
                f"Cannot compose {self.name or 'morphism'} after {other.name or 'morphism'}: "
                f"target alphabet {self.source.mismatch(other.target)}"
            )
        images = tuple(self.apply(image) for image in other.images)
        return Morphism(other.source, self.target, images, _compose_name(self.name, other.name))

    def power(self, n: int) -> "Morphism":
        """Return the ``n``-th iterate of an endomorphism."""
        require_endomorphism(self)
        if n < 0:
            raise DomainError("Morphism powers must be non-negative")
        result = Morphism.identity(self.source)
        for _ in range(n):
            result = Morphism(self.source, self.target, tuple(self.apply(w) for w in result.images))
        return Morphism(result.source, result.target, result.images, _power_name(self.name, n))

    def renamed(self, name: str) -> "Morphism":
        return Morphism(self.source, self.target, self.images, name)

    def relabel(self, source: Alphabet, target: Optional[Alphabet] = None) -> "Morphism":
        """
        The same label mapping expressed over reordered alphabets.

        Raises:
            DomainError: If the new alphabets do not hold the same letters
        """
        target = target or (source if self.is_endomorphism else self.target)
        for old, new in ((self.source, source), (self.target, target)):
            if set(old.letters) != set(new.letters):
                raise DomainError(
                    f"Alphabets differ: {' '.join(sorted(set(old.letters) ^ set(new.letters)))}"
                )
        return Morphism.from_labels(source, target, dict(self.rules()), self.name)

    def restrict_target(self) -> "Morphism":
        """Drop target letters that no image uses, keeping the target order."""
        used = {c for image in self.images for c in image}
        letters = tuple(self.target.label(i) for i in range(len(self.target)) if i in used)
        if not letters:
            raise DomainError(f"{self.name or 'Morphism'} erases every letter")
        return Morphism.from_labels(self.source, Alphabet(letters), dict(self.rules()), self.name)

    def rules(self) -> List[Tuple[str, Tuple[str, ...]]]:
        """Label view of the morphism: ``[(letter, image labels), …]``."""
        return [
            (self.source.label(j), self.target.labels_of(image))
            for j, image in enumerate(self.images)
        ]

    def label_key(self) -> Tuple[Tuple[str, Tuple[str, ...]], ...]:
        """Hashable label view used to compare morphisms across alphabets."""
        return tuple(self.rules())


def _compose_name(outer: str, inner: str) -> str:
    if outer and inner:
        return f"{outer}{inner}"
    return outer or inner


def _power_name(name: str, n: int) -> str:
    return f"{name}^{n}" if name and n != 1 else name


def require_endomorphism(m: Morphism) -> None:
    if not m.is_endomorphism:
        raise DomainError(f"{m.name or 'Morphism'} is not an endomorphism (source != target)")


class IncidenceMatrix:
    """
    Incidence matrix of a morphism.

    Entry ``(i, j)`` counts the occurrences of target letter ``i`` in the image of
    source letter ``j``. Entries are exact Python integers.
    """

    def __init__(self, entries: np.ndarray) -> None:
        self.entries = entries.astype(object)
        self.entries.setflags(write=False)

    @property
    def shape(self) -> Tuple[int, int]:
        rows, cols = self.entries.shape
        return int(rows), int(cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IncidenceMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.to_tuple())

    def __repr__(self) -> str:
        return f"IncidenceMatrix({self.to_list()})"

    def to_list(self) -> List[List[int]]:
        return [[int(v) for v in row] for row in self.entries]

    def to_tuple(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(row) for row in self.to_list())

    def column_sums(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.entries.sum(axis=0))

    def __matmul__(self, other: "IncidenceMatrix") -> "IncidenceMatrix":
        return IncidenceMatrix(self.entries.dot(other.entries))

    def power(self, n: int) -> "IncidenceMatrix":
        """Exact integer power of a square matrix."""
        rows, cols = self.shape
        if rows != cols:
            raise DomainError("Only square incidence matrices have powers")
        result = np.identity(rows, dtype=object)
        base = self.entries
        # square-and-multiply on object arrays keeps the arithmetic exact
        while n:
            if n & 1:
                result = result.dot(base)
            base = base.dot(base)
            n >>= 1
        return IncidenceMatrix(result)

    def is_positive(self) -> bool:
        return bool((self.entries > 0).all())


def incidence_matrix(m: Morphism) -> IncidenceMatrix:
    """Incidence matrix of ``m`` (rows: target letters, columns: source letters)."""
    size = len(m.target)
    columns = [
        np.bincount(np.asarray(image, dtype=np.int64), minlength=size) for image in m.images
    ]
    return IncidenceMatrix(np.stack(columns, axis=1))


@dataclass(frozen=True)
class PrimitivityResult:
    """Outcome of the primitivity test."""

    primitive: bool
    positivity_exponent: Optional[int] = None


def wielandt_bound(d: int) -> int:
    """Largest possible minimal positivity exponent of a primitive d×d matrix."""
    return (d - 1) ** 2 + 1


def horn_bound(d: int) -> int:
    """The (n-1)n^n exponent bound kept as a documented certificate constant."""
    return (d - 1) * d**d


def primitivity(m: Morphism) -> PrimitivityResult:
    """
    Decide primitivity and find the minimal positivity exponent.

    The search runs over boolean reachability matrices and stops at the first
    all-positive power, capped at the Wielandt bound (d-1)²+1.

    Raises:
        DomainError: If ``m`` is not an endomorphism
    """
    require_endomorphism(m)
    d = len(m.source)
    pattern = (incidence_matrix(m).entries > 0).astype(np.int64)
    power = pattern.copy()
    for k in range(1, wielandt_bound(d) + 1):
        if power.all():
            logger.debug(f"{m.name or 'morphism'} is primitive with exponent {k}")
            return PrimitivityResult(True, k)
        power = (power @ pattern > 0).astype(np.int64)
    return PrimitivityResult(False, None)


def require_primitive(m: Morphism) -> int:
    """Return the minimal positivity exponent of ``m`` or raise ``DomainError``."""
    result = primitivity(m)
    if not result.primitive or result.positivity_exponent is None:
        raise DomainError(f"{m.name or 'Substitution'} is not primitive")
    return result.positivity_exponent


def mortal_letters(m: Morphism) -> FrozenSet[int]:
    """Letters whose iterated images eventually become empty."""
    require_endomorphism(m)
    mortal: set = set()
    changed = True
    while changed:
        changed = False
        for j, image in enumerate(m.images):
            if j not in mortal and all(c in mortal for c in image):
                mortal.add(j)
                changed = True
    return frozenset(mortal)


def prolongable_letters(m: Morphism) -> FrozenSet[str]:
    """
    Letters ``a`` with ``m(a) = a·u``, ``u`` non-empty and ``|m^n(a)| → ∞``.

    The growth condition holds exactly when ``u`` contains a non-mortal letter,
    since ``m^n(a) = a·u·m(u)·…·m^{n-1}(u)``.
    """
    require_endomorphism(m)
    mortal = mortal_letters(m)
    result = set()
    for j, image in enumerate(m.images):
        if len(image) >= 2 and image[0] == j and any(c not in mortal for c in image[1:]):
            result.add(m.source.label(j))
    return frozenset(result)


def _as_text(word: Sequence[int]) -> str:
    # str.find runs in C; indices are mapped to code points one-to-one
    return "".join(map(chr, word))


def find_occurrences(
    text: Sequence[int], pattern: Sequence[int], start: int = 0, stop: Optional[int] = None
) -> List[int]:
    """
    All (possibly overlapping) occurrences of ``pattern`` in ``text``.

    Args:
        text: Word to scan
        pattern: Non-empty word to look for
        start: Smallest starting position reported
        stop: Occurrences must start strictly before ``stop`` (default: anywhere)

    Returns:
        Ascending list of starting positions
    """
    if not pattern:
        raise DomainError("Cannot search for occurrences of the empty word")
    haystack = _as_text(text)
    needle = _as_text(pattern)
    limit = len(haystack) if stop is None else min(stop, len(haystack))
    positions: List[int] = []
    i = haystack.find(needle, start)
    while i != -1 and i < limit:
        positions.append(i)
        i = haystack.find(needle, i + 1)
    return positions


def first_occurrence(text: Sequence[int], pattern: Sequence[int], start: int = 0) -> int:
    """Position of the first occurrence at or after ``start``, or -1."""
    if not pattern:
        raise DomainError("Cannot search for occurrences of the empty word")
    return _as_text(text).find(_as_text(pattern), start)


def parikh_vector(word: Sequence[int], size: int) -> Tuple[int, ...]:
    """Letter-occurrence counts of ``word`` over an alphabet of ``size`` letters."""
    counts = np.bincount(np.asarray(word, dtype=np.int64), minlength=size)
    return tuple(int(v) for v in counts)


def length_vector(m: Morphism, n: int) -> Tuple[int, ...]:
    """``(|m^n(a)|)_a`` from the column sums of the n-th incidence matrix power."""
    require_endomorphism(m)
    return incidence_matrix(m).power(n).column_sums()
