"""
Shared fixtures for the morphic toolkit tests.
"""

import random
from pathlib import Path
from typing import Callable

import pytest

from morphic_toolkit.core.config import ToolkitSettings
from morphic_toolkit.core.words import Alphabet, Morphism, primitivity
from morphic_toolkit.utils.text_format import parse_morphism

FIBONACCI = """
morphism fib on 0 1 {
  0 -> 0 1 ;
  1 -> 0 ;
}
"""

FIBONACCI_SQUARED = """
morphism fib2 on 0 1 {
  0 -> 0 1 0 ;
  1 -> 0 1 ;
}
"""

THUE_MORSE = """
morphism tm on 0 1 {
  0 -> 0 1 ;
  1 -> 1 0 ;
}
"""

TWIN_SIGMA = """
morphism sigma on a b {
  a -> a b ;
  b -> b a a b b a ;
}
"""

TWIN_TAU = """
morphism tau on a b {
  a -> a b b a a b ;
  b -> b a ;
}
"""

ABAB = """
morphism abab on a b {
  a -> a b ;
  b -> a b ;
}
"""

COLLAPSE = """
morphism collapse on 0 1 {
  0 -> a ;
  1 -> a ;
}
"""


def random_primitive(rng: random.Random, max_letters: int = 4, max_length: int = 3) -> Morphism:
    """A random primitive substitution on letters ``0..d-1`` prolongable on ``0``."""
    while True:
        d = rng.randint(2, max_letters)
        alphabet = Alphabet.indexed(d)
        images = []
        for c in range(d):
            length = rng.randint(2 if c == 0 else 1, max_length)
            word = [rng.randrange(d) for _ in range(length)]
            if c == 0:
                word[0] = 0
            images.append(tuple(word))
        m = Morphism(alphabet, alphabet, tuple(images), "σ")
        if primitivity(m).primitive:
            return m


def random_morphism(
    rng: random.Random, source: Alphabet, target: Alphabet, max_length: int = 2
) -> Morphism:
    """A random morphism that does not erase every letter."""
    while True:
        images = tuple(
            tuple(rng.randrange(len(target)) for _ in range(rng.randint(0, max_length)))
            for _ in range(len(source))
        )
        if any(images):
            return Morphism(source, target, images, "rho")


@pytest.fixture
def fibonacci() -> Morphism:
    return parse_morphism(FIBONACCI)


@pytest.fixture
def fibonacci_squared() -> Morphism:
    return parse_morphism(FIBONACCI_SQUARED)


@pytest.fixture
def thue_morse() -> Morphism:
    return parse_morphism(THUE_MORSE)


@pytest.fixture
def twin_sigma() -> Morphism:
    return parse_morphism(TWIN_SIGMA)


@pytest.fixture
def twin_tau() -> Morphism:
    return parse_morphism(TWIN_TAU)


@pytest.fixture
def abab() -> Morphism:
    return parse_morphism(ABAB)


@pytest.fixture
def collapse() -> Morphism:
    return parse_morphism(COLLAPSE)


@pytest.fixture
def settings() -> ToolkitSettings:
    return ToolkitSettings()


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240607)


@pytest.fixture
def morphism_file(tmp_path: Path) -> Callable[[str, str], str]:
    """Write morphism text to a temporary file and return its path."""

    def write(name: str, text: str) -> str:
        path = tmp_path / f"{name}.txt"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
