"""
Unit tests for return substitutions and λ morphisms.
"""

import random

import pytest

from morphic_toolkit.core.base import DomainError
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Alphabet, Morphism
from morphic_toolkit.returns.structure import build_return_structure
from morphic_toolkit.returns.substitution import (
    check_commutation,
    image_return_structure,
    lambda_morphism,
    return_substitution,
)
from tests.conftest import random_primitive


class TestReturnSubstitution:
    """Test cases for σ_u."""

    def test_fibonacci(self, fibonacci: Morphism) -> None:
        """Test σ_0 of Fibonacci is Fibonacci."""
        x = FixedPointStream(fibonacci, "0")
        result = return_substitution(fibonacci, x, x.prefix(1))

        assert result.inner == fibonacci
        assert result.theta.images == ((0, 1), (0,))

    def test_wrong_substitution(self, fibonacci: Morphism, fibonacci_squared: Morphism) -> None:
        """Test x must be generated by the given substitution."""
        x = FixedPointStream(fibonacci, "0")

        with pytest.raises(DomainError, match="not a fixed point"):
            return_substitution(fibonacci_squared, x, x.prefix(1))

    def test_commutation_law(self, rng: random.Random) -> None:
        """Test Θσ_u = σΘ on random substitutions and prefixes."""
        for _ in range(100):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            rs = build_return_structure(x, x.prefix(rng.randint(1, 8)))
            assert rs.substitution is not None

            check_commutation(sigma, rs)
            assert rs.theta.compose(rs.substitution) == sigma.compose(rs.theta)


class TestLambdaMorphism:
    """Test cases for λ_u."""

    def test_thue_morse_collapse(self, thue_morse: Morphism, collapse: Morphism) -> None:
        """Test collapsing Thue-Morse to one letter."""
        x = FixedPointStream(thue_morse, "0")
        result = lambda_morphism(build_return_structure(x, x.prefix(1)), collapse)

        assert result.lambda_.images == ((0, 0, 0), (0, 0), (0,))
        assert result.image_rs.labels() == ["a"]
        assert result.image_rs.is_singleton

    def test_identity_coding(self, fibonacci: Morphism) -> None:
        """Test λ of the identity is the identity."""
        x = FixedPointStream(fibonacci, "0")
        result = image_return_structure(x, Morphism.identity(fibonacci.source), 3)

        assert result.lambda_ == Morphism.identity(result.lambda_.source)
        assert result.image_rs.labels() == ["010", "01"]

    def test_image_derived_sequence(self, thue_morse: Morphism) -> None:
        """Test Θ'(λ(𝒟(x))) = φ(x)."""
        swap = Morphism.from_labels(
            thue_morse.source, Alphabet(("b", "a")), {"0": ["a"], "1": ["b"]}
        )
        x = FixedPointStream(thue_morse, "0")
        result = image_return_structure(x, swap, 2)
        image = result.image_rs

        decoded = image.theta.apply(image.derived.prefix(100))
        assert image.base.alphabet.labels_of(decoded[:150]) == image.base.labels(150)

    def test_not_a_coding(self, fibonacci: Morphism) -> None:
        """Test λ is only defined for codings."""
        x = FixedPointStream(fibonacci, "0")

        with pytest.raises(DomainError, match="not a coding"):
            lambda_morphism(build_return_structure(x, x.prefix(1)), fibonacci)

    def test_lambda_commutation(self, rng: random.Random) -> None:
        """Test φΘ = Θ'λ for random codings."""
        for _ in range(100):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            size = rng.randint(1, len(sigma.source))
            target = Alphabet(tuple("abcd"[:size]))
            images = [rng.randrange(size) for _ in sigma.source.letters]
            images[:size] = list(range(size))
            rng.shuffle(images)
            phi = Morphism(sigma.source, target, tuple((c,) for c in images), "phi")
            rs = build_return_structure(x, x.prefix(rng.randint(1, 6)))
            result = lambda_morphism(rs, phi)

            assert phi.compose(rs.theta) == result.image_rs.theta.compose(result.lambda_)
