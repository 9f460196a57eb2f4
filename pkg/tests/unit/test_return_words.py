"""
Unit tests for return words, derived sequences and the derivation tower.
"""

import random

import pytest

from morphic_toolkit.analysis.bounds import bound_set, return_substitution_count_bound
from morphic_toolkit.core.base import DomainError
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Morphism, find_occurrences
from morphic_toolkit.returns.structure import (
    build_return_structure,
    derivation_tower,
    derived_prefix,
    first_return_word,
    next_tower_prefix,
    theta_refinement,
)
from morphic_toolkit.returns.substitution import return_substitution
from tests.conftest import random_primitive


class TestReturnWords:
    """Test cases for return words to a prefix."""

    def test_fibonacci_return_words(self, fibonacci: Morphism) -> None:
        """Test the return words to 0 are 01 and 0."""
        x = FixedPointStream(fibonacci, "0")
        rs = build_return_structure(x, x.prefix(1))

        assert rs.labels() == ["01", "0"]
        assert rs.size == 2

    def test_fibonacci_is_its_own_derivation(self, fibonacci: Morphism) -> None:
        """Test 𝒟_0(x) = x on the first thousand symbols."""
        x = FixedPointStream(fibonacci, "0")
        rs = build_return_structure(x, x.prefix(1))

        assert rs.substitution == fibonacci
        assert rs.derived.labels(1000) == x.labels(1000)

    def test_thue_morse_return_words(self, thue_morse: Morphism) -> None:
        """Test the return words to 0 in first-appearance order."""
        x = FixedPointStream(thue_morse, "0")
        rs = build_return_structure(x, x.prefix(1))

        assert rs.labels() == ["011", "01", "0"]
        assert rs.derived_alphabet.render(derived_prefix(rs, 15)) == "012021012102012"

    def test_thue_morse_return_substitution(self, thue_morse: Morphism) -> None:
        """Test σ_u for Thue-Morse on 0."""
        x = FixedPointStream(thue_morse, "0")
        rs = build_return_structure(x, x.prefix(1))

        assert rs.substitution is not None
        assert dict(rs.substitution.rules()) == {
            "0": ("0", "1", "2"),
            "1": ("0", "2"),
            "2": ("1",),
        }

    def test_theta_decodes_derived_sequence(self, thue_morse: Morphism) -> None:
        """Test Θ(𝒟(x)) = x."""
        x = FixedPointStream(thue_morse, "0")
        rs = build_return_structure(x, x.prefix(3))

        decoded = rs.theta.apply(rs.derived.prefix(200))
        assert decoded[:300] == x.prefix(300)

    def test_first_return_word(self, fibonacci: Morphism) -> None:
        """Test the first return word to 010."""
        x = FixedPointStream(fibonacci, "0")

        assert x.alphabet.render(first_return_word(x, x.prefix(3))) == "010"

    def test_not_a_prefix(self, fibonacci: Morphism) -> None:
        """Test u must be a prefix of x."""
        x = FixedPointStream(fibonacci, "0")

        with pytest.raises(DomainError, match="not a prefix"):
            build_return_structure(x, (1,))

    def test_empty_prefix(self, fibonacci: Morphism) -> None:
        """Test u must be non-empty."""
        x = FixedPointStream(fibonacci, "0")

        with pytest.raises(DomainError, match="non-empty"):
            build_return_structure(x, ())

    def test_periodic_sequence_has_one_return_word(self, abab: Morphism) -> None:
        """Test (ab)^ω has the single return word ab to a."""
        x = FixedPointStream(abab, "a")
        rs = build_return_structure(x, x.prefix(1))

        assert rs.is_singleton
        assert rs.labels() == ["ab"]


class TestFactorization:
    """Test cases for decoding concatenations of return words."""

    def test_factorize(self, thue_morse: Morphism) -> None:
        """Test decoding 011 0 01 011."""
        x = FixedPointStream(thue_morse, "0")
        rs = build_return_structure(x, x.prefix(1))
        word = x.alphabet.word("011001011")

        assert rs.factorize(word) == (0, 2, 1, 0)

    def test_factorize_rejects_other_words(self, thue_morse: Morphism) -> None:
        """Test a word that is not a concatenation of return words."""
        x = FixedPointStream(thue_morse, "0")
        rs = build_return_structure(x, x.prefix(1))

        with pytest.raises(DomainError):
            rs.factorize(x.alphabet.word("0111"))

    def test_code_injectivity(self, rng: random.Random) -> None:
        """Test random concatenations of return words decode uniquely."""
        for _ in range(100):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            rs = build_return_structure(x, x.prefix(rng.randint(1, 6)))
            codes = tuple(rng.randrange(rs.size) for _ in range(rng.randint(1, 20)))

            assert rs.factorize(rs.theta.apply(codes)) == codes


class TestDerivationTower:
    """Test cases for iterated derivation on the first letter."""

    def test_thue_morse_tower(self, thue_morse: Morphism) -> None:
        """Test 𝒟² and 𝒟³ of Thue-Morse agree on ten symbols."""
        x = FixedPointStream(thue_morse, "0")
        tower = derivation_tower(x, 3)

        second = tower[1].derived_alphabet.render(tower[1].derived.prefix(10))
        third = tower[2].derived_alphabet.render(tower[2].derived.prefix(10))
        assert second == third == "0123013201"

    def test_tower_matches_iterated_derivation(self, thue_morse: Morphism) -> None:
        """Test the level-2 derived sequence is the derivation of 𝒟(x) on its first letter."""
        x = FixedPointStream(thue_morse, "0")
        first, second = derivation_tower(x, 2)
        y = first.derived
        assert isinstance(y, FixedPointStream)
        again = build_return_structure(y, y.prefix(1))

        assert again.derived.prefix(200) == second.derived.prefix(200)

    def test_tower_prefixes(self, fibonacci: Morphism) -> None:
        """Test w_{i+1} = Θ(0)·w_i."""
        x = FixedPointStream(fibonacci, "0")
        tower = derivation_tower(x, 3)

        assert tower[1].prefix_u == next_tower_prefix(tower[0]) == x.prefix(3)
        assert [len(rs.prefix_u) for rs in tower] == [1, 3, 6]

    def test_empty_tower(self, fibonacci: Morphism) -> None:
        """Test zero levels."""
        assert derivation_tower(FixedPointStream(fibonacci, "0"), 0) == []


class TestRefinement:
    """Test cases for Θ with Θ_u∘Θ = Θ_w."""

    def test_fibonacci_refinement(self, fibonacci: Morphism) -> None:
        """Test refining 0 into 010."""
        x = FixedPointStream(fibonacci, "0")
        rs_u = build_return_structure(x, x.prefix(1))
        rs_w = build_return_structure(x, x.prefix(3))
        refinement = theta_refinement(rs_u, rs_w)

        assert rs_w.labels() == ["010", "01"]
        assert refinement.images == ((0, 1), (0,))
        assert rs_u.theta.compose(refinement) == rs_w.theta

    def test_refinement_needs_prefix_order(self, fibonacci: Morphism) -> None:
        """Test the shorter prefix must come first."""
        x = FixedPointStream(fibonacci, "0")
        rs_u = build_return_structure(x, x.prefix(1))
        rs_w = build_return_structure(x, x.prefix(3))

        with pytest.raises(DomainError, match="prefix"):
            theta_refinement(rs_w, rs_u)

    def test_composition_law(self, rng: random.Random) -> None:
        """Test 𝒟_v(𝒟_u(x)) = 𝒟_{Θ_u(v)u}(x) with matching return words."""
        for _ in range(100):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            rs_u = build_return_structure(x, x.prefix(rng.randint(1, 4)))
            y = rs_u.derived
            assert isinstance(y, FixedPointStream)
            v = y.prefix(rng.randint(1, 3))
            rs_v = build_return_structure(y, v)
            rs_w = build_return_structure(x, rs_u.theta.apply(v) + rs_u.prefix_u)

            assert rs_w.return_words == tuple(rs_u.theta.apply(r) for r in rs_v.return_words)
            assert rs_w.derived.prefix(1000) == rs_v.derived.prefix(1000)


class TestUniformRecurrence:
    """Test cases for the gaps between occurrences of a prefix."""

    def test_gaps_are_return_words(self, rng: random.Random) -> None:
        """Test every gap between consecutive occurrences of u is a known return word."""
        for _ in range(50):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            u = x.prefix(rng.randint(1, 4))
            rs = build_return_structure(x, u)
            k_sigma = bound_set(sigma).k_sigma
            text = x.prefix(2000)
            occurrences = find_occurrences(text, u)

            for start, end in zip(occurrences, occurrences[1:]):
                assert text[start:end] in rs.return_words
            assert max(len(r) for r in rs.return_words) <= k_sigma * len(u)

    def test_every_window_contains_prefix(self, thue_morse: Morphism) -> None:
        """Test each window of length max|r| + |u| - 1 contains u."""
        x = FixedPointStream(thue_morse, "0")
        for length in range(1, 6):
            u = x.prefix(length)
            rs = build_return_structure(x, u)
            window = max(len(r) for r in rs.return_words) + len(u) - 1
            text = x.prefix(1500)

            for i in range(len(text) - window + 1):
                assert find_occurrences(text[i : i + window], u)


class TestTowerSubstitutions:
    """Test cases for return substitutions along the derivation tower."""

    @pytest.mark.parametrize("fixture", ["fibonacci", "thue_morse"])
    def test_return_substitutions_repeat(
        self, fixture: str, request: pytest.FixtureRequest
    ) -> None:
        """Test the σ_u of the tower levels repeat and stay within the count bound."""
        sigma: Morphism = request.getfixturevalue(fixture)
        x = FixedPointStream(sigma, "0")
        tower = derivation_tower(x, 6)
        inner = [return_substitution(sigma, x, rs.prefix_u).inner for rs in tower]
        distinct = {m.label_key() for m in inner}
        count_bound = return_substitution_count_bound(bound_set(sigma), literal=True)

        assert len(distinct) < len(inner)
        assert inner[-1].label_key() in {m.label_key() for m in inner[:-1]}
        assert len(distinct) <= count_bound.value()
