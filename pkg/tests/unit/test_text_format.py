"""
Unit tests for the morphism text format.
"""

import random
from pathlib import Path

import pytest

from morphic_toolkit.core.base import MorphismParseError
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Alphabet, Morphism
from morphic_toolkit.decision.normalization import normalize_morphic
from morphic_toolkit.returns.structure import build_return_structure
from morphic_toolkit.returns.substitution import lambda_morphism
from morphic_toolkit.utils.text_format import (
    format_inline,
    format_morphism,
    load_morphisms,
    parse_morphism,
    parse_morphisms,
    tokenize,
)
from tests.conftest import FIBONACCI, THUE_MORSE, random_morphism, random_primitive


class TestParsing:
    """Test cases for parsing morphism text."""

    def test_parse_fibonacci(self, fibonacci: Morphism) -> None:
        """Test the basic block form."""
        assert fibonacci.name == "fib"
        assert fibonacci.source.letters == ("0", "1")
        assert fibonacci.images == ((0, 1), (0,))

    def test_empty_image(self) -> None:
        """Test eps denotes the empty word."""
        m = parse_morphism("morphism rho on 0 1 { 0 -> a b ; 1 -> eps ; }")

        assert m.images[1] == ()
        assert m.target.letters == ("a", "b")

    def test_target_clause(self) -> None:
        """Test an explicit target may hold unused letters."""
        m = parse_morphism("morphism c on 0 1 to a b z { 0 -> a ; 1 -> b ; }")

        assert m.target.letters == ("a", "b", "z")
        assert not m.is_coding

    def test_multi_letter_labels_and_comments(self) -> None:
        """Test letters are arbitrary tokens and # starts a comment."""
        text = """
        # two morphisms in one document
        morphism p on x1 x2 { x1 -> x1 x2 ; x2 -> x1 ; }  # trailing
        morphism q on x1 x2 { x1 -> x2 ; x2 -> x1 ; }
        """
        p, q = parse_morphisms(text)

        assert p.source.letters == ("x1", "x2")
        assert q.name == "q"

    def test_tokens_carry_positions(self) -> None:
        """Test line and column numbers are 1-based."""
        tokens = tokenize("morphism m\n  on 0")

        assert (tokens[2].text, tokens[2].line, tokens[2].column) == ("on", 2, 3)

    def test_load_from_file(self, tmp_path: Path) -> None:
        """Test loading every block of a file."""
        path = tmp_path / "pair.txt"
        path.write_text(FIBONACCI + THUE_MORSE, encoding="utf-8")

        assert [m.name for m in load_morphisms(path)] == ["fib", "tm"]


class TestParseErrors:
    """Test cases for diagnostics of malformed text."""

    def test_unknown_source_letter(self) -> None:
        """Test a rule for a letter outside the source names its position."""
        text = "morphism m on 0 1 {\n  0 -> 0 1 ;\n  2 -> 0 ;\n}"

        with pytest.raises(MorphismParseError) as info:
            parse_morphism(text)

        assert (info.value.line, info.value.column) == (3, 3)
        assert "'2'" in str(info.value)

    def test_missing_rule(self) -> None:
        """Test a letter without a rule names the letter."""
        with pytest.raises(MorphismParseError, match="no rule for letters 1"):
            parse_morphism("morphism m on 0 1 { 0 -> 0 1 ; }")

    def test_duplicate_rule(self) -> None:
        """Test two rules for one letter."""
        with pytest.raises(MorphismParseError, match="second rule"):
            parse_morphism("morphism m on 0 1 { 0 -> 0 ; 0 -> 1 ; 1 -> 0 ; }")

    def test_duplicate_source_letter(self) -> None:
        """Test a source alphabet listing a letter twice."""
        with pytest.raises(MorphismParseError, match="duplicate letter"):
            parse_morphism("morphism m on 0 0 { 0 -> 0 ; }")

    def test_letter_outside_target(self) -> None:
        """Test images must stay in the declared target."""
        with pytest.raises(MorphismParseError, match="not in the target alphabet"):
            parse_morphism("morphism m on 0 to a { 0 -> b ; }")

    def test_missing_semicolon(self) -> None:
        """Test a truncated rule reports the end of input."""
        with pytest.raises(MorphismParseError, match="end of input"):
            parse_morphism("morphism m on 0 { 0 -> 0")

    def test_exactly_one_expected(self) -> None:
        """Test parse_morphism rejects documents with several blocks."""
        with pytest.raises(MorphismParseError, match="exactly one"):
            parse_morphism(FIBONACCI + THUE_MORSE)


class TestFormatting:
    """Test cases for rendering morphisms."""

    def test_round_trip(self, fibonacci: Morphism, twin_sigma: Morphism) -> None:
        """Test rendered morphisms parse back to equal objects."""
        for m in (fibonacci, twin_sigma):
            again = parse_morphism(format_morphism(m))
            assert again == m
            assert again.name == m.name

    def test_round_trip_with_target(self) -> None:
        """Test erasing morphisms and explicit targets survive rendering."""
        m = parse_morphism("morphism rho on 0 1 to a b z { 0 -> a b ; 1 -> eps ; }")

        assert parse_morphism(format_morphism(m)) == m
        assert " to a b z" in format_morphism(m)

    def test_inline(self, fibonacci: Morphism) -> None:
        """Test the one-line rendering."""
        assert format_inline(fibonacci) == "0 -> 01, 1 -> 0"

    def test_reserved_names_replaced(self, fibonacci: Morphism) -> None:
        """Test names that would not parse are replaced."""
        text = format_morphism(fibonacci, name="to")

        assert text.startswith("morphism m on")
        assert parse_morphism(text) == fibonacci


class TestEmittedMorphisms:
    """Test cases for printing the morphisms the toolkit constructs."""

    def test_constructed_morphisms_round_trip(self, rng: random.Random) -> None:
        """Test Θ, σ_u, λ, τ and χ parse back from their printed form."""
        target = Alphabet(("a", "b", "c"))
        for _ in range(30):
            sigma = random_primitive(rng)
            x = FixedPointStream(sigma, "0", memory_budget=2**20)
            rs = build_return_structure(x, x.prefix(rng.randint(1, 4)))
            letters = [rng.randrange(2) for _ in sigma.source.letters]
            letters[0], letters[-1] = 0, 1
            coding = Morphism(sigma.source, Alphabet(("a", "b")), tuple((c,) for c in letters))
            normalized = normalize_morphic(sigma, "0", random_morphism(rng, sigma.source, target))
            assert rs.substitution is not None
            emitted = [
                rs.theta,
                rs.substitution,
                lambda_morphism(rs, coding).lambda_,
                normalized.tau,
                normalized.chi,
            ]

            for m in emitted:
                assert parse_morphism(format_morphism(m)) == m
