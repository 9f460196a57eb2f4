"""
Unit tests for the common-power check and Parikh lattices.
"""

import math
import random
from itertools import combinations

import pytest
import sympy

from morphic_toolkit.core.base import DomainError, Verdict
from morphic_toolkit.core.words import Morphism
from morphic_toolkit.decision.certificate import Procedure
from morphic_toolkit.decision.rigidity import (
    ParikhVector,
    common_power_check,
    exponent_pairs,
    find_exponent_identity,
    lattice_report,
    powers_agree,
)


class TestLattice:
    """Test cases for lattice_report."""

    def test_full_lattice(self) -> None:
        """Test (1,2), (1,0), (1,1) generate ℤ²."""
        vectors = [ParikhVector((1, 2)), ParikhVector((1, 0)), ParikhVector((1, 1))]
        report = lattice_report(vectors, 2)

        assert report.full
        assert report.rank == 2
        assert report.minor_gcd == 1

    def test_sublattice(self) -> None:
        """Test (2,0), (0,2) span an index-4 sublattice."""
        report = lattice_report([ParikhVector((2, 0)), ParikhVector((0, 2))], 2)

        assert not report.full
        assert report.rank == 2
        assert report.minor_gcd == 4

    def test_colinear(self) -> None:
        """Test proportional vectors have rank 1."""
        report = lattice_report([ParikhVector((2, 2)), ParikhVector((1, 1))], 2)

        assert report.colinear
        assert report.to_dict()["full"] is False

    def test_three_dimensional_index(self) -> None:
        """Test a rank-3 lattice of index 2 in ℤ³."""
        vectors = [(2, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1)]
        report = lattice_report([ParikhVector(v) for v in vectors], 3)

        assert report.rank == 3
        assert report.minor_gcd == 2
        assert not report.full

    def test_no_vectors(self) -> None:
        """Test an empty family spans the zero lattice."""
        report = lattice_report([], 2)

        assert report.rank == 0
        assert report.colinear
        assert not report.full

    def test_index_matches_minor_gcd(self, rng: random.Random) -> None:
        """Test the reported index equals the gcd of the maximal minors."""
        for _ in range(30):
            d = rng.randint(2, 3)
            rows = [tuple(rng.randint(0, 4) for _ in range(d)) for _ in range(rng.randint(d, 5))]
            matrix = sympy.Matrix([list(row) for row in rows])
            report = lattice_report([ParikhVector(row) for row in rows], d)

            assert report.rank == matrix.rank()
            if report.rank == d:
                minors = [
                    int(matrix.extract(list(chosen), list(range(d))).det())
                    for chosen in combinations(range(len(rows)), d)
                ]
                assert report.minor_gcd == math.gcd(*minors)

    def test_parikh_vector(self) -> None:
        """Test letter counts and length."""
        vector = ParikhVector.of((0, 1, 1, 0, 2), 3)

        assert vector.counts == (2, 2, 1)
        assert vector.length == 5


class TestExponents:
    """Test cases for exponent search."""

    def test_pair_order(self) -> None:
        """Test pairs by increasing i + j, then i."""
        assert list(exponent_pairs(2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_identity_found(self, fibonacci: Morphism, fibonacci_squared: Morphism) -> None:
        """Test σ² = (σ²)¹."""
        assert find_exponent_identity(fibonacci, fibonacci_squared, 4) == (2, 1)
        assert powers_agree(fibonacci, fibonacci_squared, 4, 2)

    def test_no_identity(self, fibonacci: Morphism, thue_morse: Morphism) -> None:
        """Test unrelated substitutions."""
        assert find_exponent_identity(fibonacci, thue_morse, 4) is None


class TestCommonPowerCheck:
    """Test cases for common_power_check."""

    def test_fibonacci_and_its_square(
        self, fibonacci: Morphism, fibonacci_squared: Morphism
    ) -> None:
        """Test the witness σ² = τ at the first level."""
        cert = common_power_check(fibonacci, fibonacci_squared, "0")

        assert cert.procedure == Procedure.COMMON_POWER
        assert cert.verdict == Verdict.COMMON_POWER
        assert cert.witness["sigma_exponent"] == 2
        assert cert.witness["tau_exponent"] == 1
        assert cert.witness["level"] == 1
        assert cert.witness["evidence"][0]["return_words"] == ["01", "0"]

    def test_colinear_return_words(self, twin_sigma: Morphism, twin_tau: Morphism) -> None:
        """Test a shared fixed point whose deeper return words are colinear."""
        cert = common_power_check(twin_sigma, twin_tau, "a")

        assert cert.verdict == Verdict.NO_CONCLUSION
        first, second = cert.witness["evidence"]
        assert first["return_words"] == ["abb", "a", "ab"]
        assert first["lattice"]["full"]
        assert second["prefix_length"] == 4
        assert second["identity"] is not None
        assert second["lattice"]["rank"] == 1
        assert "colinear over Q" in cert.witness["reason"]

    def test_same_substitution(self, fibonacci: Morphism) -> None:
        """Test σ = τ gives the exponents (1, 1)."""
        cert = common_power_check(fibonacci, fibonacci, "0")

        assert cert.verdict == Verdict.COMMON_POWER
        assert (cert.witness["sigma_exponent"], cert.witness["tau_exponent"]) == (1, 1)

    def test_search_bounds_recorded(
        self, fibonacci: Morphism, fibonacci_squared: Morphism
    ) -> None:
        """Test explicit bounds override the settings and reach the replay section."""
        cert = common_power_check(
            fibonacci, fibonacci_squared, "0", max_prefix_levels=3, max_exponent=5
        )

        assert cert.bounds == {"max_prefix_levels": 3, "max_exponent": 5}
        assert cert.replay["settings"]["max_exponent"] == 5

    def test_exponent_bound_too_small(
        self, fibonacci: Morphism, fibonacci_squared: Morphism
    ) -> None:
        """Test no identity is found when exponents stop at 1."""
        cert = common_power_check(
            fibonacci, fibonacci_squared, "0", max_prefix_levels=2, max_exponent=1
        )

        assert cert.verdict == Verdict.NO_CONCLUSION
        assert len(cert.witness["evidence"]) == 2
        assert "exponents up to 1" in cert.witness["reason"]

    def test_different_fixed_points(self, fibonacci: Morphism, thue_morse: Morphism) -> None:
        """Test σ^ω(a) and τ^ω(a) must agree."""
        with pytest.raises(DomainError, match="differ at position 2"):
            common_power_check(fibonacci, thue_morse, "0")

    def test_periodic_fixed_point(self, abab: Morphism) -> None:
        """Test periodic fixed points are outside the check."""
        with pytest.raises(DomainError, match="periodic"):
            common_power_check(abab, abab, "a")
