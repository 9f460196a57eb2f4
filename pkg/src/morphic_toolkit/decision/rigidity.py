"""
Common-power search for two substitutions sharing a fixed point.

If ``σ_u^i = τ_u^j`` on the return substitutions of some prefix ``u`` and the
Parikh vectors of the return words to ``u`` generate ``ℤ^d``, then
``σ^i = τ^j``. The search walks the derivation levels of the common fixed
point and tries exponent pairs in order of increasing ``i + j``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import sympy
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from morphic_toolkit.core.base import DomainError, InvariantViolation, Verdict
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings
from morphic_toolkit.core.stream import FixedPointStream, first_difference
from morphic_toolkit.core.words import (
    IncidenceMatrix,
    Morphism,
    incidence_matrix,
    parikh_vector,
    require_primitive,
)
from morphic_toolkit.decision.certificate import (
    Certificate,
    CertificateInputs,
    Procedure,
    replay_section,
)
from morphic_toolkit.decision.normalization import coded_fixed_point
from morphic_toolkit.decision.periodicity import find_period
from morphic_toolkit.returns.structure import build_return_structure, next_tower_prefix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParikhVector:
    """Letter-occurrence counts of a word."""

    counts: Tuple[int, ...]

    @classmethod
    def of(cls, word: Sequence[int], size: int) -> "ParikhVector":
        return cls(parikh_vector(word, size))

    @property
    def length(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class LatticeReport:
    """Rank and index data of the lattice spanned by Parikh vectors."""

    rank: int
    minor_gcd: int
    dimension: int

    @property
    def full(self) -> bool:
        """The vectors generate ``ℤ^d``."""
        return self.rank == self.dimension and self.minor_gcd == 1

    @property
    def colinear(self) -> bool:
        return self.rank <= 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "minor_gcd": self.minor_gcd,
            "dimension": self.dimension,
            "full": self.full,
            "colinear": self.colinear,
        }


def lattice_report(vectors: Sequence[ParikhVector], dimension: int) -> LatticeReport:
    """
    Decide whether integer vectors generate ``ℤ^d``.

    The nonzero invariant factors of the Smith normal form of the stacked
    vectors give the rank, and their product is the gcd of the ``d × d``
    minors, that is the index of the lattice when it has full rank.
    """
    if not vectors:
        return LatticeReport(0, 0, dimension)
    matrix = sympy.Matrix([list(v.counts) for v in vectors])
    snf = smith_normal_form(matrix, domain=ZZ)
    factors = [abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0]
    if len(factors) < dimension:
        return LatticeReport(len(factors), 0, dimension)
    return LatticeReport(len(factors), math.prod(factors), dimension)


class _PowerTable:
    """Lazily computed powers of a return substitution and of its incidence matrix."""

    def __init__(self, m: Morphism) -> None:
        self.matrices: List[IncidenceMatrix] = [incidence_matrix(m).power(0), incidence_matrix(m)]
        self.morphisms: List[Optional[Morphism]] = [None, m]
        self.base = m

    def matrix(self, i: int) -> IncidenceMatrix:
        while len(self.matrices) <= i:
            self.matrices.append(self.matrices[-1] @ self.matrices[1])
        return self.matrices[i]

    def morphism(self, i: int) -> Morphism:
        while len(self.morphisms) <= i:
            previous = self.morphisms[-1]
            assert previous is not None
            self.morphisms.append(self.base.compose(previous))
        result = self.morphisms[i]
        assert result is not None
        return result


def exponent_pairs(max_exponent: int) -> Iterator[Tuple[int, int]]:
    """``(i, j)`` with ``1 ≤ i, j ≤ max_exponent`` by increasing ``i + j``, then ``i``."""
    for total in range(2, 2 * max_exponent + 1):
        for i in range(max(1, total - max_exponent), min(max_exponent, total - 1) + 1):
            yield i, total - i


def find_exponent_identity(
    sigma_u: Morphism, tau_u: Morphism, max_exponent: int
) -> Optional[Tuple[int, int]]:
    """Smallest ``(i, j)`` with ``σ_u^i = τ_u^j``; matrices are compared before words."""
    sigma_powers = _PowerTable(sigma_u)
    tau_powers = _PowerTable(tau_u)
    for i, j in exponent_pairs(max_exponent):
        if sigma_powers.matrix(i) != tau_powers.matrix(j):
            continue
        if sigma_powers.morphism(i) == tau_powers.morphism(j):
            return i, j
    return None


def powers_agree(sigma: Morphism, tau: Morphism, i: int, j: int) -> bool:
    """``σ^i = τ^j`` letter by letter, comparing lengths before words."""
    if incidence_matrix(sigma).power(i) != incidence_matrix(tau).power(j):
        return False
    return sigma.power(i) == tau.power(j)


def common_power_check(
    sigma: Morphism,
    tau: Morphism,
    a: str,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
    max_prefix_levels: Optional[int] = None,
    max_exponent: Optional[int] = None,
) -> Certificate:
    """
    Search for ``i, j`` with ``σ^i = τ^j`` for substitutions sharing ``σ^ω(a) = τ^ω(a)``.

    Derivation levels ``u_1 = x_0, u_{k+1} = Θ(0)·u_k`` are visited up to
    ``max_prefix_levels``. A level whose Parikh lattice is not full ends the
    search, since return words to longer prefixes span sublattices.

    Args:
        sigma: Primitive substitution prolongable on ``a``
        tau: Primitive substitution prolongable on ``a``, over the same letters
        a: Common seed letter
        settings: Budgets and default search bounds
        max_prefix_levels: Overrides ``settings.max_prefix_levels``
        max_exponent: Overrides ``settings.max_exponent``

    Returns:
        ``CommonPower`` with witness ``(i, j)`` meaning ``σ^i = τ^j``, or
        ``NoConclusion`` with the per-level evidence

    Raises:
        DomainError: If the fixed points differ on the verified prefix or are periodic
    """
    levels = max_prefix_levels or settings.max_prefix_levels
    exponents = max_exponent or settings.max_exponent
    require_primitive(sigma)
    require_primitive(tau)
    tau_over_sigma = tau.relabel(sigma.source)
    x = FixedPointStream(sigma, a, settings.memory_budget)
    y = FixedPointStream(tau_over_sigma, a, settings.memory_budget)
    position = first_difference(x, y, settings.comparison_horizon)
    if position is not None:
        raise DomainError(f"The fixed points differ at position {position}")
    if find_period(coded_fixed_point(sigma, a), settings).periodic:
        raise DomainError("The common fixed point is periodic")

    d = len(sigma.source)
    evidence: List[Dict[str, Any]] = []
    verdict = Verdict.NO_CONCLUSION
    witness: Dict[str, Any] = {}
    reason = f"no exponent identity with exponents up to {exponents}"
    prefix = x.prefix(1)
    for level in range(1, levels + 1):
        rs_x = build_return_structure(x, prefix)
        rs_y = build_return_structure(y, prefix)
        if rs_x.return_words != rs_y.return_words:
            raise InvariantViolation("Equal fixed points with different return words")
        assert rs_x.substitution is not None and rs_y.substitution is not None
        vectors = [ParikhVector.of(word, d) for word in rs_x.return_words]
        lattice = lattice_report(vectors, d)
        identity = find_exponent_identity(rs_x.substitution, rs_y.substitution, exponents)
        row: Dict[str, Any] = {
            "level": level,
            "prefix_length": len(prefix),
            "return_words": rs_x.labels(),
            "parikh_vectors": [list(v.counts) for v in vectors],
            "identity": list(identity) if identity else None,
            "lattice": lattice.to_dict(),
        }
        evidence.append(row)
        logger.debug(
            f"Common-power level {level}: identity {identity}, lattice rank {lattice.rank}",
            extra={"procedure": "common-power", "level": level, "prefix_length": len(prefix)},
        )
        if identity is not None and lattice.full:
            i, j = identity
            if not powers_agree(sigma, tau_over_sigma, i, j):
                raise InvariantViolation(
                    f"σ_u^{i} = τ_u^{j} on a full lattice but σ^{i} != τ^{j}"
                )
            verdict = Verdict.COMMON_POWER
            witness = {"sigma_exponent": i, "tau_exponent": j, "level": level}
            break
        if not lattice.full:
            reason = _lattice_reason(lattice, identity)
            break
        prefix = next_tower_prefix(rs_x)

    witness["evidence"] = evidence
    if verdict == Verdict.NO_CONCLUSION:
        witness["reason"] = reason
    logger.info(
        f"common-power: {verdict.value}",
        extra={"procedure": "common-power", "verdict": verdict.value},
    )
    return Certificate(
        procedure=Procedure.COMMON_POWER,
        inputs=CertificateInputs.of({"sigma": sigma, "tau": tau}, {"a": a}),
        verdict=verdict,
        witness=witness,
        bounds={"max_prefix_levels": levels, "max_exponent": exponents},
        notes=[],
        replay=replay_section(
            settings.with_overrides(max_prefix_levels=levels, max_exponent=exponents)
        ),
    )


def _lattice_reason(lattice: LatticeReport, identity: Optional[Tuple[int, int]]) -> str:
    found = "exponent identity holds but " if identity else ""
    if lattice.colinear:
        return f"{found}Parikh vectors of the return words are colinear over Q"
    if lattice.rank < lattice.dimension:
        return f"{found}Parikh vectors of the return words span a rank-{lattice.rank} lattice"
    return (
        f"{found}Parikh vectors of the return words span a sublattice "
        f"of index {lattice.minor_gcd}"
    )
