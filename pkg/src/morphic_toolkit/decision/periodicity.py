"""
Periodicity of morphic sequences generated by primitive substitutions.

The sequence is brought to the form ``χ(x)`` with ``χ`` a coding and ``x`` the
fixed point of a substitution whose incidence matrix is positive. Derivation
levels ``u_1 = x_0, u_{i+1} = Θ_{x,u_i}(0)·u_i`` are then visited: a single
return word to ``χ(u_i)`` makes ``χ(x)`` periodic, and a repeated pair
``(λ_i, σ_i)`` closes the orbit of levels without one.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from morphic_toolkit.analysis.bounds import bound_set, periodicity_bound_expression
from morphic_toolkit.core.base import BudgetExceededError, Verdict
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import Morphism, require_primitive
from morphic_toolkit.decision.certificate import (
    Certificate,
    CertificateInputs,
    Procedure,
    guarded_bounds,
    labels_text,
    replay_section,
)
from morphic_toolkit.decision.normalization import CodedFixedPoint, coded_fixed_point
from morphic_toolkit.returns.structure import build_return_structure, next_tower_prefix
from morphic_toolkit.returns.substitution import lambda_morphism

logger = logging.getLogger(__name__)


@dataclass
class PeriodicityOutcome:
    """
    Result of the level iteration.

    Attributes:
        periodic: Whether the coded sequence is periodic
        level: Level at which the answer was reached
        period_word: Labels of the period word when periodic
        cycle: ``(j, i)`` with equal states at levels ``j < i`` when aperiodic
        substitution: Positive power of the substitution used for the iteration
        levels: Per-level evidence
    """

    periodic: bool
    level: int
    period_word: Tuple[str, ...] = ()
    cycle: Optional[Tuple[int, int]] = None
    substitution: Optional[Morphism] = None
    levels: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def period(self) -> int:
        return len(self.period_word)


def find_period(
    coded: CodedFixedPoint, settings: ToolkitSettings = DEFAULT_SETTINGS
) -> PeriodicityOutcome:
    """
    Decide whether ``coded.coding(coded.substitution^ω(seed))`` is periodic.

    Raises:
        BudgetExceededError: If no answer is reached within ``max_levels`` levels
    """
    k0 = require_primitive(coded.substitution)
    positive = coded.substitution.power(k0) if k0 > 1 else coded.substitution
    x = FixedPointStream(positive, coded.seed, settings.memory_budget)
    seen: Dict[Tuple[Morphism, Morphism], int] = {}
    evidence: List[Dict[str, Any]] = []
    prefix = x.prefix(1)
    for level in range(1, settings.max_levels + 1):
        rs = build_return_structure(x, prefix)
        lam = lambda_morphism(rs, coded.coding)
        image = lam.image_rs
        evidence.append(
            {
                "level": level,
                "prefix_length": len(prefix),
                "return_words": rs.size,
                "image_return_words": image.size,
            }
        )
        logger.debug(
            f"Periodicity level {level}: {rs.size} return words, {image.size} coded",
            extra={"procedure": "periodicity", "level": level, "prefix_length": len(prefix)},
        )
        if image.is_singleton:
            period_word = image.base.alphabet.labels_of(image.return_words[0])
            return PeriodicityOutcome(True, level, period_word, None, positive, evidence)
        assert rs.substitution is not None
        key = (lam.lambda_, rs.substitution)
        if key in seen:
            return PeriodicityOutcome(False, level, (), (seen[key], level), positive, evidence)
        seen[key] = level
        prefix = next_tower_prefix(rs)
    raise BudgetExceededError(
        f"Periodicity undecided after {settings.max_levels} derivation levels"
    )


def hd0l_periodicity(
    sigma: Morphism,
    a: str,
    phi: Optional[Morphism] = None,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> Certificate:
    """
    Decide whether ``φ(σ^ω(a))`` is periodic.

    Args:
        sigma: Primitive substitution prolongable on ``a``
        a: Seed letter
        phi: Any morphism not erasing the whole sequence (identity when omitted)
        settings: Budgets and bound mode

    Returns:
        A ``Periodic`` certificate carrying the period word (preperiod 0), or an
        ``Aperiodic`` certificate carrying the repeated levels

    Raises:
        DomainError: If the inputs violate a precondition
        BudgetExceededError: If a budget is exhausted
    """
    coded = coded_fixed_point(sigma, a, phi)
    outcome = find_period(coded, settings)
    notes: List[str] = []
    if coded.normalization is not None:
        notes.append("coding obtained by morphic normalization")

    if outcome.periodic:
        verdict = Verdict.PERIODIC
        witness: Dict[str, Any] = {
            "period_word": labels_text(outcome.period_word),
            "period": outcome.period,
            "preperiod": 0,
            "level": outcome.level,
            "reason": "single return word to the coded prefix",
        }
    else:
        verdict = Verdict.APERIODIC
        assert outcome.cycle is not None
        witness = {
            "cycle": list(outcome.cycle),
            "reason": "derivation states repeat without a single coded return word",
        }
    witness["levels"] = outcome.levels
    if coded.normalization is not None:
        witness["normalization"] = coded.normalization.to_dict()

    def compute_bounds() -> Dict[str, Any]:
        assert outcome.substitution is not None
        bs = bound_set(outcome.substitution, settings.bound_mode, settings)
        if bs.reduced_q_range:
            notes.append("Q maximized over powers up to the positivity exponent plus one")
        return {
            "mode": settings.bound_mode.value,
            "substitution": bs.to_dict(),
            "K": periodicity_bound_expression(bs).to_dict(),
            "K_literal": periodicity_bound_expression(bs, literal=True).to_dict(),
        }

    bounds = guarded_bounds(compute_bounds, notes)
    logger.info(
        f"Periodicity of {sigma.name or 'σ'}^ω({a}): {verdict.value}",
        extra={"procedure": "periodicity", "verdict": verdict.value, "level": outcome.level},
    )
    return Certificate(
        procedure=Procedure.HD0L_PERIODICITY,
        inputs=CertificateInputs.of({"sigma": sigma, "phi": phi}, {"a": a}),
        verdict=verdict,
        witness=witness,
        bounds=bounds,
        notes=notes,
        replay=replay_section(settings),
    )
