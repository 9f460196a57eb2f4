"""
ω-equivalence of D0L and HD0L sequences generated by primitive substitutions.

Both sequences are compared level by level. At level ``n`` the prefixes
``u_n`` of ``x`` and ``v_n`` of ``y`` have the same length; the level is
consistent when the coded prefixes agree and both sides have the same return
words to them, and its state ``T_n`` collects the return substitutions (and
the λ morphisms of the codings). Two consistent levels ``n < m`` with
``T_n = T_m`` whose refinement morphism ``Θ`` (``Θ_{u_n}Θ = Θ_{u_m}``) is
prolongable on ``0`` prove equality: both derived sequences are then the fixed
point ``Θ^ω(0)``. An inconsistent level, or a differing prefix, proves
inequality and is located at a concrete position.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

from morphic_toolkit.analysis.bounds import (
    BoundSet,
    bound_set,
    equivalence_bound_expression,
)
from morphic_toolkit.core.base import (
    BudgetExceededError,
    LevelSchedule,
    SymbolStream,
    Verdict,
    Word,
)
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings
from morphic_toolkit.core.stream import MorphicStream, first_difference
from morphic_toolkit.core.words import Morphism
from morphic_toolkit.decision.certificate import (
    Certificate,
    CertificateInputs,
    Procedure,
    guarded_bounds,
    labels_text,
    replay_section,
)
from morphic_toolkit.decision.normalization import CodedFixedPoint, coded_fixed_point
from morphic_toolkit.decision.periodicity import find_period
from morphic_toolkit.returns.structure import (
    ReturnStructure,
    build_return_structure,
    next_tower_prefix,
    theta_refinement,
)
from morphic_toolkit.returns.substitution import lambda_morphism
from morphic_toolkit.utils.text_format import format_inline

logger = logging.getLogger(__name__)


@dataclass
class StateTuple:
    """
    One consistent level of the equivalence search.

    Attributes:
        level: Level index ``n``
        prefix_u: Prefix ``u_n`` of the first fixed point
        prefix_v: Prefix ``v_n`` of the second fixed point
        image_x: Return structure of the first coded sequence on its coded prefix
        image_y: Return structure of the second coded sequence on its coded prefix
        T: ``(σ_u, τ_v)``, or ``(λ_u, σ_u, λ_v, τ_v)`` when codings are involved
    """

    level: int
    prefix_u: Word
    prefix_v: Word
    image_x: ReturnStructure
    image_y: ReturnStructure
    T: Tuple[Morphism, ...]

    @property
    def theta_x(self) -> Morphism:
        return self.image_x.theta

    @property
    def theta_y(self) -> Morphism:
        return self.image_y.theta

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "prefix_length": len(self.prefix_u),
            "return_words": self.image_x.labels(),
            "T": [format_inline(m) for m in self.T],
        }


class _Difference(Exception):
    """Raised inside the level search when the sequences are shown to differ."""

    def __init__(self, position: int, found_by: str) -> None:
        super().__init__(position)
        self.position = position
        self.found_by = found_by


def locate_difference(x: SymbolStream, y: SymbolStream, start: int) -> int:
    """
    First differing position of two sequences known to differ.

    The comparison window doubles from ``start`` until a difference shows up.

    Raises:
        BudgetExceededError: If no difference appears within the memory budget
    """
    budget = min(x.memory_budget, y.memory_budget)
    horizon = max(start, 1)
    while True:
        horizon = min(horizon, budget)
        position = first_difference(x, y, horizon)
        if position is not None:
            return position
        if horizon >= budget:
            raise BudgetExceededError(
                f"Sequences agree on {budget} symbols but differ structurally; "
                "raise the memory budget to locate the difference"
            )
        horizon *= 2


class _EquivalenceSearch:
    """Level iteration shared by the D0L and HD0L procedures."""

    def __init__(
        self,
        left: CodedFixedPoint,
        right: CodedFixedPoint,
        with_lambdas: bool,
        settings: ToolkitSettings,
    ) -> None:
        self.left = left
        self.right = right
        self.with_lambdas = with_lambdas
        self.settings = settings
        self.x = left.fixed_point(settings)
        self.y = right.fixed_point(settings)
        self.X: SymbolStream = MorphicStream(self.x, left.coding) if with_lambdas else self.x
        self.Y: SymbolStream = MorphicStream(self.y, right.coding) if with_lambdas else self.y
        self._last_structure: Optional[ReturnStructure] = None
        self.notes: List[str] = []
        self._bound_sets: Optional[Tuple[BoundSet, BoundSet]] = None

    def bound_sets(self) -> Tuple[BoundSet, BoundSet]:
        if self._bound_sets is None:
            mode = self.settings.bound_mode
            self._bound_sets = (
                bound_set(self.left.substitution, mode, self.settings, self.left.seed),
                bound_set(self.right.substitution, mode, self.settings, self.right.seed),
            )
        return self._bound_sets

    def prefixes(self) -> Iterator[Word]:
        """Prefixes ``u_n`` of ``x`` for the configured schedule."""
        schedule = self.settings.level_schedule
        if schedule == LevelSchedule.DERIVATION:
            prefix = self.x.prefix(1)
            while True:
                yield prefix
                assert self._last_structure is not None
                prefix = next_tower_prefix(self._last_structure)
        bs_x, bs_y = self.bound_sets()
        if schedule == LevelSchedule.GEOMETRIC:
            base = max(bs_x.k_sigma, bs_y.k_sigma) + 1
        else:
            base = bs_x.k_sigma + 1
            self.notes.append("prefix lengths follow (K_σ+1)^n on both sides")
        length = 1
        while True:
            length *= base
            if length > self.x.memory_budget:
                raise BudgetExceededError(
                    f"Level prefix of length {length} exceeds the memory budget"
                )
            yield self.x.prefix(length)

    def level(self, n: int, u: Word) -> StateTuple:
        v = self.y.prefix(len(u))
        rs_x = build_return_structure(self.x, u)
        rs_y = build_return_structure(self.y, v)
        self._last_structure = rs_x
        assert rs_x.substitution is not None and rs_y.substitution is not None
        if self.with_lambdas:
            lam_x = lambda_morphism(rs_x, self.left.coding)
            lam_y = lambda_morphism(rs_y, self.right.coding)
            image_x, image_y = lam_x.image_rs, lam_y.image_rs
            T: Tuple[Morphism, ...] = (
                lam_x.lambda_,
                rs_x.substitution,
                lam_y.lambda_,
                rs_y.substitution,
            )
        else:
            image_x, image_y = rs_x, rs_y
            T = (rs_x.substitution, rs_y.substitution)

        coded_u = image_x.base.alphabet.labels_of(image_x.prefix_u)
        coded_v = image_y.base.alphabet.labels_of(image_y.prefix_u)
        if coded_u != coded_v:
            position = next(i for i, (p, q) in enumerate(zip(coded_u, coded_v)) if p != q)
            raise _Difference(position, f"level {n} prefixes differ")
        if image_x.label_key() != image_y.label_key():
            position = locate_difference(self.X, self.Y, 2 * self.settings.comparison_horizon)
            raise _Difference(position, f"level {n} return words differ")
        return StateTuple(n, u, v, image_x, image_y, T)

    def run(self) -> Tuple[Verdict, Dict[str, Any]]:
        periodic = self.periodic_verdict()
        if periodic is not None:
            return periodic

        horizon = self.settings.comparison_horizon
        position = first_difference(self.X, self.Y, horizon)
        if position is not None:
            return self.not_equal(position, "prefix comparison")

        seen: Dict[Tuple[Morphism, ...], List[StateTuple]] = {}
        try:
            for n, u in enumerate(self.prefixes(), start=1):
                if n > self.settings.max_levels:
                    break
                state = self.level(n, u)
                logger.debug(
                    f"Level {n}: prefix length {len(u)}, {state.image_x.size} return words",
                    extra={"procedure": "equivalence", "level": n, "prefix_length": len(u)},
                )
                for earlier in seen.get(state.T, []):
                    refinement = theta_refinement(earlier.image_x, state.image_x)
                    if len(refinement.images[0]) >= 2:
                        return Verdict.EQUAL, self.equal_witness(earlier, state, refinement)
                seen.setdefault(state.T, []).append(state)
        except _Difference as difference:
            return self.not_equal(difference.position, difference.found_by)
        raise BudgetExceededError(
            f"No repeated state within {self.settings.max_levels} levels"
        )

    def periodic_verdict(self) -> Optional[Tuple[Verdict, Dict[str, Any]]]:
        left = find_period(self.left, self.settings)
        right = find_period(self.right, self.settings)
        if not left.periodic and not right.periodic:
            return None
        if left.periodic and right.periodic:
            window = 2 * math.lcm(left.period, right.period)
            position = first_difference(self.X, self.Y, window)
            if position is not None:
                return self.not_equal(position, "periodic comparison")
            return Verdict.EQUAL, {
                "periodic": True,
                "left_period": labels_text(left.period_word),
                "right_period": labels_text(right.period_word),
                "compared": window,
            }
        position = locate_difference(self.X, self.Y, self.settings.comparison_horizon)
        return self.not_equal(position, "exactly one sequence is periodic")

    def not_equal(self, position: int, found_by: str) -> Tuple[Verdict, Dict[str, Any]]:
        return Verdict.NOT_EQUAL, {
            "position": position,
            "left_symbol": self.X.labels(position + 1)[position],
            "right_symbol": self.Y.labels(position + 1)[position],
            "found_by": found_by,
        }

    def equal_witness(
        self, earlier: StateTuple, later: StateTuple, refinement: Morphism
    ) -> Dict[str, Any]:
        return {
            "levels": [earlier.level, later.level],
            "schedule": self.settings.level_schedule.value,
            "prefix_lengths": [len(earlier.prefix_u), len(later.prefix_u)],
            "states": [earlier.to_dict(), later.to_dict()],
            "refinement": format_inline(refinement),
            "refinement_first_image_length": len(refinement.images[0]),
        }

    def bounds(self) -> Dict[str, Any]:
        bs_x, bs_y = self.bound_sets()
        if bs_x.reduced_q_range or bs_y.reduced_q_range:
            self.notes.append("Q maximized over powers up to the positivity exponent plus one")
        return {
            "mode": self.settings.bound_mode.value,
            "sigma": bs_x.to_dict(),
            "tau": bs_y.to_dict(),
            "K": equivalence_bound_expression(bs_x, bs_y, self.with_lambdas).to_dict(),
            "K_literal": equivalence_bound_expression(
                bs_x, bs_y, self.with_lambdas, literal=True
            ).to_dict(),
        }


def _certificate(
    procedure: Procedure,
    search: _EquivalenceSearch,
    inputs: CertificateInputs,
    settings: ToolkitSettings,
) -> Certificate:
    verdict, witness = search.run()
    notes = search.notes
    bounds = guarded_bounds(search.bounds, notes)
    logger.info(
        f"{procedure.value}: {verdict.value}",
        extra={"procedure": procedure.value, "verdict": verdict.value},
    )
    return Certificate(
        procedure=procedure,
        inputs=inputs,
        verdict=verdict,
        witness=witness,
        bounds=bounds,
        notes=sorted(set(notes)),
        replay=replay_section(settings),
    )


def d0l_equivalence(
    sigma: Morphism,
    a: str,
    tau: Morphism,
    b: str,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> Certificate:
    """
    Decide ``σ^ω(a) = τ^ω(b)``.

    Args:
        sigma: Primitive substitution prolongable on ``a``
        a: Seed of the first sequence
        tau: Primitive substitution prolongable on ``b``
        b: Seed of the second sequence
        settings: Budgets, schedule and bound mode

    Returns:
        ``Equal`` with the repeated levels, or ``NotEqual`` with the first
        differing position

    Raises:
        DomainError: If a substitution is not primitive or not prolongable on its seed
        BudgetExceededError: If a budget is exhausted before a verdict
    """
    left = coded_fixed_point(sigma, a)
    right = coded_fixed_point(tau, b)
    search = _EquivalenceSearch(left, right, False, settings)
    inputs = CertificateInputs.of({"sigma": sigma, "tau": tau}, {"a": a, "b": b})
    return _certificate(Procedure.D0L_EQUIVALENCE, search, inputs, settings)


def hd0l_equivalence(
    sigma: Morphism,
    a: str,
    phi: Optional[Morphism],
    tau: Morphism,
    b: str,
    psi: Optional[Morphism],
    settings: ToolkitSettings = DEFAULT_SETTINGS,
) -> Certificate:
    """
    Decide ``φ(σ^ω(a)) = ψ(τ^ω(b))``.

    Both sides are first normalized to codings of primitive fixed points; the
    level states then carry the λ morphisms of both codings.

    Raises:
        DomainError: If an input violates a precondition
        BudgetExceededError: If a budget is exhausted before a verdict
    """
    left = coded_fixed_point(sigma, a, phi)
    right = coded_fixed_point(tau, b, psi)
    search = _EquivalenceSearch(left, right, True, settings)
    for side, coded in (("left", left), ("right", right)):
        if coded.normalization is not None:
            search.notes.append(f"{side} coding obtained by morphic normalization")
    inputs = CertificateInputs.of(
        {"sigma": sigma, "phi": phi, "tau": tau, "psi": psi}, {"a": a, "b": b}
    )
    return _certificate(Procedure.HD0L_EQUIVALENCE, search, inputs, settings)

