"""
Computable constants attached to a primitive substitution.

The certificate constants grow as towers of exponentials, so every K-type bound
is carried as a :class:`BoundExpression` and only expanded into an integer when
its bit length stays under the configured ceiling.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

import numpy as np

from morphic_toolkit.core.base import BoundMode, BudgetExceededError, DomainError
from morphic_toolkit.core.config import DEFAULT_SETTINGS, ToolkitSettings
from morphic_toolkit.core.stream import FixedPointStream
from morphic_toolkit.core.words import (
    Morphism,
    horn_bound,
    incidence_matrix,
    prolongable_letters,
    require_primitive,
)

logger = logging.getLogger(__name__)

# Largest value (in bits) whose decimal expansion is embedded in documents.
PRINTABLE_BITS = 4096


def integer_text(value: int) -> str:
    """Decimal text of ``value``, or its bit length when it is too long to print."""
    bits = value.bit_length()
    return str(value) if bits <= PRINTABLE_BITS else f"<{bits}-bit integer>"


def fraction_text(value: Fraction) -> str:
    if max(value.numerator.bit_length(), value.denominator.bit_length()) <= PRINTABLE_BITS:
        return str(value)
    return f"{integer_text(value.numerator)}/{integer_text(value.denominator)}"


@dataclass(frozen=True)
class BoundExpression:
    """
    Exact symbolic bound ``offset + Π base^exponent``.

    Attributes:
        factors: ``(base, exponent)`` pairs
        offset: Additive constant
        formula: Human-readable rendering with named constants
    """

    factors: Tuple[Tuple[int, int], ...]
    offset: int = 0
    formula: str = ""

    def bits_upper_bound(self) -> int:
        """An upper bound on ``value().bit_length()`` computed without expanding."""
        product_bits = sum(exponent * base.bit_length() for base, exponent in self.factors)
        return max(product_bits, self.offset.bit_length()) + 1

    def value(self, max_bits: int = DEFAULT_SETTINGS.max_bound_bits) -> int:
        """
        Expand the expression.

        Raises:
            BudgetExceededError: If the value may need more than ``max_bits`` bits
        """
        bits = self.bits_upper_bound()
        if bits > max_bits:
            raise BudgetExceededError(
                f"Bound {self.formula or self.render()} needs up to {bits} bits, "
                f"above the limit of {max_bits}"
            )
        result = 1
        for base, exponent in self.factors:
            result *= base**exponent
        return self.offset + result

    def render(self) -> str:
        product = " * ".join(
            f"{integer_text(base)}^{integer_text(exponent)}" for base, exponent in self.factors
        )
        product = product or "1"
        return f"{integer_text(self.offset)} + {product}" if self.offset else product

    def __mul__(self, other: "BoundExpression") -> "BoundExpression":
        if self.offset or other.offset:
            raise DomainError("Only pure products can be multiplied symbolically")
        formula = f"{self.formula} * {other.formula}"
        return BoundExpression(self.factors + other.factors, 0, formula)

    def plus(self, offset: int, formula: Optional[str] = None) -> "BoundExpression":
        return BoundExpression(self.factors, self.offset + offset, formula or self.formula)

    def to_dict(self) -> Dict[str, Any]:
        bits = self.bits_upper_bound()
        return {
            "formula": self.formula,
            "expression": self.render(),
            "bits_upper_bound": bits,
            "value": str(self.value(bits)) if bits <= PRINTABLE_BITS else None,
        }


@dataclass(frozen=True)
class BoundSet:
    """
    Constants of a primitive substitution.

    Attributes:
        mode: How ``r_bound`` and ``q`` were obtained
        norm: |σ|, the maximal image length
        d: Alphabet size
        r_bound: Bound on the largest gap between consecutive occurrences of a length-2 factor
        q: Ratio constant between the longest and the shortest image of each power
        k_sigma: ``⌈q · r_bound · norm⌉``
        positivity_exponent: Minimal exponent with a positive incidence matrix power
        q_range: Largest power inspected for ``q``
        full_q_range: Power range of the closed-form definition, ``(d-1)d^d + 1``
    """

    mode: BoundMode
    norm: int
    d: int
    r_bound: int
    q: Fraction
    k_sigma: int
    positivity_exponent: int
    q_range: int
    full_q_range: int

    @property
    def reduced_q_range(self) -> bool:
        return self.q_range < self.full_q_range

    def to_dict(self) -> Dict[str, Any]:
        """Document view; integers above ``PRINTABLE_BITS`` are summarized by bit length."""
        document: Dict[str, Any] = {
            "mode": self.mode.value,
            "norm": self.norm,
            "d": self.d,
            "r_bound": integer_text(self.r_bound),
            "r_bound_bits": self.r_bound.bit_length(),
            "q": fraction_text(self.q),
            "k_sigma": integer_text(self.k_sigma),
            "k_sigma_bits": self.k_sigma.bit_length(),
            "positivity_exponent": self.positivity_exponent,
            "q_range": self.q_range,
            "full_q_range": self.full_q_range,
        }
        if self.mode == BoundMode.CERTIFICATE:
            document["r_bound_formula"] = certificate_r_bound(self.norm, self.d).render()
        return document


def certificate_r_bound(norm: int, d: int) -> BoundExpression:
    """``2|σ|^{(d-1)d^d}``."""
    return BoundExpression(((2, 1), (norm, horn_bound(d))), 0, "2*|σ|^((d-1)*d^d)")


def q_constant(sigma: Morphism, max_power: int) -> Fraction:
    """``max(max_{n ≤ max_power} |σ^n| / min_a |σ^n(a)|, |σ|)`` from integer matrix powers."""
    matrix = incidence_matrix(sigma)
    best = Fraction(sigma.norm)
    power = matrix.power(0)
    for _ in range(max_power + 1):
        lengths = power.column_sums()
        best = max(best, Fraction(max(lengths), min(lengths)))
        power = power @ matrix
    return best


def sampling_seed(sigma: Morphism) -> Tuple[Morphism, str]:
    """A power of ``σ`` with a prolongable letter, and that letter."""
    for p in range(1, len(sigma.source) + 1):
        candidate = sigma.power(p)
        letters = prolongable_letters(candidate)
        if letters:
            return candidate, min(letters, key=sigma.source.index)
    raise DomainError(f"No power of {sigma.name or 'σ'} up to the alphabet size is prolongable")


def empirical_r_bound(sigma: Morphism, sample: int, seed: Optional[str] = None) -> int:
    """
    Largest observed gap between consecutive occurrences of a length-2 factor.

    Measured on the first ``sample`` symbols of a fixed point of ``σ`` (or of a
    power of ``σ``, which has the same factors).
    """
    if seed is not None and seed in prolongable_letters(sigma):
        generator, letter = sigma, seed
    else:
        generator, letter = sampling_seed(sigma)
    d = len(sigma.source)
    x = np.asarray(FixedPointStream(generator, letter, memory_budget=sample).prefix(sample))
    pairs = x[:-1] * d + x[1:]
    gap = 1
    for code in np.unique(pairs):
        positions = np.flatnonzero(pairs == code)
        if len(positions) > 1:
            gap = max(gap, int(np.diff(positions).max()))
    return gap


def bound_set(
    sigma: Morphism,
    mode: BoundMode = BoundMode.CERTIFICATE,
    settings: ToolkitSettings = DEFAULT_SETTINGS,
    seed: Optional[str] = None,
) -> BoundSet:
    """
    Compute the constants of a primitive substitution.

    Certificate mode evaluates ``R = 2|σ|^{(d-1)d^d}`` exactly; practical mode
    replaces it with the largest gap observed on ``practical_sample`` symbols.
    In both modes ``Q`` is maximized over ``n ≤ k₀ + 1`` where ``k₀`` is the
    minimal positivity exponent.

    Args:
        sigma: Primitive substitution
        mode: Certificate or practical constants
        settings: Budgets (``practical_sample``, ``max_bound_bits``)
        seed: Prolongable letter to sample from in practical mode

    Returns:
        The bound set

    Raises:
        DomainError: If ``sigma`` is not primitive
        BudgetExceededError: If ``R`` or ``K_σ`` exceeds ``max_bound_bits``
    """
    k0 = require_primitive(sigma)
    d = len(sigma.source)
    norm = sigma.norm
    if mode == BoundMode.CERTIFICATE:
        r_bound = certificate_r_bound(norm, d).value(settings.max_bound_bits)
    else:
        r_bound = empirical_r_bound(sigma, settings.practical_sample, seed)
        logger.warning(
            f"Practical bounds for {sigma.name or 'σ'} use an observed gap of {r_bound}",
            extra={"substitution": sigma.name, "r_bound": r_bound},
        )
    q_range = k0 + 1
    full_q_range = horn_bound(d) + 1
    q = q_constant(sigma, q_range)
    if q_range < full_q_range:
        logger.debug(f"Q for {sigma.name or 'σ'} is maximized over n <= {q_range}")
    k_sigma = math.ceil(q * r_bound * norm)
    if k_sigma.bit_length() > settings.max_bound_bits:
        raise BudgetExceededError(
            f"K for {sigma.name or 'σ'} exceeds {settings.max_bound_bits} bits"
        )
    return BoundSet(mode, norm, d, r_bound, q, k_sigma, k0, q_range, full_q_range)


def return_substitution_count_bound(
    bs: BoundSet, literal: bool = False, name: str = "σ"
) -> BoundExpression:
    """
    Bound on the number of distinct return substitutions of ``σ``.

    ``literal`` selects ``(4K³)^{|σ|K²+1}``; the default is the larger
    ``((4K)³)^{|σ|K²+1}`` used by the equivalence bounds.
    """
    k = bs.k_sigma
    exponent = bs.norm * k * k + 1
    if literal:
        formula = f"(4*K_{name}^3)^(|{name}|*K_{name}^2+1)"
        return BoundExpression(((4 * k**3, exponent),), 0, formula)
    formula = f"((4*K_{name})^3)^(|{name}|*K_{name}^2+1)"
    return BoundExpression((((4 * k) ** 3, exponent),), 0, formula)


def lambda_count_bound(bs: BoundSet, name: str = "σ") -> BoundExpression:
    """Bound ``(K+1)^{K²}`` on the number of distinct λ morphisms."""
    return BoundExpression(((bs.k_sigma + 1, bs.k_sigma**2),), 0, f"(K_{name}+1)^(K_{name}^2)")


def equivalence_bound_expression(
    bs_sigma: BoundSet,
    bs_tau: BoundSet,
    with_lambdas: bool = False,
    literal: bool = False,
) -> BoundExpression:
    """
    The equivalence bound ``1 + ((4K_σ)³)^{|σ|K_σ²+1}((4K_τ)³)^{|τ|K_τ²+1}``.

    ``with_lambdas`` multiplies in ``(K_σ+1)^{K_σ²}(K_τ+1)^{K_τ²}``.
    """
    product = return_substitution_count_bound(bs_sigma, literal, "σ")
    product = product * return_substitution_count_bound(bs_tau, literal, "τ")
    if with_lambdas:
        product = product * lambda_count_bound(bs_sigma, "σ") * lambda_count_bound(bs_tau, "τ")
    return product.plus(1, f"1 + {product.formula}")


def equivalence_bound_K(
    bs_sigma: BoundSet,
    bs_tau: BoundSet,
    sigma: Morphism,
    tau: Morphism,
    with_lambdas: bool = False,
    max_bits: int = DEFAULT_SETTINGS.max_bound_bits,
) -> int:
    """
    The equivalence bound K as an exact integer.

    Raises:
        DomainError: If a bound set does not belong to its substitution
        BudgetExceededError: If K needs more than ``max_bits`` bits
    """
    for bs, m in ((bs_sigma, sigma), (bs_tau, tau)):
        if bs.norm != m.norm or bs.d != len(m.source):
            raise DomainError(f"Bound set does not match {m.name or 'substitution'}")
    return equivalence_bound_expression(bs_sigma, bs_tau, with_lambdas).value(max_bits)


def periodicity_bound_expression(bs: BoundSet, literal: bool = False) -> BoundExpression:
    """Level bound of the periodicity procedure: return substitutions times λ morphisms."""
    return return_substitution_count_bound(bs, literal) * lambda_count_bound(bs)
