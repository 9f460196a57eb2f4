"""
Certificate replay.

Replaying runs the recorded procedure again on the recorded inputs and
settings, demands an identical document, and then checks the witness against
the inputs without going through the decision procedure.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from morphic_toolkit.core.base import DomainError, Verdict
from morphic_toolkit.core.config import ToolkitSettings
from morphic_toolkit.core.stream import FixedPointStream, image_prefix
from morphic_toolkit.core.words import Morphism
from morphic_toolkit.decision.certificate import Certificate, Procedure
from morphic_toolkit.decision.equivalence import d0l_equivalence, hd0l_equivalence
from morphic_toolkit.decision.periodicity import hd0l_periodicity
from morphic_toolkit.decision.rigidity import (
    LatticeReport,
    ParikhVector,
    common_power_check,
    lattice_report,
    powers_agree,
)

logger = logging.getLogger(__name__)

# Largest period ruled out when an aperiodic verdict is replayed.
APERIODIC_PERIOD_LIMIT = 1000


@dataclass
class ReplayReport:
    """Outcome of a successful replay."""

    procedure: Procedure
    verdict: Verdict
    checks: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "procedure": self.procedure.value,
            "verdict": self.verdict.value,
            "replayed": True,
            "checks": self.checks,
        }


def run_procedure(cert: Certificate, settings: ToolkitSettings) -> Certificate:
    """Run the procedure a certificate records, on its inputs."""
    inputs = cert.inputs
    sigma = inputs.require_morphism("sigma")
    a = inputs.seed("a")
    if cert.procedure == Procedure.D0L_EQUIVALENCE:
        tau = inputs.require_morphism("tau")
        return d0l_equivalence(sigma, a, tau, inputs.seed("b"), settings)
    if cert.procedure == Procedure.HD0L_EQUIVALENCE:
        return hd0l_equivalence(
            sigma,
            a,
            inputs.morphism("phi"),
            inputs.require_morphism("tau"),
            inputs.seed("b"),
            inputs.morphism("psi"),
            settings,
        )
    if cert.procedure == Procedure.HD0L_PERIODICITY:
        return hd0l_periodicity(sigma, a, inputs.morphism("phi"), settings)
    return common_power_check(sigma, inputs.require_morphism("tau"), a, settings)


def sequence_labels(
    sigma: Morphism, seed: str, phi: Optional[Morphism], n: int, settings: ToolkitSettings
) -> Tuple[str, ...]:
    """First ``n`` labels of ``φ(σ^ω(seed))``, erasing ``φ`` included."""
    x = FixedPointStream(sigma, seed, settings.memory_budget)
    if phi is None:
        return x.labels(n)
    return phi.target.labels_of(image_prefix(x, phi, n))


def _sides(cert: Certificate) -> Tuple[Tuple[Morphism, str, Optional[Morphism]], ...]:
    inputs = cert.inputs
    return (
        (inputs.require_morphism("sigma"), inputs.seed("a"), inputs.morphism("phi")),
        (inputs.require_morphism("tau"), inputs.seed("b"), inputs.morphism("psi")),
    )


def _periodicity_labels(cert: Certificate, n: int, settings: ToolkitSettings) -> Tuple[str, ...]:
    inputs = cert.inputs
    sigma = inputs.require_morphism("sigma")
    return sequence_labels(sigma, inputs.seed("a"), inputs.morphism("phi"), n, settings)


def check_not_equal(cert: Certificate, settings: ToolkitSettings) -> str:
    position = int(cert.witness["position"])
    (sigma, a, phi), (tau, b, psi) = _sides(cert)
    left = sequence_labels(sigma, a, phi, position + 1, settings)
    right = sequence_labels(tau, b, psi, position + 1, settings)
    if left[:position] != right[:position]:
        raise DomainError(f"Sequences already differ before position {position}")
    if left[position] == right[position]:
        raise DomainError(f"Sequences agree at the recorded position {position}")
    if (left[position], right[position]) != (
        cert.witness["left_symbol"],
        cert.witness["right_symbol"],
    ):
        raise DomainError(f"Recorded symbols at position {position} do not match the inputs")
    return f"sequences first differ at position {position}"


def check_equal(cert: Certificate, settings: ToolkitSettings) -> str:
    horizon = settings.replay_horizon
    (sigma, a, phi), (tau, b, psi) = _sides(cert)
    left = sequence_labels(sigma, a, phi, horizon, settings)
    right = sequence_labels(tau, b, psi, horizon, settings)
    if left != right:
        position = next(i for i, (p, q) in enumerate(zip(left, right)) if p != q)
        raise DomainError(f"Equal certificate but sequences differ at position {position}")
    return f"sequences agree on {horizon} symbols"


def check_periodic(cert: Certificate, settings: ToolkitSettings) -> str:
    period = int(cert.witness["period"])
    horizon = max(settings.replay_horizon, 2 * period)
    labels = _periodicity_labels(cert, horizon, settings)
    codes = _encode(labels)
    if not np.array_equal(codes[period:], codes[:-period]):
        raise DomainError(f"Sequence does not have period {period} on {horizon} symbols")
    return f"period {period} holds on {horizon} symbols"


def check_aperiodic(cert: Certificate, settings: ToolkitSettings) -> str:
    horizon = settings.replay_horizon
    limit = min(APERIODIC_PERIOD_LIMIT, horizon // 10)
    labels = _periodicity_labels(cert, horizon, settings)
    codes = _encode(labels)
    for p in range(1, limit + 1):
        if np.array_equal(codes[p:], codes[:-p]):
            raise DomainError(f"Aperiodic certificate but period {p} holds on {horizon} symbols")
    return f"no period up to {limit} on {horizon} symbols"


def check_common_power(cert: Certificate, settings: ToolkitSettings) -> str:
    i = int(cert.witness["sigma_exponent"])
    j = int(cert.witness["tau_exponent"])
    sigma = cert.inputs.require_morphism("sigma")
    tau = cert.inputs.require_morphism("tau").relabel(sigma.source)
    if not powers_agree(sigma, tau, i, j):
        raise DomainError(f"σ^{i} and τ^{j} differ")
    last = cert.witness["evidence"][-1]
    if not _recorded_lattice(last, len(sigma.source)).full:
        raise DomainError("Recorded Parikh vectors do not generate the full lattice")
    return f"σ^{i} = τ^{j} letter by letter and the lattice is full"


def check_no_conclusion(cert: Certificate, settings: ToolkitSettings) -> str:
    evidence = cert.witness.get("evidence", [])
    if not evidence:
        raise DomainError("NoConclusion certificate without evidence")
    d = len(cert.inputs.require_morphism("sigma").source)
    last = evidence[-1]
    lattice = _recorded_lattice(last, d)
    if lattice.to_dict() != last["lattice"]:
        raise DomainError(f"Recorded lattice data at level {last['level']} is wrong")
    return f"lattice data at level {last['level']} recomputed"


def _recorded_lattice(row: Dict[str, Any], d: int) -> LatticeReport:
    vectors = [ParikhVector(tuple(v)) for v in row["parikh_vectors"]]
    return lattice_report(vectors, d)


def _encode(labels: Tuple[str, ...]) -> np.ndarray:
    index: Dict[str, int] = {}
    return np.array([index.setdefault(label, len(index)) for label in labels], dtype=np.int64)


_WITNESS_CHECKS = {
    Verdict.NOT_EQUAL: check_not_equal,
    Verdict.EQUAL: check_equal,
    Verdict.PERIODIC: check_periodic,
    Verdict.APERIODIC: check_aperiodic,
    Verdict.COMMON_POWER: check_common_power,
    Verdict.NO_CONCLUSION: check_no_conclusion,
}


def verify_certificate(
    cert: Certificate, settings: Optional[ToolkitSettings] = None
) -> ReplayReport:
    """
    Replay a certificate.

    Args:
        cert: Certificate to replay
        settings: Settings for the rerun; the recorded ones when omitted

    Returns:
        Report listing the checks that passed

    Raises:
        DomainError: If the rerun differs from the certificate or the witness fails
        BudgetExceededError: If the rerun exhausts a budget
    """
    settings = settings or cert.settings()
    report = ReplayReport(cert.procedure, cert.verdict)

    rerun = run_procedure(cert, settings)
    if rerun.document() != cert.document():
        changed = sorted(k for k, v in rerun.document().items() if cert.document().get(k) != v)
        raise DomainError(
            f"Replay produced a different certificate (fields: {', '.join(changed)})"
        )
    report.checks.append("rerun produced an identical certificate")

    report.checks.append(_WITNESS_CHECKS[cert.verdict](cert, settings))
    logger.info(
        f"Replayed {cert.procedure.value} certificate: {cert.verdict.value}",
        extra={"procedure": cert.procedure.value, "verdict": cert.verdict.value},
    )
    return report
