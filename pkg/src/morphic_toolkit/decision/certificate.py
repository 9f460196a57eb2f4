"""
Certificates emitted by the decision procedures.

A certificate records the inputs in morphism text format, the verdict, a
witness that can be checked independently, and the provenance of the bounds.
Documents are deterministic: two runs on the same inputs and settings
serialize to identical bytes.
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from morphic_toolkit.core.base import BudgetExceededError, DomainError, Verdict
from morphic_toolkit.core.config import ToolkitSettings, describe_validation_error
from morphic_toolkit.core.words import Morphism
from morphic_toolkit.utils.text_format import format_morphism, parse_morphism

logger = logging.getLogger(__name__)

CERTIFICATE_VERSION = "1.0"


class Procedure(str, Enum):
    """Decision procedures that emit certificates."""

    D0L_EQUIVALENCE = "d0l-equivalence"
    HD0L_EQUIVALENCE = "hd0l-equivalence"
    HD0L_PERIODICITY = "hd0l-periodicity"
    COMMON_POWER = "common-power"


class CertificateInputs(BaseModel):
    """Inputs of a decision, enough to run it again."""

    model_config = ConfigDict(extra="forbid")

    morphisms: Dict[str, str] = Field(default_factory=dict)
    seeds: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def of(
        cls, morphisms: Dict[str, Optional[Morphism]], seeds: Dict[str, str]
    ) -> "CertificateInputs":
        texts = {role: format_morphism(m) for role, m in morphisms.items() if m is not None}
        return cls(morphisms=texts, seeds=seeds)

    def morphism(self, role: str) -> Optional[Morphism]:
        text = self.morphisms.get(role)
        return parse_morphism(text) if text is not None else None

    def require_morphism(self, role: str) -> Morphism:
        m = self.morphism(role)
        if m is None:
            raise DomainError(f"Certificate has no {role} morphism")
        return m

    def seed(self, role: str) -> str:
        try:
            return self.seeds[role]
        except KeyError:
            raise DomainError(f"Certificate has no seed {role}")


class Certificate(BaseModel):
    """A verdict together with its witness."""

    model_config = ConfigDict(use_enum_values=False, extra="forbid")

    version: str = CERTIFICATE_VERSION
    procedure: Procedure
    inputs: CertificateInputs
    verdict: Verdict
    witness: Dict[str, Any] = Field(default_factory=dict)
    bounds: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    replay: Dict[str, Any] = Field(default_factory=dict)

    def document(self) -> Dict[str, Any]:
        """Plain JSON-compatible view of the certificate."""
        return self.model_dump(mode="json")

    def to_json(self) -> str:
        return json.dumps(self.document(), indent=2, ensure_ascii=False, sort_keys=False)

    def to_text(self) -> str:
        return yaml.safe_dump(self.document(), sort_keys=False, allow_unicode=True, width=100)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DomainError(f"Certificate is not valid JSON: {e}")
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise DomainError(
                f"Certificate does not match the schema: {describe_validation_error(e)}"
            )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Certificate":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def settings(self) -> ToolkitSettings:
        """Settings the certificate was produced with."""
        try:
            return ToolkitSettings(**self.replay.get("settings", {}))
        except ValidationError as e:
            raise DomainError(
                f"Certificate settings are invalid: {describe_validation_error(e)}"
            )


def replay_section(settings: ToolkitSettings) -> Dict[str, Any]:
    return {
        "command": "morphic replay <certificate.json>",
        "settings": settings.model_dump(mode="json"),
    }


def guarded_bounds(compute: Callable[[], Dict[str, Any]], notes: List[str]) -> Dict[str, Any]:
    """
    Run a bound computation for a certificate.

    Bounds are provenance only; when one exceeds the bound budget the
    certificate records that fact instead of failing the decision.
    """
    try:
        return compute()
    except BudgetExceededError as e:
        logger.warning(f"Bounds omitted from certificate: {e}")
        notes.append("bounds exceed max_bound_bits and were not expanded")
        return {"unavailable": str(e)}


def labels_text(labels: Any) -> str:
    """Render a label sequence the way the alphabet would."""
    labels = list(labels)
    if all(len(label) == 1 for label in labels):
        return "".join(labels)
    return " ".join(labels)
