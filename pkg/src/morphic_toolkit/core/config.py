"""Runtime settings for the morphic toolkit."""

from pathlib import Path
from typing import Any, Dict, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from morphic_toolkit.core.base import BoundMode, DomainError, LevelSchedule


def describe_validation_error(error: ValidationError) -> str:
    """One-line summary of a pydantic validation error, field by field."""
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'value'}: {item['msg']}"
        for item in error.errors()
    )


class ToolkitSettings(BaseModel):
    """Budgets and knobs shared by every procedure."""

    model_config = ConfigDict(use_enum_values=False, extra="forbid", frozen=True)

    memory_budget: int = Field(default=2**26, ge=1)
    bound_mode: BoundMode = BoundMode.CERTIFICATE
    practical_sample: int = Field(default=20_000, ge=16)
    max_levels: int = Field(default=64, ge=1)
    level_schedule: LevelSchedule = LevelSchedule.DERIVATION
    comparison_horizon: int = Field(default=4096, ge=1)
    max_prefix_levels: int = Field(default=10, ge=1)
    max_exponent: int = Field(default=8, ge=1)
    replay_horizon: int = Field(default=10_000, ge=1)
    max_bound_bits: int = Field(default=2**24, ge=1)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "ToolkitSettings":
        """
        Load settings from a YAML file.

        Args:
            path: YAML file whose top-level mapping holds setting names

        Returns:
            Parsed settings

        Raises:
            DomainError: If the file is not valid YAML, not a mapping, or names
                invalid settings
        """
        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise DomainError(f"Settings file {path} is not valid YAML: {e}")
        if not isinstance(data, dict):
            raise DomainError(f"Settings file {path} must contain a mapping")
        try:
            return cls(**data)
        except ValidationError as e:
            raise DomainError(f"Invalid settings in {path}: {describe_validation_error(e)}")

    def with_overrides(self, **overrides: Any) -> "ToolkitSettings":
        """
        Return a copy with the non-``None`` overrides applied.

        Raises:
            DomainError: If an override is out of range
        """
        updates: Dict[str, Any] = {k: v for k, v in overrides.items() if v is not None}
        try:
            return self.model_validate({**self.model_dump(), **updates})
        except ValidationError as e:
            raise DomainError(f"Invalid settings: {describe_validation_error(e)}")


DEFAULT_SETTINGS = ToolkitSettings()
