# src/holder_lab/modules/experiments/schemas.py
from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from holder_lab.core.errors import InvalidParameter


class ExperimentSpec(BaseModel):
    """One experiment invocation; (spec, seed) determine the report."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., examples=["k-solve"])
    alpha: float = Field(0.5, gt=0, lt=1, examples=[0.5])
    parameters: dict[str, Any] = Field(
        default_factory=dict,
        description="Named scalars or lists, e.g. depth, eps, delta.",
        examples=[{"depth": 12}],
    )
    seed: int = Field(0, ge=0, examples=[0])
    output: Path | None = Field(
        None, description="Report directory. Defaults to the configured OUTPUT_ROOT."
    )

    def param(self, key: str, default: Any) -> Any:
        """parameters[key] cast to the type of `default` (a default of None disables the cast)."""
        if key not in self.parameters:
            return default
        value = self.parameters[key]
        if default is None or isinstance(value, type(default)):
            return value
        try:
            if isinstance(default, bool):
                return str(value).lower() in {"1", "true", "yes", "on"}
            return type(default)(value)
        except (TypeError, ValueError) as e:
            raise InvalidParameter(
                f"parameter {key}={value!r} is not a valid {type(default).__name__}"
            ) from e


class RunRecord(BaseModel):
    """What the runner did with one spec."""

    name: str
    passed: bool = Field(..., alias="pass")
    exit_code: int = Field(..., ge=0, le=4)
    report_path: str | None = None
    series_paths: list[str] = Field(default_factory=list)
    elapsed: float = Field(0.0, ge=0)
    error: str | None = None

    model_config = ConfigDict(populate_by_name=True)
