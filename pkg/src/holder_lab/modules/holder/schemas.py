# src/holder_lab/modules/holder/schemas.py
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

PointClass = Literal["critical", "noncritical"]


class CertifiedBound(BaseModel):
    """Enclosure [lower, upper] of a supremum. `converged` is False when the budget ran out."""

    model_config = ConfigDict(frozen=True)

    lower: float = Field(..., examples=[0.9995])
    upper: float = Field(..., examples=[1.0000000010])
    tol: float = Field(..., gt=0, examples=[1e-3])
    converged: bool = Field(
        True, description="upper - lower <= tol was reached within the budget."
    )
    witness: tuple[float, float] | None = Field(
        None,
        description="Pair (x, y) realising `lower`; (x, x) for point quantities like the sup norm.",
        examples=[(0.0, 0.25)],
    )
    nodes: int = Field(0, ge=0, description="Branch-and-bound nodes processed.")

    @model_validator(mode="after")
    def _ordered(self) -> CertifiedBound:
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower!r} exceeds upper {self.upper!r}")
        return self

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def encloses(self, value: float, atol: float = 0.0) -> bool:
        return self.lower - atol <= value <= self.upper + atol


class CriticalPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., ge=0, le=1, examples=[0.0])
    classification: PointClass = Field(..., examples=["critical"])
    coefficient: float = Field(
        0.0,
        description="Largest |arc coefficient| anchored at x; 0 for noncritical points.",
    )

    @property
    def critical(self) -> bool:
        return self.classification == "critical"
