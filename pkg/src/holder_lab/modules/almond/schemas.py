# src/holder_lab/modules/almond/schemas.py
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class AlmondParams(BaseModel):
    """Cut ratio k(alpha) and the constants derived from it."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, lt=1, examples=[0.5])
    k: float = Field(..., gt=0, lt=0.5, examples=[4 / 9])
    residual: float = Field(..., description="|2k^a - 1 - (1-2k)^a| at the returned k.")
    liminf_slope: float = Field(
        ..., description="(1 - k^a) / (1 - k)^a", examples=[0.4472135955]
    )
    failure_c: float = Field(
        ...,
        description="(1 - k^a) (k (1 - 2k))^(1-a) / (1 - k)",
        examples=[2 / 15],
    )


class LimsupReport(BaseModel):
    x: float = Field(..., examples=[0.0])
    kind: str = Field(..., examples=["bottom"])
    depth: int
    radii: list[float] = Field(default_factory=list, description="Window radii k^(j-1), j = 1..scales.")
    scale_max: list[float | None] = Field(
        default_factory=list,
        description="Max slope from x to opposite-kind nodes with k^j < |y - x| <= k^(j-1) (None if none).",
    )
    running_max: list[float | None] = Field(
        default_factory=list,
        description="Max slope over 0 < |y - x| <= k^(j-1); non-increasing in j.",
    )
    estimate: float | None = Field(None, description="Running max at the smallest non-empty scale.")


class LiminfReport(BaseModel):
    depth: int
    closed_form: float = Field(..., description="(1 - k^a) / (1 - k)^a")
    points: list[float] = Field(default_factory=list, description="Minima s_j = (1 - k) k^j.")
    slopes: list[float] = Field(default_factory=list, description="L_{0,s_j}(h).")
    deviations: list[float] = Field(default_factory=list)
    envelope_min: float | None = Field(
        None,
        description="min over a grid in (0, k] of h(x) - liminf_slope * x^a; >= 0 up to rounding.",
    )
