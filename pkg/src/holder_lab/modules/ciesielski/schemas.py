# src/holder_lab/modules/ciesielski/schemas.py
from __future__ import annotations

from pydantic import BaseModel, Field


class HeavyPointReport(BaseModel):
    label: str = Field(..., examples=["candidates at depth 6"])
    eps: float = Field(..., ge=0, examples=[0.1])
    depth: int = Field(..., ge=1, examples=[6])
    N: int = Field(..., ge=1, examples=[1024])
    points: list[float] = Field(
        default_factory=list,
        description="Dyadic points k/2^depth with heavy coefficients inside every radius 2^-j, j <= depth.",
        examples=[[0.0]],
    )
    heavy_counts: list[int] = Field(
        default_factory=list,
        description="Per level m = 0..top, number of indices with |a_n| > eps.",
    )


class OnesProfileReport(BaseModel):
    N: int = Field(..., ge=1, examples=[513])
    alpha: float = Field(..., gt=0, lt=1, examples=[0.5])
    points: list[float] = Field(..., description="x_j, decreasing to 0.")
    slopes: list[float] = Field(..., description="L_{0,x_j}(f_N) = |f_N(x_j)| / x_j^alpha.")
    closed_form: list[float | None] = Field(
        default_factory=list,
        description="2^{-j(1-a)} (1 + sum_{i<=j} 2^{i(1-a)}) where x_j = 2^-j lies in the exact range.",
    )
    cauchy_gaps: list[float] = Field(default_factory=list)
    b_hat: float = Field(..., description="Slope at the smallest point, the empirical limit.")
    limit: float = Field(..., description="2^{1-a} / (2^{1-a} - 1), the N -> inf value of the profile.")
