# src/holder_lab/modules/approx/schemas.py
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field

from holder_lab.modules.holder.piecewise import PiecewiseFn
from holder_lab.modules.holder.schemas import CertifiedBound

OutcomeKind = Literal["boundary", "witness", "not_little"]


class InsertedConstantsPlan(BaseModel):
    """Frozen intervals [x_k - delta, x_k + delta] and the jumps removed there."""

    model_config = ConfigDict(frozen=True)

    criticals: list[float] = Field(..., description="x_1 = 0 < ... < x_n = 1.", examples=[[0.0, 1.0]])
    delta: float = Field(..., gt=0, examples=[1e-4])
    delta_jumps: list[float] = Field(
        ...,
        description="h(x_k - delta) - h(x_k + delta), with h = 0 left of 0 and h = h(1) right of 1.",
    )

    @property
    def min_gap(self) -> float:
        """Shortest free stretch between two frozen intervals."""
        xs = self.criticals
        return min(b - a for a, b in zip(xs, xs[1:], strict=False)) - 2.0 * self.delta


class CaseStat(BaseModel):
    case: int = Field(..., ge=1, le=5)
    pairs: int = Field(0, ge=0)
    max_slope: float = Field(0.0, description="max L_xy(h - g) over the case's pairs.")
    max_excess: float = Field(
        0.0, description="max of L_xy(h - g) minus the case's bound in terms of h."
    )
    passed: bool = True


class FiveCaseReport(BaseModel):
    gap: float = Field(..., description="Band width D: pairs with |x - y| < D.")
    cases: list[CaseStat]
    unclassified: int = Field(0, description="Sampled pairs spanning two frozen intervals.")
    band: CertifiedBound = Field(..., description="Certified band_slope(h - g, 0, D).")
    reference: CertifiedBound = Field(..., description="Certified L(h).")
    passed: bool


class BandCheck(BaseModel):
    d_lo: float
    d_hi: float
    bound: CertifiedBound
    resolved: bool = Field(
        ..., description="4 sup |h - f| <= eps d_lo^alpha: unmeshed cores cannot matter at this distance."
    )
    passed: bool = Field(..., description="The certified band bound converged and is <= eps + tol.")


class DenseApproxReport(BaseModel):
    eps: float = Field(..., gt=0, examples=[0.1])
    depth: int = Field(..., ge=1, examples=[10])
    core_depth: int = Field(..., description="Annulus levels meshed, depth plus the core refinement.")
    core_radius: float = Field(..., gt=0, description="Radius of the unmeshed neighbourhood of each critical point.")
    criticals: list[float]
    deltas: list[float] = Field(..., description="delta_m = delta_0 2^-m, m = 0..depth.")
    nodes: int
    sup: CertifiedBound = Field(..., description="Certified ||h - f||_inf.")
    bands: list[BandCheck]
    passed: bool


class ThreeBallWitness(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    g: PiecewiseFn
    per_ball_norms: list[CertifiedBound] = Field(..., description="L(h + f_i - g), i = 1, 2, 3.")
    epsilon: float = Field(..., gt=0)
    delta_prime: float = Field(..., gt=0, description="Distance |x - y|^alpha below which f_i are eps/2-flat.")
    delta: float = Field(0.0, ge=0, description="Half-width of the frozen intervals (0 when g = h).")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(b.upper <= 1.0 + self.epsilon for b in self.per_ball_norms)


class ViolationWitness(BaseModel):
    """Outcome of the M-summand certificate for one candidate g."""

    kind: OutcomeKind
    g1: float = Field(..., description="g(1)")
    boundary_values: tuple[float, float] = Field(
        ..., description="(|2 - g(1)|, |g(1)|) = L_01(h + f_i - g)."
    )
    x0: float | None = Field(None, description="Point with f_1(x0) + g(x0) < h(x0).")
    x_tilde: float | None = Field(None, description="Largest zero of h - f_1 - g before 1.")
    slope_value: float = Field(
        ...,
        description="Violating slope: boundary max, (1 - x_tilde)^-alpha scaled by |g(1)|, "
        "or the smallest slope from 0 of f_1 + g for `not_little`.",
    )

    @property
    def violated(self) -> bool:
        if self.kind == "not_little":
            return True
        return self.slope_value > 1.0


class MSummandSearchReport(BaseModel):
    alpha: float
    seed: int
    candidates: int
    by_node_count: dict[int, int] = Field(default_factory=dict)
    by_kind: dict[str, int] = Field(default_factory=dict)
    min_witness_slope: float | None = None
    worst_nodes: list[float] | None = Field(None, description="Node values of the candidate with the smallest witness.")
    all_violated: bool
