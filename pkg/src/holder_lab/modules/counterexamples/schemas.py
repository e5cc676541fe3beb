# src/holder_lab/modules/counterexamples/schemas.py
from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from holder_lab.core.errors import InvalidParameter


class SpikeParams(BaseModel):
    """Spike positions x_k = 2^-k and half-widths delta_k, k = 1..K."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0, lt=1, examples=[0.5])
    K: int = Field(..., ge=1, examples=[20])
    xk: list[float]
    deltak: list[float]

    @model_validator(mode="after")
    def _check(self) -> SpikeParams:
        if len(self.xk) != self.K or len(self.deltak) != self.K:
            raise ValueError("xk and deltak need one entry per spike")
        for k in range(1, self.K):
            if self.xk[k] + self.deltak[k] > self.xk[k - 1] - self.deltak[k - 1]:
                raise ValueError(f"spikes {k} and {k + 1} overlap")
        return self

    @classmethod
    def build(cls, alpha: float, K: int) -> SpikeParams:
        """
        delta_k = min((x_k / k)^(1/alpha), 2^(-k-2)) rounded down to a power of
        two, so k delta_k^alpha <= x_k and x_k +- delta_k stay exact.
        """
        if K < 1:
            raise InvalidParameter(f"K must be >= 1, got {K}")
        if not 0.0 < alpha < 1.0:
            raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha!r}")
        xs, ds = [], []
        for k in range(1, K + 1):
            x = math.ldexp(1.0, -k)
            d = min((x / k) ** (1.0 / alpha), math.ldexp(1.0, -k - 2))
            d = math.ldexp(1.0, math.frexp(d)[1] - 1)
            if d < math.ulp(x):
                raise InvalidParameter(f"spike {k}: width {d!r} below the spacing of floats at {x!r}")
            xs.append(x)
            ds.append(d)
        return cls(alpha=alpha, K=K, xk=xs, deltak=ds)

    def peak(self, k: int) -> float:
        """h(x_k) = k delta_k^alpha."""
        return k * self.deltak[k - 1] ** self.alpha
