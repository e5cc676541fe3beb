# src/holder_lab/modules/ciesielski/coeffs.py
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from holder_lab.core.errors import InvalidParameter
from holder_lab.modules.holder.piecewise import check_alpha

__all__ = ["CoeffSeq", "DyadicIndex", "level_arrays"]


@dataclass(frozen=True)
class DyadicIndex:
    """n = 2^m + k with 1 <= k <= 2^m; support [(k-1)/2^m, k/2^m]."""

    n: int
    m: int
    k: int

    @classmethod
    def from_n(cls, n: int) -> DyadicIndex:
        if n < 2:
            raise InvalidParameter(f"triangle indices start at 2, got {n}")
        m = (n - 1).bit_length() - 1
        return cls(n=n, m=m, k=n - 2**m)

    @property
    def xl(self) -> float:
        return (self.k - 1) / 2**self.m

    @property
    def xr(self) -> float:
        return self.k / 2**self.m

    @property
    def xc(self) -> float:
        return (2 * self.k - 1) / 2 ** (self.m + 1)


def level_arrays(ns: NDArray[np.int64]) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Vectorized (m, k) for indices n >= 2."""
    _, e = np.frexp((ns - 1).astype(float))
    m = e.astype(np.int64) - 1
    return m, ns - (1 << m)


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """a_1..a_N stored densely; `values[n - 1]` is a_n."""

    alpha: float
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise InvalidParameter("a coefficient sequence needs N >= 1 entries")
        if not bool(np.all(np.isfinite(vals))):
            raise InvalidParameter("coefficients must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # ---- constructors --------------------------------------------------------
    @classmethod
    def zeros(cls, alpha: float, N: int) -> CoeffSeq:
        return cls(alpha, np.zeros(N))

    @classmethod
    def unit(cls, alpha: float, n: int, N: int) -> CoeffSeq:
        if not 1 <= n <= N:
            raise InvalidParameter(f"unit index {n} outside [1, {N}]")
        vals = np.zeros(N)
        vals[n - 1] = 1.0
        return cls(alpha, vals)

    @classmethod
    def from_mapping(cls, alpha: float, entries: Mapping[int, float], N: int) -> CoeffSeq:
        vals = np.zeros(N)
        for n, a in entries.items():
            if not 1 <= n <= N:
                raise InvalidParameter(f"index {n} outside [1, {N}]")
            vals[n - 1] = a
        return cls(alpha, vals)

    # ---- access --------------------------------------------------------------
    @property
    def N(self) -> int:
        return int(self.values.size)

    @property
    def top_level(self) -> int:
        """Highest level m with at least one index; -1 when only a_1 exists."""
        return -1 if self.N < 2 else (self.N - 1).bit_length() - 1

    @property
    def complete_levels(self) -> int:
        """Highest level m whose indices 2^m+1..2^(m+1) are all present (-1 if none)."""
        return self.N.bit_length() - 2

    def __getitem__(self, n: int) -> float:
        return float(self.values[n - 1])

    def support(self) -> dict[int, float]:
        return {int(i) + 1: float(self.values[i]) for i in np.flatnonzero(self.values)}

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def level(self, m: int) -> NDArray[np.float64]:
        """Coefficients of level m (k = 1..2^m), zero beyond N."""
        out = np.zeros(2**m)
        lo, hi = 2**m + 1, min(2 ** (m + 1), self.N)
        if lo <= hi:
            out[: hi - lo + 1] = self.values[lo - 1 : hi]
        return out

    # ---- text codec ----------------------------------------------------------
    def dumps(self) -> str:
        lines = [f"alpha {self.alpha:.17g}"]
        lines += [f"{n} {a:.17g}" for n, a in enumerate(self.values, start=1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> CoeffSeq:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or rows[0][:1] != ["alpha"] or len(rows[0]) != 2:
            raise InvalidParameter("first line must be 'alpha <value>'")
        try:
            alpha = float(rows[0][1])
            entries = {int(r[0]): float(r[1]) for r in rows[1:]}
        except (IndexError, ValueError) as err:
            raise InvalidParameter(f"malformed coefficient file: {err}") from err
        return cls.from_mapping(alpha, entries, max(entries, default=1))

    def write(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        return path
