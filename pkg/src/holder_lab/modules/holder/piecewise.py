# src/holder_lab/modules/holder/piecewise.py
"""
Exact functions on [0, 1].

A segment on [a, b] evaluates to

    offset + slope * (x - a) + sum_i coeff_i * |x - anchor_i| ** alpha

with every anchor outside the open interval (a, b), so each term is monotone
on the segment. Plain affine pieces and single arcs anchored at an endpoint
are special cases; sums of functions produce "mixed" segments. Segments are
half-open [a, b) except the last one, which is closed.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from holder_lab.core.errors import DegeneratePair, InvalidParameter

__all__ = [
    "ArcTerm",
    "HolderFunction",
    "PiecewiseFn",
    "Polygon",
    "Segment",
    "SegmentKind",
    "check_alpha",
    "from_segments",
]

SegmentKind = Literal["affine", "arc", "mixed"]

# junction mismatch allowed by the continuity check (relative to |values|)
CONTINUITY_TOL = 1e-9


def check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not 0.0 < a < 1.0:
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha!r}")
    return a


@runtime_checkable
class HolderFunction(Protocol):
    """Anything evaluable on [0, 1] for a fixed exponent, exact or lazily built."""

    @property
    def alpha(self) -> float: ...

    def __call__(self, x: ArrayLike) -> NDArray[np.float64] | float: ...


@dataclass(frozen=True)
class ArcTerm:
    anchor: float
    coeff: float  # signed


@dataclass(frozen=True)
class Segment:
    a: float
    b: float
    slope: float = 0.0
    offset: float = 0.0  # value of the affine part at `a`
    arcs: tuple[ArcTerm, ...] = ()

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise InvalidParameter(f"segment needs a < b, got [{self.a!r}, {self.b!r}]")
        if not (math.isfinite(self.slope) and math.isfinite(self.offset)):
            raise InvalidParameter(f"non-finite affine part on [{self.a}, {self.b}]")
        for t in self.arcs:
            if self.a < t.anchor < self.b:
                raise InvalidParameter(
                    f"arc anchored at {t.anchor} inside segment [{self.a}, {self.b}]"
                )
            if not math.isfinite(t.coeff):
                raise InvalidParameter(f"non-finite arc coefficient at {t.anchor}")

    # ---- constructors --------------------------------------------------------
    @classmethod
    def affine(cls, a: float, b: float, m: float, c: float) -> Segment:
        """x -> c + m (x - a)."""
        return cls(float(a), float(b), float(m), float(c))

    @classmethod
    def arc(
        cls,
        a: float,
        b: float,
        side: Literal["left", "right"],
        sign: int,
        coeff: float,
        offset: float,
    ) -> Segment:
        """x -> offset + sign * coeff * |x - anchor|^alpha, anchor = a (left) or b (right)."""
        if sign not in (1, -1):
            raise InvalidParameter(f"arc sign must be +1 or -1, got {sign!r}")
        if coeff < 0:
            raise InvalidParameter(f"arc coefficient must be >= 0, got {coeff!r}")
        if side not in ("left", "right"):
            raise InvalidParameter(f"arc side must be 'left' or 'right', got {side!r}")
        anchor = float(a) if side == "left" else float(b)
        arcs = (ArcTerm(anchor, sign * float(coeff)),) if coeff else ()
        return cls(float(a), float(b), 0.0, float(offset), arcs)

    # ---- shape ---------------------------------------------------------------
    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def kind(self) -> SegmentKind:
        if not self.arcs:
            return "affine"
        if (
            self.slope == 0.0
            and len(self.arcs) == 1
            and self.arcs[0].anchor in (self.a, self.b)
        ):
            return "arc"
        return "mixed"

    def anchored_arcs(self) -> list[ArcTerm]:
        """Arc terms anchored at one of the segment's own endpoints."""
        return [t for t in self.arcs if t.anchor in (self.a, self.b) and t.coeff != 0.0]

    # ---- evaluation ----------------------------------------------------------
    def value(self, x: float, alpha: float) -> float:
        out = self.offset + self.slope * (x - self.a)
        for t in self.arcs:
            out += t.coeff * abs(x - t.anchor) ** alpha
        return out

    # ---- algebra -------------------------------------------------------------
    def restrict(self, u: float, v: float) -> Segment:
        """Same formula on [u, v] ⊆ [a, b]; only the stored offset moves."""
        if u == self.a and v == self.b:
            return self
        return Segment(u, v, self.slope, self.offset + self.slope * (u - self.a), self.arcs)

    def scaled(self, c: float) -> Segment:
        arcs = tuple(ArcTerm(t.anchor, c * t.coeff) for t in self.arcs) if c else ()
        return Segment(self.a, self.b, c * self.slope, c * self.offset, arcs)

    def shifted(self, c: float) -> Segment:
        return Segment(self.a, self.b, self.slope, self.offset + c, self.arcs)

    def plus(self, other: Segment, sign: float = 1.0) -> Segment:
        """self + sign * other on a common interval; equal anchors merge, zeros drop."""
        coeffs: dict[float, float] = {}
        for t in self.arcs:
            coeffs[t.anchor] = coeffs.get(t.anchor, 0.0) + t.coeff
        for t in other.arcs:
            coeffs[t.anchor] = coeffs.get(t.anchor, 0.0) + sign * t.coeff
        arcs = tuple(ArcTerm(p, c) for p, c in sorted(coeffs.items()) if c != 0.0)
        return Segment(
            self.a,
            self.b,
            self.slope + sign * other.slope,
            self.offset + sign * other.offset,
            arcs,
        )


@dataclass(frozen=True)
class _SegmentTable:
    """Padded arrays for vectorized evaluation."""

    starts: NDArray[np.float64]
    slopes: NDArray[np.float64]
    offsets: NDArray[np.float64]
    anchors: NDArray[np.float64]  # (n, K)
    coeffs: NDArray[np.float64]  # (n, K), zero padded


def _check_unit(xs: NDArray[np.float64]) -> None:
    if xs.size and not bool(np.all((xs >= 0.0) & (xs <= 1.0))):
        bad = xs[~((xs >= 0.0) & (xs <= 1.0))].ravel()[0]
        raise InvalidParameter(f"x={float(bad)!r} outside [0, 1]")


@dataclass(frozen=True)
class PiecewiseFn:
    alpha: float
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "segments", tuple(self.segments))
        self._validate()

    def _validate(self) -> None:
        segs = self.segments
        if not segs:
            raise InvalidParameter("a piecewise function needs at least one segment")
        if segs[0].a != 0.0 or segs[-1].b != 1.0:
            raise InvalidParameter(
                f"segments must tile [0, 1], got [{segs[0].a}, {segs[-1].b}]"
            )
        for left, right in zip(segs, segs[1:], strict=False):
            if left.b != right.a:
                raise InvalidParameter(f"gap or overlap at {left.b} / {right.a}")
            lv, rv = left.value(left.b, self.alpha), right.value(right.a, self.alpha)
            if abs(lv - rv) > CONTINUITY_TOL * max(1.0, abs(lv), abs(rv)):
                raise InvalidParameter(
                    f"discontinuity at x={left.b}: {lv!r} (left) vs {rv!r} (right)"
                )

    # ---- shape ---------------------------------------------------------------
    @cached_property
    def _starts(self) -> list[float]:
        return [s.a for s in self.segments]

    @cached_property
    def breakpoints(self) -> tuple[float, ...]:
        return (0.0, *(s.b for s in self.segments))

    @property
    def based(self) -> bool:
        return self.eval(0.0) == 0.0

    @property
    def is_polygon(self) -> bool:
        return all(not s.arcs for s in self.segments)

    def locate(self, x: float) -> int:
        """Index of the segment owning x (half-open, last closed)."""
        i = bisect.bisect_right(self._starts, x) - 1
        return min(max(i, 0), len(self.segments) - 1)

    # ---- evaluation ----------------------------------------------------------
    def eval(self, x: float) -> float:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise InvalidParameter(f"x={x!r} outside [0, 1]")
        return self.segments[self.locate(x)].value(x, self.alpha)

    @cached_property
    def _table(self) -> _SegmentTable:
        n = len(self.segments)
        k = max((len(s.arcs) for s in self.segments), default=0)
        anchors = np.zeros((n, k))
        coeffs = np.zeros((n, k))
        for i, s in enumerate(self.segments):
            for j, t in enumerate(s.arcs):
                anchors[i, j] = t.anchor
                coeffs[i, j] = t.coeff
        return _SegmentTable(
            starts=np.array([s.a for s in self.segments]),
            slopes=np.array([s.slope for s in self.segments]),
            offsets=np.array([s.offset for s in self.segments]),
            anchors=anchors,
            coeffs=coeffs,
        )

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64]:
        xs = np.asarray(x, dtype=float)
        _check_unit(xs)
        t = self._table
        idx = np.clip(np.searchsorted(t.starts, xs, side="right") - 1, 0, len(t.starts) - 1)
        out = t.offsets[idx] + t.slopes[idx] * (xs - t.starts[idx])
        if t.coeffs.shape[1]:
            dist = np.abs(xs[..., None] - t.anchors[idx])
            out = out + np.sum(t.coeffs[idx] * dist**self.alpha, axis=-1)
        return out

    def __call__(self, x: ArrayLike) -> NDArray[np.float64] | float:
        if np.ndim(x) == 0:
            return self.eval(float(x))  # type: ignore[arg-type]
        return self.evaluate(x)

    def slope(self, x: float, y: float) -> float:
        """Hölder slope |f(x) - f(y)| / |x - y|^alpha."""
        if x == y:
            raise DegeneratePair(f"slope needs x != y, got x = y = {x!r}")
        return abs(self.eval(x) - self.eval(y)) / abs(x - y) ** self.alpha

    def slopes(self, xs: ArrayLike, ys: ArrayLike) -> NDArray[np.float64]:
        """Vectorized slope; pairs with x == y give nan."""
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        d = np.abs(x - y) ** self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.abs(self.evaluate(x) - self.evaluate(y)) / d
        return np.where(d > 0, out, np.nan)

    # ---- algebra -------------------------------------------------------------
    def scale(self, c: float) -> PiecewiseFn:
        return from_segments(self.alpha, [s.scaled(float(c)) for s in self.segments])

    def shift(self, c: float) -> PiecewiseFn:
        return from_segments(self.alpha, [s.shifted(float(c)) for s in self.segments])

    def combine(self, other: PiecewiseFn, sign: float = 1.0) -> PiecewiseFn:
        """self + sign * other on the merged partition."""
        if other.alpha != self.alpha:
            raise InvalidParameter(
                f"cannot combine alpha={self.alpha} with alpha={other.alpha}"
            )
        cuts = sorted(set(self.breakpoints) | set(other.breakpoints))
        out: list[Segment] = []
        i = j = 0
        mine, theirs = self.segments, other.segments
        for u, v in zip(cuts, cuts[1:], strict=False):
            while mine[i].b <= u:
                i += 1
            while theirs[j].b <= u:
                j += 1
            out.append(mine[i].restrict(u, v).plus(theirs[j].restrict(u, v), sign))
        return from_segments(self.alpha, out)

    def __neg__(self) -> PiecewiseFn:
        return self.scale(-1.0)

    def __add__(self, other: PiecewiseFn | float) -> PiecewiseFn:
        if isinstance(other, PiecewiseFn):
            return self.combine(other, 1.0)
        if isinstance(other, int | float):
            return self.shift(float(other))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: PiecewiseFn | float) -> PiecewiseFn:
        if isinstance(other, PiecewiseFn):
            return self.combine(other, -1.0)
        if isinstance(other, int | float):
            return self.shift(-float(other))
        return NotImplemented

    def __rsub__(self, other: float) -> PiecewiseFn:
        if isinstance(other, int | float):
            return self.scale(-1.0).shift(float(other))
        return NotImplemented

    def __mul__(self, c: float) -> PiecewiseFn:
        if isinstance(c, int | float):
            return self.scale(float(c))
        return NotImplemented

    __rmul__ = __mul__


@dataclass(frozen=True)
class Polygon(PiecewiseFn):
    """Affine segments only; evaluation interpolates the nodes (exact at nodes)."""

    def _validate(self) -> None:
        super()._validate()
        if not self.is_polygon:
            raise InvalidParameter("a polygon cannot carry arc terms")

    @classmethod
    def from_nodes(
        cls, alpha: float, xs: Sequence[float] | NDArray[np.float64], ys: Sequence[float] | NDArray[np.float64]
    ) -> Polygon:
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise InvalidParameter("polygon needs matching node arrays with >= 2 nodes")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise InvalidParameter(f"polygon nodes must run from 0 to 1, got {x[0]}..{x[-1]}")
        if not bool(np.all(np.diff(x) > 0)):
            raise InvalidParameter("polygon abscissae must be strictly increasing")
        if not bool(np.all(np.isfinite(y))):
            raise InvalidParameter("polygon values must be finite")
        segs = [
            Segment.affine(x[i], x[i + 1], (y[i + 1] - y[i]) / (x[i + 1] - x[i]), y[i])
            for i in range(x.size - 1)
        ]
        poly = cls(alpha, tuple(segs))
        poly.__dict__["nodes"] = (x, y)
        return poly

    @cached_property
    def nodes(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        xs = np.array(self.breakpoints)
        last = self.segments[-1]
        ys = np.array([s.offset for s in self.segments] + [last.value(1.0, self.alpha)])
        return xs, ys

    def eval(self, x: float) -> float:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise InvalidParameter(f"x={x!r} outside [0, 1]")
        xs, ys = self.nodes
        return float(np.interp(x, xs, ys))

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64]:
        arr = np.asarray(x, dtype=float)
        _check_unit(arr)
        xs, ys = self.nodes
        return np.asarray(np.interp(arr, xs, ys), dtype=float)

    @cached_property
    def segment_slopes(self) -> NDArray[np.float64]:
        return np.array([s.slope for s in self.segments])

    def increments(self, lo: ArrayLike, hi: ArrayLike) -> NDArray[np.float64]:
        """
        f(hi) - f(lo) for lo <= hi. Pairs inside one segment get slope * (hi - lo),
        so equal steps along a segment give bitwise equal increments.
        """
        a = np.asarray(lo, dtype=float)
        b = np.asarray(hi, dtype=float)
        _check_unit(a)
        _check_unit(b)
        xs, _ = self.nodes
        i = np.clip(np.searchsorted(xs, a, side="right") - 1, 0, len(self.segments) - 1)
        inside = b <= xs[i + 1]
        return np.where(inside, self.segment_slopes[i] * (b - a), self.evaluate(b) - self.evaluate(a))

    def lipschitz_constant(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Ordinary (exponent 1) Lipschitz constant on [lo, hi]."""
        return max(
            (abs(s.slope) for s in self.segments if s.b > lo and s.a < hi), default=0.0
        )


def from_segments(alpha: float, segments: Iterable[Segment]) -> PiecewiseFn:
    """Polygon when no segment carries an arc term, PiecewiseFn otherwise."""
    segs = tuple(segments)
    if all(not s.arcs for s in segs):
        return Polygon(alpha, segs)
    return PiecewiseFn(alpha, segs)
