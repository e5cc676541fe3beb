# src/holder_lab/modules/almond/construction.py
"""
Recursive almond construction.

An almond on [a, a + t] joins (a, y) to (a + t, y + d t^alpha), d = +1 for a
rising almond and -1 for a falling one. Its two boundary arcs are

    h       = y + d (x - a)^alpha                 (anchored at the left end)
    h_tilde = y + d t^alpha - d (a + t - x)^alpha (anchored at the right end)

Cutting at r = k t and t - r gives a left and a right almond of width r with
the same direction and a reflected middle almond of width t - 2r. The stage
functions h_d, h_tilde_d are the boundary arcs of the 3^d leaves; on falling
leaves h is the lower arc, so `upper`/`lower` take pointwise max/min.

Stages are lazy: a point is evaluated by descending d levels of the tree.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from holder_lab.core.errors import BudgetExhausted, InvalidParameter
from holder_lab.modules.holder.piecewise import PiecewiseFn, Segment

__all__ = ["Almonds", "AlmondStage", "NodeSet", "StageFunction", "Which"]

Which = Literal["h", "h_tilde", "upper", "lower"]

# points per chunk when evaluating large arrays on the pool
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Almonds:
    """Struct of arrays: left end, width, width^alpha, left value, direction."""

    a: NDArray[np.float64]
    t: NDArray[np.float64]
    ta: NDArray[np.float64]
    y: NDArray[np.float64]
    d: NDArray[np.float64]

    @classmethod
    def root(cls) -> Almonds:
        one = np.ones(1)
        return cls(np.zeros(1), one, one.copy(), np.zeros(1), one.copy())

    def __len__(self) -> int:
        return int(self.a.size)

    def take(self, mask: NDArray[np.bool_] | NDArray[np.int64]) -> Almonds:
        return Almonds(self.a[mask], self.t[mask], self.ta[mask], self.y[mask], self.d[mask])


@dataclass(frozen=True)
class NodeSet:
    """Top (local max) and bottom (local min) points, sorted by x."""

    x: NDArray[np.float64]
    value: NDArray[np.float64]
    top: NDArray[np.bool_]

    def __len__(self) -> int:
        return int(self.x.size)

    def kind(self, i: int) -> str:
        return "top" if bool(self.top[i]) else "bottom"


@dataclass(frozen=True)
class _Children:
    left: Almonds
    mid: Almonds
    right: Almonds
    top_x: NDArray[np.float64]  # a + r, value mid.y
    bottom_x: NDArray[np.float64]  # a + t - r, value right.y


def cut(al: Almonds, k: float, ka: float) -> _Children:
    """Cut every almond at r = k t and t - r. ka = k^alpha."""
    r = k * al.t
    w = al.t - 2.0 * r
    ra = ka * al.ta
    wa = (2.0 * ka - 1.0) * al.ta  # = (1 - 2k)^alpha t^alpha
    mid_a = al.a + r
    right_a = mid_a + w
    mid_y = al.y + al.d * ra
    right_y = mid_y - al.d * wa
    return _Children(
        left=Almonds(al.a, r, ra, al.y, al.d),
        mid=Almonds(mid_a, w, wa, mid_y, -al.d),
        right=Almonds(right_a, r.copy(), ra.copy(), right_y, al.d),
        top_x=mid_a,
        bottom_x=right_a,
    )


class AlmondStage:
    """Stage `depth` of the construction for cut ratio k = k(alpha)."""

    def __init__(self, alpha: float, k: float, depth: int, workers: int = 1) -> None:
        if depth < 0:
            raise InvalidParameter(f"depth must be >= 0, got {depth}")
        self.alpha = float(alpha)
        self.k = float(k)
        self.ka = self.k**self.alpha
        self.depth = int(depth)
        self.workers = max(1, workers)

    def __repr__(self) -> str:
        return f"AlmondStage(alpha={self.alpha}, k={self.k:.17g}, depth={self.depth})"

    @property
    def segment_count(self) -> int:
        return 3**self.depth

    @property
    def max_gap(self) -> float:
        """sup |h_d - h_tilde_d|: thickness (2^(1-a) - 1) t^a of the widest leaf."""
        widest = max(self.k, 1.0 - 2.0 * self.k) ** self.depth
        return (2.0 ** (1.0 - self.alpha) - 1.0) * widest**self.alpha

    def measured_gap(self, samples: int = 4097) -> float:
        """
        max |h_d - h_tilde_d| evaluated at the midpoints of the leaves met by
        a uniform grid of `samples` points (the gap peaks mid-leaf).
        """
        if samples < 2:
            raise InvalidParameter("the gap grid needs at least two samples")
        grid = np.linspace(0.0, 1.0, samples)
        leaf = self.leaves_for(grid)
        mids = np.unique(np.concatenate([grid, leaf.a + 0.5 * leaf.t]))
        return float(np.max(np.abs(self.h(mids) - self.h_tilde(mids))))

    # ---- evaluation ----------------------------------------------------------
    def leaves_for(self, xs: NDArray[np.float64]) -> Almonds:
        """Leaf almond containing each x (descends `depth` levels)."""
        n = xs.size
        a, t, ta = np.zeros(n), np.ones(n), np.ones(n)
        y, d = np.zeros(n), np.ones(n)
        k, ka = self.k, self.ka
        for _ in range(self.depth):
            r = k * t
            w = t - 2.0 * r
            ra = ka * ta
            wa = (2.0 * ka - 1.0) * ta
            mid_a = a + r
            right_a = mid_a + w
            mid_y = y + d * ra
            right_y = mid_y - d * wa
            go_mid = (xs >= mid_a) & (xs < right_a)
            go_right = xs >= right_a
            a = np.where(go_right, right_a, np.where(go_mid, mid_a, a))
            y = np.where(go_right, right_y, np.where(go_mid, mid_y, y))
            d = np.where(go_mid, -d, d)
            t = np.where(go_mid, w, r)
            ta = np.where(go_mid, wa, ra)
        return Almonds(a, t, ta, y, d)

    def evaluate(self, x: ArrayLike, which: Which = "h") -> NDArray[np.float64]:
        xs = np.asarray(x, dtype=float)
        if xs.size and (float(xs.min()) < 0.0 or float(xs.max()) > 1.0):
            raise InvalidParameter("almond stages are defined on [0, 1]")
        flat = xs.ravel()
        if flat.size <= _CHUNK or self.workers == 1:
            return self._values(flat, which).reshape(xs.shape)
        chunks = [flat[i : i + _CHUNK] for i in range(0, flat.size, _CHUNK)]
        with ThreadPoolExecutor(max_workers=self.workers) as ex:
            parts = list(ex.map(lambda c: self._values(c, which), chunks))
        return np.concatenate(parts).reshape(xs.shape)

    def h(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(x, "h")

    def h_tilde(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(x, "h_tilde")

    def upper(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(x, "upper")

    def lower(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(x, "lower")

    def function(self, which: Which = "h") -> StageFunction:
        return StageFunction(self, which)

    def _values(self, xs: NDArray[np.float64], which: Which) -> NDArray[np.float64]:
        leaf = self.leaves_for(xs)
        left = np.clip(xs - leaf.a, 0.0, leaf.t)
        right = np.clip(leaf.a + leaf.t - xs, 0.0, leaf.t)
        h = leaf.y + leaf.d * left**self.alpha
        if which == "h":
            return h
        ht = leaf.y + leaf.d * (leaf.ta - right**self.alpha)
        if which == "h_tilde":
            return ht
        if which == "upper":
            return np.maximum(h, ht)
        return np.minimum(h, ht)

    # ---- nodes ---------------------------------------------------------------
    @cached_property
    def nodes(self) -> NodeSet:
        return self.nodes_in(0.0, 1.0)

    def nodes_in(self, lo: float, hi: float) -> NodeSet:
        """Recorded nodes with lo <= x <= hi, descending only into almonds meeting the window."""
        if lo > hi:
            raise InvalidParameter(f"empty window [{lo}, {hi}]")
        xs: list[NDArray[np.float64]] = [np.array([0.0, 1.0])]
        vs: list[NDArray[np.float64]] = [np.array([0.0, 1.0])]
        tops: list[NDArray[np.bool_]] = [np.array([False, True])]
        frontier = Almonds.root()
        for _ in range(self.depth):
            if len(frontier) == 0:
                break
            ch = cut(frontier, self.k, self.ka)
            xs += [ch.top_x, ch.bottom_x]
            vs += [ch.mid.y, ch.right.y]
            tops += [frontier.d > 0, frontier.d < 0]
            merged = _concat(ch.left, ch.mid, ch.right)
            meets = (merged.a <= hi) & (merged.a + merged.t >= lo)
            frontier = merged.take(meets)
        x = np.concatenate(xs)
        v = np.concatenate(vs)
        top = np.concatenate(tops)
        keep = (x >= lo) & (x <= hi)
        order = np.argsort(x[keep], kind="stable")
        return NodeSet(x[keep][order], v[keep][order], top[keep][order])

    def left_chain(self, levels: int) -> list[tuple[float, float, float, float]]:
        """
        (t_j, h(t_j), s_j, h(s_j)) for the leftmost almonds [0, t_j], t_j = k^j,
        j = 0..levels-1, where s_j = t_j - k t_j is the bottom node of the cut.
        Computed with the same arithmetic as the stage itself.
        """
        out = []
        al = Almonds.root()
        for _ in range(levels):
            ch = cut(al, self.k, self.ka)
            out.append(
                (float(al.t[0]), float(al.ta[0]), float(ch.bottom_x[0]), float(ch.right.y[0]))
            )
            al = ch.left
        return out

    # ---- exact forms ---------------------------------------------------------
    def leaves(self) -> Almonds:
        al = Almonds.root()
        for _ in range(self.depth):
            ch = cut(al, self.k, self.ka)
            al = _concat(ch.left, ch.mid, ch.right)
        order = np.argsort(al.a, kind="stable")
        return al.take(order)

    def materialize(self, which: Which = "h", budget: int | None = None) -> PiecewiseFn:
        """Exact PiecewiseFn of h_d, h_tilde_d or an envelope (one arc per leaf)."""
        if budget is not None and self.segment_count > budget:
            raise BudgetExhausted(
                f"depth {self.depth} has {self.segment_count} segments, budget is {budget}"
            )
        lv = self.leaves()
        segs: list[Segment] = []
        n = len(lv)
        for i in range(n):
            a = float(lv.a[i])
            b = 1.0 if i == n - 1 else float(lv.a[i + 1])
            y, d, ta = float(lv.y[i]), float(lv.d[i]), float(lv.ta[i])
            rising = d > 0
            if which in ("upper", "lower"):
                # h is the upper arc on rising leaves
                use_left = (which == "upper") == rising
            else:
                use_left = which == "h"
            if use_left:
                segs.append(Segment.arc(a, b, "left", int(d), 1.0, y))
            else:
                segs.append(Segment.arc(a, b, "right", -int(d), 1.0, y + d * ta))
        return PiecewiseFn(self.alpha, tuple(segs))


@dataclass(frozen=True)
class StageFunction:
    """A stage function as a HolderFunction (alpha + vectorized call)."""

    stage: AlmondStage
    which: Which = "h"

    @property
    def alpha(self) -> float:
        return self.stage.alpha

    def __call__(self, x: ArrayLike) -> NDArray[np.float64] | float:
        out = self.stage.evaluate(x, self.which)
        return float(out) if out.ndim == 0 else out


def _concat(*parts: Almonds) -> Almonds:
    return Almonds(
        np.concatenate([p.a for p in parts]),
        np.concatenate([p.t for p in parts]),
        np.concatenate([p.ta for p in parts]),
        np.concatenate([p.y for p in parts]),
        np.concatenate([p.d for p in parts]),
    )
