# src/holder_lab/modules/holder/bounds.py
"""
Certified bounds for Hölder slopes by branch-and-bound over boxes of [0, 1].

A box is either a run of whole segments (split at the median segment) or a
sub-interval of one segment (bisected). Every box carries an enclosure of
the function's range, its endpoint values, a monotonicity flag and `lip`,
an upper bound on the slope over pairs inside the box at distance <= d_hi.

Pairs of boxes (I, J), I left of J, are bounded by the smallest of
  * the hull bound, when I and J lie in one segment (exact for single terms);
  * the junction rule for adjacent boxes: max(lip_I, lip_J) when the shared
    endpoint is an extremum, otherwise the q-sum (lip_I^q + lip_J^q)^(1/q)
    with q = 1 / (1 - alpha);
  * the q-sum with the gap term |f(J.u) - f(I.v)| / d^alpha when separated;
  * the range bound (max f - min f) / max(d, d_lo)^alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
import pybnb

from holder_lab.core.logging import get_logger

from .piecewise import PiecewiseFn, Segment

log = get_logger(__name__)

__all__ = ["Box", "BoxTree", "PairSlopeProblem", "SupNormProblem"]

# below this ratio of width to anchor distance the direct arc formula cancels badly
_CANCELLATION_RATIO = 1e-6


@dataclass(eq=False)
class Box:
    u: float
    v: float
    i0: int  # segment range [i0, i1)
    i1: int
    lo: float
    hi: float
    fu: float
    fv: float
    lip: float
    direction: int  # +1 increasing, -1 decreasing, 0 unknown
    children: tuple[Box, Box] | None = field(default=None, repr=False)

    @property
    def width(self) -> float:
        return self.v - self.u

    @property
    def is_leaf(self) -> bool:
        return self.i1 - self.i0 == 1


class BoxTree:
    """Segment tree over a PiecewiseFn with lazily bisected leaves."""

    def __init__(self, f: PiecewiseFn, d_hi: float = 1.0, min_width: float = 1e-13) -> None:
        self.f = f
        self.alpha = f.alpha
        self.q = 1.0 / (1.0 - f.alpha)
        self.d_hi = d_hi
        self.min_width = min_width

    # ---- construction --------------------------------------------------------
    @cached_property
    def root(self) -> Box:
        return self.run(0, len(self.f.segments))

    def run(self, i0: int, i1: int) -> Box:
        """Box over the whole segments i0..i1-1."""
        if i1 - i0 == 1:
            s = self.f.segments[i0]
            return self.leaf(i0, s.a, s.b)
        mid = (i0 + i1) // 2
        left, right = self.run(i0, mid), self.run(mid, i1)
        return Box(
            u=left.u,
            v=right.v,
            i0=i0,
            i1=i1,
            lo=min(left.lo, right.lo),
            hi=max(left.hi, right.hi),
            fu=left.fu,
            fv=right.fv,
            lip=max(left.lip, right.lip, self.adjacent(left, right)),
            direction=left.direction if left.direction == right.direction else 0,
            children=(left, right),
        )

    def leaf(self, i: int, u: float, v: float) -> Box:
        s = self.f.segments[i]
        a = self.alpha
        fu, fv = s.value(u, a), s.value(v, a)
        lo, hi = _term_range(s, u, v, a)
        return Box(
            u=u,
            v=v,
            i0=i,
            i1=i + 1,
            lo=min(lo, fu, fv),
            hi=max(hi, fu, fv),
            fu=fu,
            fv=fv,
            lip=self.segment_lip(s, u, v),
            direction=_direction(s, u, v, a),
        )

    def split(self, box: Box) -> tuple[Box, Box] | None:
        if box.children is not None:
            return box.children
        if box.width * 0.5 < self.min_width:
            return None
        mid = 0.5 * (box.u + box.v)
        if not box.u < mid < box.v:
            return None
        box.children = (self.leaf(box.i0, box.u, mid), self.leaf(box.i0, mid, box.v))
        return box.children

    # ---- bounds --------------------------------------------------------------
    def segment_lip(self, s: Segment, u: float, v: float) -> float:
        """Slope bound for pairs in [u, v] ⊆ segment at distance <= d_hi."""
        a = self.alpha
        ell = min(v - u, self.d_hi)
        out = abs(s.slope) * ell ** (1.0 - a)
        for t in s.arcs:
            dist = u - t.anchor if t.anchor <= u else t.anchor - v
            out += abs(t.coeff) * _arc_ratio(dist, ell, a)
        return out

    def qsum(self, *terms: float) -> float:
        m = max(terms)
        if m <= 0.0 or math.isinf(m):
            return max(m, 0.0)
        return m * sum((t / m) ** self.q for t in terms) ** (1.0 / self.q)

    def adjacent(self, left: Box, right: Box) -> float:
        fz = left.fv
        extremum = (
            left.direction * right.direction < 0
            or fz >= max(left.hi, right.hi)
            or fz <= min(left.lo, right.lo)
        )
        if extremum:
            return max(left.lip, right.lip)
        return self.qsum(left.lip, right.lip)

    def pair_bound(self, left: Box, right: Box, d_lo: float = 0.0) -> float:
        """Upper bound on slopes over x in left, y in right with d_lo <= y - x <= d_hi."""
        gap = right.u - left.v
        best = math.inf
        if left.is_leaf and right.is_leaf and left.i0 == right.i0:
            best = self.segment_lip(self.f.segments[left.i0], left.u, right.v)
        if gap <= 0.0:
            best = min(best, self.adjacent(left, right))
        else:
            jump = abs(right.fu - left.fv) / gap**self.alpha
            best = min(best, self.qsum(left.lip, right.lip, jump))
        dist = max(gap, d_lo)
        if dist > 0.0:
            spread = max(right.hi - left.lo, left.hi - right.lo)
            best = min(best, spread / dist**self.alpha)
        return best


def _arc_ratio(s: float, ell: float, a: float) -> float:
    """sup over pairs of |(x-p)^a - (y-p)^a| / |x-y|^a at anchor distance >= s, |x-y| <= ell."""
    if s <= 0.0:
        return 1.0
    if ell < _CANCELLATION_RATIO * s:
        # concavity: (s + l)^a - s^a <= a s^(a-1) l
        return min(1.0, a * s ** (a - 1.0) * ell ** (1.0 - a))
    return min(1.0, ((s + ell) ** a - s**a) / ell**a)


def _term_range(s: Segment, u: float, v: float, a: float) -> tuple[float, float]:
    au = s.offset + s.slope * (u - s.a)
    av = s.offset + s.slope * (v - s.a)
    lo, hi = min(au, av), max(au, av)
    for t in s.arcs:
        tu = t.coeff * abs(u - t.anchor) ** a
        tv = t.coeff * abs(v - t.anchor) ** a
        lo += min(tu, tv)
        hi += max(tu, tv)
    return lo, hi


def _direction(s: Segment, u: float, v: float, a: float) -> int:
    d_lo = d_hi = s.slope
    for t in s.arcs:
        c, p = t.coeff, t.anchor
        if p <= u:
            near = math.copysign(math.inf, c) if u == p else c * a * (u - p) ** (a - 1.0)
            far = c * a * (v - p) ** (a - 1.0)
        else:
            near = math.copysign(math.inf, -c) if v == p else -c * a * (p - v) ** (a - 1.0)
            far = -c * a * (p - u) ** (a - 1.0)
        d_lo += min(near, far)
        d_hi += max(near, far)
    if d_lo >= 0.0:
        return 1
    if d_hi <= 0.0:
        return -1
    return 0


class PairSlopeProblem(pybnb.Problem):
    """
    Maximize slope(f, x, y) over d_lo <= |x - y| <= d_hi.

    Node state: ("self", box, None, parent_bound) for pairs inside one box, or
    ("pair", left, right, parent_bound) for x in left, y in right. `start`
    restricts the search to one such pair of boxes.
    """

    def __init__(
        self, tree: BoxTree, d_lo: float = 0.0, start: tuple[Box, Box] | None = None
    ) -> None:
        self.tree = tree
        self.f = tree.f
        self.alpha = tree.alpha
        self.d_lo = d_lo
        self.d_hi = tree.d_hi
        self.best = -math.inf
        self.witness: tuple[float, float] | None = None
        # bounds of boxes too small to split but not yet within tolerance
        self.stuck = -math.inf
        self._state: tuple[Any, ...] = (
            ("self", tree.root, None, math.inf) if start is None else ("pair", *start, math.inf)
        )
        self._scored: tuple[Any, ...] | None = None
        self._candidate = -math.inf
        self._bound = math.inf

    # ---- pybnb.Problem -------------------------------------------------------
    def sense(self) -> int:
        return pybnb.maximize

    def bound(self) -> float:
        self._score()
        return self._bound

    def objective(self) -> float:
        self._score()
        if self._candidate == -math.inf:
            return self.infeasible_objective()
        return self._candidate

    def save_state(self, node: pybnb.Node) -> None:
        node.state = self._state

    def load_state(self, node: pybnb.Node) -> None:
        self._state = node.state

    def branch(self) -> Any:
        self._score()
        kind, left, right, _ = self._state
        tree = self.tree
        if kind == "self":
            parts = tree.split(left)
            if parts is None:
                self.stuck = max(self.stuck, self._bound)
                return
            a, b = parts
            for state in (("self", a, None), ("self", b, None), ("pair", a, b)):
                yield self._child(state)
            return
        # split the wider box of the pair, falling back to the other one
        order = (left, right) if left.width >= right.width else (right, left)
        for box in order:
            parts = tree.split(box)
            if parts is None:
                continue
            for part in parts:
                pair = ("pair", part, right) if box is left else ("pair", left, part)
                yield self._child(pair)
            return
        self.stuck = max(self.stuck, self._bound)

    # ---- helpers -------------------------------------------------------------
    def _score(self) -> None:
        """Bound and best candidate of the loaded node, computed once per node."""
        if self._scored is self._state:
            return
        kind, left, right, parent = self._state
        ub = self._self_bound(left) if kind == "self" else self._pair_bound(left, right)
        self._candidate = (
            self._evaluate_candidates(kind, left, right) if ub > -math.inf else -math.inf
        )
        # rounding may put a realised slope a few ulps above ub
        self._bound = max(min(ub, parent), self._candidate)
        self._scored = self._state

    def _child(self, state: tuple[Any, ...]) -> pybnb.Node:
        node = pybnb.Node()
        node.state = (*state, self._bound)
        return node

    def _self_bound(self, box: Box) -> float:
        if box.width < self.d_lo:
            return -math.inf
        ub = box.lip
        if self.d_lo > 0.0:
            ub = min(ub, (box.hi - box.lo) / self.d_lo**self.alpha)
        return ub

    def _pair_bound(self, left: Box, right: Box) -> float:
        if right.u - left.v > self.d_hi or right.v - left.u < self.d_lo:
            return -math.inf
        return self.tree.pair_bound(left, right, self.d_lo)

    def _evaluate_candidates(self, kind: str, left: Box, right: Box | None) -> float:
        xs: list[float] = []
        ys: list[float] = []
        if kind == "self":
            w = left.width
            if w >= self.d_lo and w > 0.0:
                span = min(w, self.d_hi)
                xs += [left.u, left.v - span]
                ys += [left.u + span, left.v]
        else:
            assert right is not None
            for x in (left.u, 0.5 * (left.u + left.v), left.v):
                y_lo = max(right.u, x + self.d_lo)
                y_hi = min(right.v, x + self.d_hi)
                if y_lo <= y_hi:
                    xs += [x, x]
                    ys += [y_lo, y_hi]
        best = -math.inf
        for x, y in zip(xs, ys, strict=True):
            if y <= x:
                continue
            val = self.f.slope(x, y)
            if val > best:
                best = val
                if val > self.best:
                    self.best, self.witness = val, (x, y)
        return best


class SupNormProblem(pybnb.Problem):
    """Maximize |f(x)| over boxes of the segment tree."""

    def __init__(self, tree: BoxTree) -> None:
        self.tree = tree
        self.f = tree.f
        self.best = -math.inf
        self.argmax: float | None = None
        self.stuck = -math.inf
        self._box = tree.root
        self._bound = math.inf

    def sense(self) -> int:
        return pybnb.maximize

    def bound(self) -> float:
        box = self._box
        self._bound = max(abs(box.lo), abs(box.hi), abs(box.fu), abs(box.fv))
        return self._bound

    def objective(self) -> float:
        box = self._box
        mid = 0.5 * (box.u + box.v)
        best = -math.inf
        for x, val in ((box.u, box.fu), (box.v, box.fv), (mid, self.f.eval(mid))):
            if abs(val) > best:
                best = abs(val)
                if best > self.best:
                    self.best, self.argmax = best, x
        return best

    def save_state(self, node: pybnb.Node) -> None:
        node.state = self._box

    def load_state(self, node: pybnb.Node) -> None:
        self._box = node.state

    def branch(self) -> Any:
        parts = self.tree.split(self._box)
        if parts is None:
            self.stuck = max(self.stuck, self._bound)
            return
        for part in parts:
            node = pybnb.Node()
            node.state = part
            yield node


def breakpoint_sup(f: PiecewiseFn) -> tuple[float, float]:
    """max |f| over breakpoints and segment midpoints, with its argmax."""
    xs = np.array(f.breakpoints)
    xs = np.concatenate([xs, 0.5 * (xs[:-1] + xs[1:])])
    vals = np.abs(f.evaluate(xs))
    i = int(np.argmax(vals))
    return float(vals[i]), float(xs[i])
