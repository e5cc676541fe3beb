# src/holder_lab/modules/holder/families.py
"""Named test functions and seeded random families."""

from __future__ import annotations

import numpy as np

from .piecewise import ArcTerm, PiecewiseFn, Polygon, Segment, check_alpha

__all__ = [
    "identity",
    "power",
    "reflected_power",
    "peak_arcs",
    "two_arc",
    "symmetric_two_arc",
    "random_polygon",
    "random_arc_function",
]


def identity(alpha: float) -> Polygon:
    return Polygon.from_nodes(alpha, [0.0, 1.0], [0.0, 1.0])


def power(alpha: float, coeff: float = 1.0) -> PiecewiseFn:
    """x -> coeff * x^alpha."""
    sign = 1 if coeff >= 0 else -1
    return PiecewiseFn(alpha, (Segment.arc(0.0, 1.0, "left", sign, abs(coeff), 0.0),))


def reflected_power(alpha: float) -> PiecewiseFn:
    """x -> 1 - (1 - x)^alpha."""
    return PiecewiseFn(alpha, (Segment.arc(0.0, 1.0, "right", -1, 1.0, 1.0),))


def peak_arcs(alpha: float) -> PiecewiseFn:
    """x -> min(x^alpha, (1 - x)^alpha); criticals 0 and 1, peak 2^-alpha at 1/2."""
    return PiecewiseFn(
        alpha,
        (
            Segment.arc(0.0, 0.5, "left", 1, 1.0, 0.0),
            Segment.arc(0.5, 1.0, "right", 1, 1.0, 0.0),
        ),
    )


def two_arc(alpha: float) -> PiecewiseFn:
    """x -> x^a/2 - (|x - 1/2|^a - 2^-a)/2: mixed segments, criticals {0, 1/2}, L = 1."""
    a = check_alpha(alpha)
    c = 0.5 * 0.5**a
    terms = (ArcTerm(0.0, 0.5), ArcTerm(0.5, -0.5))
    return PiecewiseFn(a, (Segment(0.0, 0.5, 0.0, c, terms), Segment(0.5, 1.0, 0.0, c, terms)))


def symmetric_two_arc(alpha: float) -> PiecewiseFn:
    """x -> x^a/2 + (1 - (1 - x)^a)/2: one mixed segment, criticals {0, 1}."""
    terms = (ArcTerm(0.0, 0.5), ArcTerm(1.0, -0.5))
    return PiecewiseFn(alpha, (Segment(0.0, 1.0, 0.0, 0.5, terms),))


def random_polygon(
    alpha: float,
    rng: np.random.Generator,
    nodes: int = 6,
    scale: float = 1.0,
    dyadic_level: int | None = None,
) -> Polygon:
    """
    Based polygon with `nodes` nodes; each cell rises or falls by at most
    scale * width^alpha. With `dyadic_level` the abscissae are multiples of
    2^-dyadic_level.
    """
    if nodes < 2:
        raise ValueError("a polygon needs at least 2 nodes")
    if dyadic_level is not None:
        grid = np.arange(1, 2**dyadic_level)
        inner = np.sort(rng.choice(grid, size=min(nodes - 2, grid.size), replace=False))
        xs = np.concatenate([[0.0], inner / 2.0**dyadic_level, [1.0]])
    else:
        inner = np.sort(rng.uniform(0.0, 1.0, nodes - 2))
        xs = np.unique(np.concatenate([[0.0], inner, [1.0]]))
    widths = np.diff(xs)
    steps = scale * rng.uniform(-1.0, 1.0, widths.size) * widths**alpha
    ys = np.concatenate([[0.0], np.cumsum(steps)])
    return Polygon.from_nodes(alpha, xs, ys)


def random_arc_function(
    alpha: float, rng: np.random.Generator, pieces: int = 4, scale: float = 1.0
) -> PiecewiseFn:
    """
    Based function alternating affine pieces and single arcs anchored at a
    random end of their piece; continuity is enforced by chaining offsets.
    """
    a = check_alpha(alpha)
    inner = np.sort(rng.uniform(0.05, 0.95, max(pieces - 1, 0)))
    xs = np.unique(np.concatenate([[0.0], inner, [1.0]]))
    segs: list[Segment] = []
    y = 0.0
    for i, (lo, hi) in enumerate(zip(xs[:-1], xs[1:], strict=True)):
        lo, hi = float(lo), float(hi)
        w = hi - lo
        if i % 2 == 0 or rng.random() < 0.3:
            side = "left" if rng.random() < 0.5 else "right"
            sign = 1 if rng.random() < 0.5 else -1
            coeff = scale * float(rng.uniform(0.2, 1.0))
            # value at lo must equal y
            offset = y if side == "left" else y - sign * coeff * w**a
            seg = Segment.arc(lo, hi, side, sign, coeff, offset)
        else:
            seg = Segment.affine(lo, hi, scale * float(rng.uniform(-1.0, 1.0)) * w ** (a - 1.0), y)
        segs.append(seg)
        y = seg.value(hi, a)
    return PiecewiseFn(a, tuple(segs))
