# tests/test_piecewise.py
from __future__ import annotations

import numpy as np
import pytest

from holder_lab.core.errors import DegeneratePair, InvalidParameter
from holder_lab.modules.holder import codec
from holder_lab.modules.holder.families import identity, peak_arcs, power, random_arc_function, two_arc
from holder_lab.modules.holder.piecewise import ArcTerm, PiecewiseFn, Polygon, Segment, check_alpha


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, float("nan")])
def test_alpha_outside_unit_interval(alpha):
    with pytest.raises(InvalidParameter):
        check_alpha(alpha)


def test_power_values():
    h = power(0.5)
    assert h(0.25) == 0.5
    assert np.array_equal(h(np.array([0.0, 1.0])), [0.0, 1.0])
    assert h.based


def test_outside_domain():
    with pytest.raises(InvalidParameter):
        power(0.5)(1.5)


def test_arc_anchor_inside_segment_rejected():
    with pytest.raises(InvalidParameter):
        Segment(0.0, 1.0, arcs=(ArcTerm(0.5, 1.0),))


def test_discontinuity_rejected():
    segs = (Segment.affine(0.0, 0.5, 0.0, 0.0), Segment.affine(0.5, 1.0, 0.0, 1.0))
    with pytest.raises(InvalidParameter):
        PiecewiseFn(0.5, segs)


@pytest.mark.parametrize(
    ("xs", "ys"),
    [([0.1, 1.0], [0.0, 0.0]), ([0.0, 0.5, 0.5, 1.0], [0, 1, 1, 0]), ([0.0, 1.0], [0.0, np.inf])],
)
def test_bad_polygon_nodes(xs, ys):
    with pytest.raises(InvalidParameter):
        Polygon.from_nodes(0.5, xs, ys)


def test_polygon_interpolates_nodes():
    p = Polygon.from_nodes(0.5, [0.0, 0.25, 1.0], [0.0, 1.0, -2.0])
    assert p(0.25) == 1.0
    assert p(0.125) == 0.5
    assert p.lipschitz_constant() == 4.0
    assert p.lipschitz_constant(0.5, 1.0) == 4.0


def test_difference_cancels_to_polygon():
    h = two_arc(0.5)
    d = h - h
    assert isinstance(d, Polygon)
    assert np.all(d.evaluate(np.linspace(0.0, 1.0, 33)) == 0.0)


def test_algebra_matches_pointwise():
    a = power(0.3)
    b = peak_arcs(0.3)
    xs = np.linspace(0.0, 1.0, 101)
    combo = 2.0 * a - b + 1.0
    assert np.allclose(combo.evaluate(xs), 2.0 * a.evaluate(xs) - b.evaluate(xs) + 1.0, atol=1e-14)
    assert not combo.based


def test_alpha_mismatch():
    with pytest.raises(InvalidParameter):
        power(0.5) + power(0.4)


def test_slope_and_degenerate_pair():
    h = power(0.5)
    assert h.slope(0.0, 0.25) == 1.0
    with pytest.raises(DegeneratePair):
        h.slope(0.3, 0.3)
    s = h.slopes([0.0, 0.3], [0.25, 0.3])
    assert s[0] == 1.0 and np.isnan(s[1])


def test_identity_seminorm_pair():
    assert identity(0.5).slope(0.0, 1.0) == 1.0


def test_codec_restores_exact_values(tmp_path):
    rng = np.random.default_rng(7)
    for f in (two_arc(0.5), peak_arcs(0.7), random_arc_function(0.4, rng, pieces=5)):
        back = codec.read(codec.write(f, tmp_path / "f.txt"))
        assert back.alpha == f.alpha
        assert back.segments == f.segments


def test_codec_rejects_garbage():
    with pytest.raises(InvalidParameter):
        codec.loads("alpha 0.5\n0 1 wobble 1 2\n")
    with pytest.raises(InvalidParameter):
        codec.loads("0 1 affine 1 0\n")
