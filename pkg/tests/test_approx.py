# tests/test_approx.py
from __future__ import annotations

import numpy as np
import pytest

from holder_lab.core.errors import InvalidParameter
from holder_lab.modules.holder.families import (
    identity,
    peak_arcs,
    power,
    random_arc_function,
    random_polygon,
    two_arc,
)
from holder_lab.modules.holder.piecewise import Polygon


def test_inserted_constants_freeze_criticals(approx, holder):
    h = peak_arcs(0.5)
    g = approx.inserted_constants(h, [0.0, 1.0], 0.01)
    assert g.based
    assert holder.critical_set(g) == []
    assert g(0.005) == 0.0
    assert g(0.5) == pytest.approx(h(0.5) - 0.1, abs=1e-15)
    assert g(0.995) == g(1.0)


def test_plan_rejects_missing_critical(approx):
    with pytest.raises(InvalidParameter):
        approx.plan_inserted_constants(two_arc(0.5), [0.0], 0.01)


def test_plan_rejects_overlap(approx):
    with pytest.raises(InvalidParameter):
        approx.plan_inserted_constants(peak_arcs(0.5), [0.0, 1.0], 0.6)


def test_five_cases(approx):
    h = power(0.5)
    plan = approx.plan_inserted_constants(h, [0.0, 1.0], 1e-3)
    g = approx.apply_plan(h, plan)
    out = approx.five_case_check(h, g, plan, 1e-3)
    assert out.unclassified == 0
    assert out.passed
    assert out.band.upper <= out.reference.upper + 1e-3


def test_interpolating_polygon_does_not_grow(approx, holder):
    rng = np.random.default_rng(5)
    for h in (random_polygon(0.5, rng, nodes=7), random_arc_function(0.5, rng, pieces=4)):
        part = np.unique(np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, 6)]))
        p = approx.kp_interpolate(h, part)
        assert isinstance(p, Polygon)
        assert holder.seminorm(p, 1e-6).upper <= holder.seminorm(h, 1e-6).upper + 1e-6
        assert approx.kp_cell_violations(h, p, part) == 0


@pytest.mark.parametrize("part", [[0.0, 0.5], [0.0, 0.5, 0.5, 1.0], [0.0]])
def test_bad_partitions(approx, part):
    with pytest.raises(InvalidParameter):
        approx.kp_interpolate(power(0.5), part)


def test_dense_approx_of_a_polygon_is_exact(approx):
    f, out = approx.dense_polygon_approx(identity(0.5), 0.1, 3)
    assert out.passed
    assert out.sup.upper < 1e-6
    assert len(out.bands) == 4
    assert out.criticals == [0.0, 1.0]


def test_dense_approx_power(approx):
    f, out = approx.dense_polygon_approx(power(0.5), 0.2, 4)
    assert out.passed
    assert out.deltas[0] == 0.25
    assert f(0.0) == 0.0 and f(1.0) == 1.0


def test_dense_approx_checks_every_band(approx):
    eps = 0.1
    f, out = approx.dense_polygon_approx(power(0.5), eps, 6)
    assert out.core_depth > out.depth
    assert out.core_radius < out.deltas[-1]
    assert len(out.bands) == 7
    for band in out.bands:
        assert band.bound.converged
        assert band.passed == (band.bound.upper <= eps + band.bound.tol)
        assert band.passed
    assert out.passed
    # the finest band holds pairs inside the refined annuli around 0
    finest = out.bands[-1]
    assert finest.d_lo == out.deltas[-1]
    assert finest.bound.upper <= eps + finest.bound.tol


def test_dense_approx_needs_positive_eps(approx):
    with pytest.raises(InvalidParameter):
        approx.dense_polygon_approx(power(0.5), 0.0, 3)


def test_3b_for_inserted_constants(approx):
    h = power(0.5)
    g = approx.inserted_constants(h, [0.0, 1.0], 1e-4)
    rep = approx.verify_3b(h, g, 0.2, 0.1)
    assert rep.experiment == "lemma-3b"
    assert rep.passed
    assert [r.label[:3] for r in rep.results] == ["3B1", "3B2"]


def _balls(alpha):
    x = identity(alpha)
    return x, -x, Polygon.from_nodes(alpha, [0.0, 1.0], [0.0, 0.0])


def test_three_ball_without_criticals(approx):
    w = approx.three_ball_witness(identity(0.5), *_balls(0.5), 0.2)
    assert w.delta == 0.0
    assert w.passed


def test_three_ball_power(approx):
    w = approx.three_ball_witness(power(0.5), *_balls(0.5), 0.2)
    assert w.delta > 0.0
    assert w.passed
    assert all(b.upper <= 1.2 for b in w.per_ball_norms)


def test_three_ball_centres_must_be_little(approx):
    x, mx, zero = _balls(0.5)
    with pytest.raises(InvalidParameter):
        approx.three_ball_witness(power(0.5), power(0.5), mx, zero, 0.2)


def test_msummand_identity_witness(approx):
    out = approx.msummand_certificate(identity(0.5))
    assert out.kind == "witness"
    assert out.x_tilde == pytest.approx(0.25, abs=1e-9)
    assert out.slope_value == pytest.approx(1.0 / np.sqrt(0.75), abs=1e-8)
    assert out.violated


def test_msummand_boundary(approx):
    out = approx.msummand_certificate(Polygon.from_nodes(0.5, [0.0, 1.0], [0.0, 3.0]))
    assert out.kind == "boundary"
    assert out.slope_value == 3.0


def test_msummand_needs_based_g(approx):
    with pytest.raises(InvalidParameter):
        approx.msummand_certificate(Polygon.from_nodes(0.5, [0.0, 1.0], [1.0, 1.0]))


def test_msummand_search(approx):
    rep, outcomes = approx.msummand_search(0.5, max_candidates=40, seed=1)
    assert rep.candidates == len(outcomes) == 40
    assert rep.all_violated
    assert rep.by_node_count[2] == 1


def test_msummand_boundary_respects_tolerance(approx):
    inside = Polygon.from_nodes(0.5, [0.0, 1.0], [0.0, 1.0 + 5e-10])
    out = approx.msummand_certificate(inside, tol=1e-9)
    assert out.kind == "witness"
    assert out.violated
    outside = Polygon.from_nodes(0.5, [0.0, 1.0], [0.0, 1.0 + 2e-9])
    out = approx.msummand_certificate(outside, tol=1e-9)
    assert out.kind == "boundary"
    assert out.slope_value == pytest.approx(1.0 + 2e-9, abs=1e-15)


def test_msummand_g_vanishing_at_one(approx):
    g = Polygon.from_nodes(0.5, [0.0, 0.5, 1.0], [0.0, 0.25, 0.0])
    out = approx.msummand_certificate(g)
    assert out.g1 == 0.0
    assert out.kind == "boundary"
    assert out.boundary_values == (2.0, 0.0)
    assert out.violated


def test_3b_for_two_arc(approx, holder):
    h = two_arc(0.5)
    pts = sorted({0.0, 1.0, *holder.critical_set(h)})
    assert pts == [0.0, 0.5, 1.0]
    g = approx.inserted_constants(h, pts, 5e-6)
    rep = approx.verify_3b(h, g, 0.2, 0.1)
    assert rep.passed
    sup, band = rep.results
    assert sup.upper <= 0.2 * 0.1
    assert band.upper <= 1.2
