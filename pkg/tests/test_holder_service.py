# tests/test_holder_service.py
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, given
from hypothesis import settings as hsettings
from hypothesis import strategies as st

from holder_lab.core.errors import InvalidParameter
from holder_lab.modules.holder.families import (
    identity,
    peak_arcs,
    power,
    random_arc_function,
    random_polygon,
    symmetric_two_arc,
    two_arc,
)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_power_seminorm_is_one(holder, alpha):
    b = holder.seminorm(power(alpha), 1e-3)
    assert b.converged
    assert b.encloses(1.0, atol=1e-3)
    assert b.upper - b.lower <= 1e-3


def test_identity_seminorm(holder):
    assert holder.seminorm(identity(0.5), 1e-3).encloses(1.0, atol=1e-3)


def test_sup_norm_of_peak(holder):
    b = holder.sup_norm(peak_arcs(0.5), 1e-4)
    assert b.encloses(2.0**-0.5, atol=1e-4)


def test_lipschitz_norm_takes_the_max(holder):
    b = holder.lipschitz_norm(power(0.5, coeff=3.0), 1e-3)
    assert b.encloses(3.0, atol=1e-3)


def test_band_excludes_long_pairs(holder):
    # power slopes over |x - y| >= 1/2 peak at the pair (0, 1/2)
    b = holder.band_slope(power(0.5), 0.5, 1.0, 1e-4)
    assert b.encloses(1.0, atol=1e-4)
    short = holder.band_slope(identity(0.5), 0.0, 0.25, 1e-4)
    assert short.encloses(0.5, atol=1e-4)


@pytest.mark.parametrize(("lo", "hi"), [(0.5, 0.5), (-0.1, 0.5), (0.0, 1.5)])
def test_empty_band(holder, lo, hi):
    with pytest.raises(InvalidParameter):
        holder.band_slope(power(0.5), lo, hi)


def test_tol_must_exceed_slack(holder):
    with pytest.raises(InvalidParameter):
        holder.seminorm(power(0.5), holder.settings.BOUND_SLACK)


@pytest.mark.parametrize(
    ("make", "expected"),
    [(power, [0.0]), (peak_arcs, [0.0, 1.0]), (two_arc, [0.0, 0.5]), (symmetric_two_arc, [0.0, 1.0]), (identity, [])],
)
def test_critical_sets(holder, make, expected):
    assert holder.critical_set(make(0.5)) == expected


def test_breakpoints_listed_noncritical(holder):
    pts = holder.critical_points(peak_arcs(0.5))
    assert [(p.x, p.critical) for p in pts] == [(0.0, True), (0.5, False), (1.0, True)]


@hsettings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 2**31 - 1), nodes=st.integers(2, 8))
def test_sampled_slopes_below_certified_upper(holder, seed, nodes):
    rng = np.random.default_rng(seed)
    h = random_polygon(0.5, rng, nodes=nodes)
    b = holder.seminorm(h, 1e-3)
    xs, ys = rng.random(500), rng.random(500)
    assert float(np.nanmax(h.slopes(xs, ys))) <= b.upper


@pytest.mark.parametrize("make", [peak_arcs, two_arc, symmetric_two_arc])
def test_arc_families_enclose_dense_pair_samples(holder, make):
    h = make(0.5)
    b = holder.seminorm(h, 1e-3)
    assert b.converged
    rng = np.random.default_rng(17)
    xs, ys = rng.random(100_000), rng.random(100_000)
    assert float(np.nanmax(h.slopes(xs, ys))) <= b.upper


@hsettings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 2**31 - 1), pieces=st.integers(2, 6), alpha=st.sampled_from([0.3, 0.5, 0.7]))
def test_mixed_functions_enclose_dense_pair_samples(holder, seed, pieces, alpha):
    rng = np.random.default_rng(seed)
    h = random_arc_function(alpha, rng, pieces=pieces) + random_polygon(alpha, rng, nodes=4)
    b = holder.seminorm(h, 1e-3)
    xs, ys = rng.random(100_000), rng.random(100_000)
    assert float(np.nanmax(h.slopes(xs, ys))) <= b.upper


@hsettings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 2**31 - 1), c=st.floats(-4.0, 4.0, allow_nan=False).filter(lambda v: abs(v) > 1e-3))
def test_seminorm_is_a_seminorm(holder, seed, c):
    rng = np.random.default_rng(seed)
    f = random_arc_function(0.5, rng, pieces=3)
    g = random_polygon(0.5, rng, nodes=5)
    tol = 1e-3
    lf, lg = holder.seminorm(f, tol), holder.seminorm(g, tol)
    # subadditive
    assert holder.seminorm(f + g, tol).lower <= lf.upper + lg.upper
    # symmetric
    neg = holder.seminorm(-f, tol)
    assert neg.lower <= lf.upper and lf.lower <= neg.upper
    # absolutely homogeneous
    scaled = holder.seminorm(f * c, abs(c) * tol)
    assert scaled.lower <= abs(c) * lf.upper + 1e-9
    assert abs(c) * lf.lower <= scaled.upper + 1e-9


def test_cross_slope_between_halves(holder):
    # the slope from 0 to the peak at 1/2 is 1, and no cross pair does better
    b = holder.cross_slope(peak_arcs(0.5), (0.0, 0.5), (0.5, 1.0), 1e-4)
    assert b.converged
    assert b.encloses(1.0, atol=1e-4)


def test_cross_slope_stays_below_the_seminorm(holder):
    rng = np.random.default_rng(23)
    h = random_arc_function(0.5, rng, pieces=6)
    bps = h.breakpoints
    cross = holder.cross_slope(h, (0.0, bps[2]), (bps[4], 1.0), 1e-4)
    whole = holder.seminorm(h, 1e-4)
    assert cross.lower <= whole.upper
    x, y = cross.witness
    assert x <= bps[2] and y >= bps[4]


@pytest.mark.parametrize(("left", "right"), [((0.0, 0.3), (0.5, 1.0)), ((0.0, 1.0), (0.5, 1.0))])
def test_cross_slope_needs_ordered_runs(holder, left, right):
    with pytest.raises(InvalidParameter):
        holder.cross_slope(peak_arcs(0.5), left, right)
