# tests/test_almond.py
from __future__ import annotations

import math

import numpy as np
import pytest

from holder_lab.core.config import Settings
from holder_lab.core.errors import BudgetExhausted, InsufficientDepth, InvalidParameter
from holder_lab.modules.almond.service import AlmondService, ratio_residual


def test_k_at_one_half(almond):
    k = almond.solve_k(0.5)
    assert k == pytest.approx(4.0 / 9.0, abs=1e-12)
    assert abs(ratio_residual(k, 0.5)) <= 1e-12


def test_k_increasing_in_alpha(almond):
    ks = [almond.solve_k(a) for a in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert all(0.0 < k < 0.5 for k in ks)
    assert ks == sorted(ks)


def test_params_closed_forms(almond):
    p = almond.params(0.5)
    assert p.liminf_slope == pytest.approx(1.0 / math.sqrt(5.0), abs=1e-12)
    assert p.failure_c > 0.0


def test_depth_one_nodes(almond):
    st = almond.build(0.5, 1)
    n = st.nodes
    assert np.allclose(n.x, [0.0, st.k, 1.0 - st.k, 1.0], rtol=0.0, atol=1e-15)
    assert np.allclose(n.value, [0.0, st.ka, 1.0 - st.ka, 1.0], rtol=0.0, atol=1e-15)
    assert [n.kind(i) for i in range(4)] == ["bottom", "top", "bottom", "top"]


def test_stages_nest(almond):
    grid = np.linspace(0.0, 1.0, 4097)
    stages = [almond.build(0.5, d) for d in range(5)]
    for s0, s1 in zip(stages, stages[1:]):
        assert np.all(s0.lower(grid) <= s1.lower(grid) + 1e-12)
        assert np.all(s1.lower(grid) <= s1.upper(grid) + 1e-12)
        assert np.all(s1.upper(grid) <= s0.upper(grid) + 1e-12)


def test_nodes_persist(almond):
    a, b = almond.build(0.3, 3).nodes, almond.build(0.3, 4).nodes
    idx = np.searchsorted(b.x, a.x)
    assert np.array_equal(b.x[idx], a.x)
    assert np.array_equal(b.value[idx], a.value)


def test_self_similar_left_almond(almond):
    d = 4
    st, prev = almond.build(0.5, d), almond.build(0.5, d - 1)
    x = np.linspace(0.0, 1.0, 257)
    assert np.allclose(st.h(st.k * x), st.ka * prev.h(x), rtol=0.0, atol=1e-9)


def test_measured_gap_decreases_to_depth_twenty(almond):
    gaps = almond.measured_gaps(0.5, 20)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[20] < 1e-3
    assert gaps[12] == pytest.approx(0.0031925, abs=1e-6)


@pytest.mark.parametrize("depth", [0, 3, 9])
def test_measured_gap_is_widest_leaf(almond, depth):
    st = almond.build(0.4, depth)
    assert st.measured_gap() == pytest.approx(st.max_gap, rel=1e-9)


def test_measured_gap_needs_two_samples(almond):
    with pytest.raises(InvalidParameter):
        almond.build(0.5, 2).measured_gap(1)


def test_materialized_stage_matches_lazy(almond):
    st = almond.build(0.5, 3)
    f = almond.materialize(st, "h_tilde")
    x = np.linspace(0.0, 1.0, 1001)
    assert np.allclose(f.evaluate(x), st.h_tilde(x), rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("which", ["h", "h_tilde"])
@pytest.mark.parametrize("depth", range(9))
def test_stage_seminorm_is_one(almond, depth, which):
    b = almond.stage_seminorm(almond.build(0.5, depth), which, 1e-3)
    assert b.converged
    assert b.encloses(1.0, atol=1e-3)


def test_stage_seminorm_matches_direct_search(almond, holder):
    st = almond.build(0.3, 2)
    direct = holder.seminorm(almond.materialize(st, "h"), 1e-4)
    staged = almond.stage_seminorm(st, "h", 1e-4)
    assert staged.lower <= direct.upper + 1e-9
    assert direct.lower <= staged.upper + 1e-9


def test_stage_seminorm_rejects_envelopes(almond):
    with pytest.raises(InvalidParameter):
        almond.stage_seminorm(almond.build(0.5, 1), "upper")


def test_build_budget():
    svc = AlmondService(Settings(ALMOND_SEGMENT_BUDGET=100))
    svc.build(0.5, 3)
    with pytest.raises(BudgetExhausted):
        svc.build(0.5, 4)


def test_series_include_nodes(almond):
    st = almond.build(0.5, 2)
    x, h, ht = almond.almond_series(st, 65)
    assert set(st.nodes.x) <= set(x)
    assert h.shape == ht.shape == x.shape


def test_limsup_from_origin(almond):
    out = almond.limsup_diagnostic(almond.build(0.5, 8), 0.0, 6)
    assert out.kind == "bottom"
    assert out.estimate == pytest.approx(1.0, abs=1e-12)
    assert len(out.radii) == 6


def test_limsup_running_max_is_cumulative(almond):
    out = almond.limsup_diagnostic(almond.build(0.5, 8), 0.0, 6)
    run, ring = out.running_max, out.scale_max
    assert all(m is not None for m in run)
    # each ball is its outer ring plus the next ball
    for j in range(len(run) - 1):
        assert run[j] == max(run[j + 1], -np.inf if ring[j] is None else ring[j])
    assert all(b <= a for a, b in zip(run, run[1:]))
    assert all(m is None or m <= 1.0 + 1e-12 for m in ring)


def test_limsup_depth_zero(almond):
    out = almond.limsup_diagnostic(almond.build(0.5, 0), 0.0, 1)
    assert out.estimate == 1.0


def test_limsup_needs_a_node(almond):
    with pytest.raises(InvalidParameter):
        almond.limsup_diagnostic(almond.build(0.5, 3), 0.3, 2)


def test_liminf_closed_form(almond):
    out = almond.liminf_diagnostic(almond.build(0.5, 10), 0.0, 8)
    assert out.closed_form == pytest.approx(1.0 / math.sqrt(5.0), abs=1e-12)
    assert max(out.deviations) <= 1e-10
    assert out.envelope_min is not None and out.envelope_min >= -1e-12


def test_liminf_insufficient_depth(almond):
    with pytest.raises(InsufficientDepth) as err:
        almond.liminf_diagnostic(almond.build(0.5, 4), 0.0, 6)
    assert err.value.needed_depth == 7


def test_polygon_failure_uniform_partition(almond):
    rep = almond.polygon_failure_certificate(0.5, np.linspace(0.0, 1.0, 9), 12)
    assert rep.passed
    last = rep.results[-1]
    assert last.lower >= 1.0 + last.witness["c"] - 1e-6
