# tests/test_ciesielski.py
from __future__ import annotations

import numpy as np
import pytest

from holder_lab.core.errors import InvalidParameter
from holder_lab.modules.ciesielski.coeffs import CoeffSeq, DyadicIndex
from holder_lab.modules.ciesielski.service import peak_height
from holder_lab.modules.holder.families import power


def test_dyadic_index():
    idx = DyadicIndex.from_n(6)
    assert (idx.m, idx.k) == (2, 2)
    assert (idx.xl, idx.xc, idx.xr) == (0.25, 0.375, 0.5)
    with pytest.raises(InvalidParameter):
        DyadicIndex.from_n(1)


def test_phi_has_unit_seminorm(ciesielski, holder):
    assert holder.seminorm(ciesielski.phi(6, 0.5), 1e-4).encloses(1.0, atol=1e-4)


@pytest.mark.parametrize("alpha", [0.4, 0.5])
def test_biorthogonal_exactly(ciesielski, alpha):
    N = 1024
    for n in range(1, N + 1):
        c = ciesielski.analyze(ciesielski.phi(n, alpha), N)
        assert np.array_equal(c.values, CoeffSeq.unit(alpha, n, N).values), n


@pytest.mark.parametrize("n", [1, 2, 3, 17, 64, 255, 512, 1024])
def test_phi_normalised(ciesielski, holder, n):
    phi = ciesielski.phi(n, 0.5)
    assert holder.seminorm(phi, 1e-4).encloses(1.0, atol=1e-4)
    if n > 1:
        idx = DyadicIndex.from_n(n)
        assert phi(idx.xc) == peak_height(idx.m, 0.5)
        assert phi(idx.xc) == pytest.approx(2.0 ** (-(idx.m + 1) * 0.5), rel=1e-15)
        assert phi.slope(idx.xl, idx.xc) == pytest.approx(1.0, abs=1e-15)
        assert phi.slope(idx.xc, idx.xr) == pytest.approx(1.0, abs=1e-15)


def test_increments_agree_with_values(ciesielski):
    phi = ciesielski.phi(6, 0.5)
    lo = np.array([0.0, 0.25, 0.3, 0.375, 0.1])
    hi = np.array([0.25, 0.375, 0.35, 0.5, 0.9])
    assert np.allclose(phi.increments(lo, hi), phi(hi) - phi(lo), rtol=0.0, atol=1e-15)


def test_roundtrip(ciesielski):
    rng = np.random.default_rng(3)
    vals = rng.integers(-64, 65, 100) / 16.0
    c = CoeffSeq(0.6, vals)
    back = ciesielski.analyze(ciesielski.synthesize(c), c.N)
    assert np.allclose(back.values, c.values, rtol=0.0, atol=1e-12 * c.max_abs())


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_power_coefficients_at_left_ends(ciesielski, alpha):
    c = ciesielski.analyze(power(alpha), 2**7)
    firsts = np.array([c.level(m)[0] for m in range(7)])
    assert np.allclose(firsts, 1.0 - 2.0 ** (alpha - 1.0), rtol=0.0, atol=1e-12)
    assert c[1] == 1.0


def test_analyze_needs_based_function(ciesielski):
    with pytest.raises(InvalidParameter):
        ciesielski.analyze(power(0.5) + 1.0, 8)


def test_uniform_bound_dominates(ciesielski):
    rng = np.random.default_rng(11)
    c = CoeffSeq(0.5, rng.uniform(-1.0, 1.0, 200))
    xs, ys = ciesielski.synthesize(c).nodes
    assert float(np.max(np.abs(ys))) <= ciesielski.uniform_bound(c)


def test_cp_profile_of_power_is_origin(ciesielski):
    c = ciesielski.analyze(power(0.5), 4096)
    out = ciesielski.cp_profile(c, 0.05, 8)
    assert out.points == [0.0]
    assert len(out.heavy_counts) == c.top_level + 1


def test_cp_profile_depth_limit(ciesielski):
    c = CoeffSeq.zeros(0.5, 64)
    with pytest.raises(InvalidParameter):
        ciesielski.cp_profile(c, 0.1, 6)


def test_ones_profile_closed_form(ciesielski):
    out = ciesielski.ones_profile(1025, 0.5)
    pairs = [(s, cf) for s, cf in zip(out.slopes, out.closed_form, strict=True) if cf is not None]
    assert pairs
    assert all(abs(s - cf) <= 1e-12 * cf for s, cf in pairs)
    assert out.b_hat < out.limit
    assert out.slopes[0] == 1.0


def test_coeff_text_roundtrip():
    c = CoeffSeq.from_mapping(0.5, {1: 0.25, 7: -3.0}, 7)
    back = CoeffSeq.loads(c.dumps())
    assert back.support() == {1: 0.25, 7: -3.0}
