# tests/test_counterexamples.py
from __future__ import annotations

import numpy as np
import pytest

from holder_lab.core.errors import InvalidParameter
from holder_lab.modules.counterexamples.schemas import SpikeParams
from holder_lab.modules.counterexamples.service import SpikeService
from holder_lab.modules.holder.families import power


def test_spike_widths_are_powers_of_two():
    p = SpikeParams.build(0.5, 10)
    for k, (x, d) in enumerate(zip(p.xk, p.deltak), start=1):
        assert x == 2.0**-k
        assert np.frexp(d)[0] == 0.5
        assert p.peak(k) <= x


def test_spike_polygon_shape():
    params, h = SpikeService().build(0.5, 5)
    assert len(h.segments) == 16
    assert h.based and h(1.0) == 0.0
    for k in range(1, 6):
        assert h(params.xk[k - 1]) == params.peak(k)


def test_spike_report():
    svc = SpikeService()
    params, h = svc.build(0.5, 20)
    rep = svc.spike_verify(h, params)
    assert rep.passed
    slopes = np.asarray(rep.results[0].witness["slopes"])
    assert np.allclose(slopes, np.arange(1, 21), rtol=1e-12, atol=0.0)
    assert rep.results[1].lower >= 20 * (1 - 1e-12)
    decay = rep.results[2].witness["decay"]
    assert decay[-1] < 0.05


def test_spike_verify_rejects_other_functions():
    svc = SpikeService()
    params, h = svc.build(0.5, 4)
    with pytest.raises(InvalidParameter):
        svc.spike_verify(power(0.5), params)
    other, _ = svc.build(0.5, 3)
    with pytest.raises(InvalidParameter):
        svc.spike_verify(h, other)


def test_spike_params_validation():
    with pytest.raises(InvalidParameter):
        SpikeParams.build(0.5, 0)
    with pytest.raises(ValueError):
        SpikeParams(alpha=0.5, K=2, xk=[0.5, 0.25], deltak=[0.2, 0.2])


def test_spike_seminorm_is_certified(holder):
    svc = SpikeService(holder=holder)
    params, h = svc.build(0.5, 12)
    rep = svc.spike_verify(h, params, tol=1e-3)
    certified = rep.results[1]
    assert certified.passed
    assert certified.lower >= 12 - 1e-3
    assert certified.upper >= certified.lower
    assert certified.witness["converged"]


def test_spike_lipschitz_matches_closed_form():
    svc = SpikeService()
    params, h = svc.build(0.4, 10)
    rep = svc.spike_verify(h, params)
    lip = rep.results[3]
    assert lip.passed
    for j in range(1, 11):
        flank = max(k * params.deltak[k - 1] ** (0.4 - 1.0) for k in range(1, j + 1))
        got = h.lipschitz_constant(2.0**-j, 1.0)
        assert got == pytest.approx(flank, rel=1e-12)
        assert lip.witness["constants"][j - 1] == got
