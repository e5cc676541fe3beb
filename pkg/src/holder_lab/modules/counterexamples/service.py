# src/holder_lab/modules/counterexamples/service.py
from __future__ import annotations

import math

import numpy as np

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.errors import InvalidParameter
from holder_lab.core.logging import get_logger
from holder_lab.core.report import CertificateReport
from holder_lab.modules.holder.piecewise import PiecewiseFn, Polygon
from holder_lab.modules.holder.service import HolderService

from .schemas import SpikeParams

log = get_logger(__name__)

# relative tolerance on the spike slopes, which are k up to one rounding
_SLOPE_RTOL = 1e-12


class SpikeService:
    """Tents of height k delta_k^alpha at x_k = 2^-k: pointwise-lip everywhere, L unbounded."""

    def __init__(
        self, settings: Settings | None = None, holder: HolderService | None = None
    ) -> None:
        self.settings = settings or get_settings()
        self.holder = holder or HolderService(self.settings)

    # ---- public API ----------------------------------------------------------
    @staticmethod
    def spike_build(params: SpikeParams) -> Polygon:
        xs: list[float] = [0.0]
        ys: list[float] = [0.0]
        for k in range(params.K, 0, -1):
            x, d = params.xk[k - 1], params.deltak[k - 1]
            xs += [x - d, x, x + d]
            ys += [0.0, params.peak(k), 0.0]
        xs.append(1.0)
        ys.append(0.0)
        return Polygon.from_nodes(params.alpha, xs, ys)

    def build(self, alpha: float, K: int) -> tuple[SpikeParams, Polygon]:
        params = SpikeParams.build(alpha, K)
        return params, self.spike_build(params)

    def spike_verify(
        self, h: PiecewiseFn, params: SpikeParams, tol: float | None = None
    ) -> CertificateReport:
        """
        (a) L_{x_k, x_k + delta_k}(h) = k, and the certified L(h) is >= K;
        (b) the largest slope from 0 to a peak in (0, 2^-j] is <= 2^(-j(1-a)), non-increasing in j;
        (c) on [2^-j, 1] h is Lipschitz with constant max_{k <= j} k delta_k^(a-1).
        """
        if not isinstance(h, Polygon):
            raise InvalidParameter("spike_verify expects the polygon from spike_build")
        if h.alpha != params.alpha:
            raise InvalidParameter(f"alpha mismatch: h has {h.alpha}, params have {params.alpha}")
        if len(h.segments) != 3 * params.K + 1:
            raise InvalidParameter(
                f"h has {len(h.segments)} segments, {params.K} spikes need {3 * params.K + 1}"
            )
        a = params.alpha
        report = CertificateReport(experiment="spike", alpha=a, parameters={"K": params.K})

        ks = np.arange(1, params.K + 1)
        xk = np.asarray(params.xk)
        dk = np.asarray(params.deltak)
        slopes = h.slopes(xk, xk + dk)
        worst = float(np.max(np.abs(slopes - ks) / ks))
        report.add(
            "L(x_k, x_k + delta_k) = k",
            passed=worst <= _SLOPE_RTOL,
            lower=float(slopes.min()),
            upper=float(slopes.max()),
            tol=_SLOPE_RTOL,
            slopes=slopes,
            max_rel_error=worst,
        )
        bound = self.holder.seminorm(h, tol)
        report.add(
            "L(h) >= K",
            passed=bound.lower >= params.K - bound.tol,
            lower=bound.lower,
            upper=bound.upper,
            tol=bound.tol,
            converged=bound.converged,
            pair=bound.witness,
        )

        from_zero = h.evaluate(xk) / xk**a
        # suffix maxima: peaks inside (0, 2^-j] are k >= j
        decay = np.maximum.accumulate(from_zero[::-1])[::-1]
        envelope = xk ** (1.0 - a)
        report.add(
            "max L(0, x) over peaks x <= 2^-j",
            passed=bool(np.all(np.diff(decay) <= 0.0) and np.all(decay <= envelope * (1 + 1e-12))),
            lower=float(decay[-1]),
            upper=float(decay[0]),
            decay=decay,
        )

        # the steepest piece right of 2^-j is a flank of one of the spikes 1..j
        spikes = range(1, params.K + 1)
        lips = np.array([h.lipschitz_constant(math.ldexp(1.0, -j), 1.0) for j in spikes])
        flanks = np.array([params.peak(k) / params.deltak[k - 1] for k in spikes])
        closed = np.maximum.accumulate(flanks)
        drift = float(np.max(np.abs(lips - closed) / closed))
        report.add(
            "Lipschitz on [2^-j, 1] = max_{k <= j} k delta_k^(a-1)",
            passed=drift <= _SLOPE_RTOL,
            lower=float(lips.min()),
            upper=float(lips.max()),
            tol=_SLOPE_RTOL,
            constants=lips,
            closed_form=closed,
        )
        log.debug("spike K=%d: max slope %.6g, decay %.3g", params.K, slopes.max(), decay[-1])
        return report
