# src/holder_lab/modules/experiments/strategies/counterexamples.py
from __future__ import annotations

import numpy as np

from holder_lab.core.progress import ProgressReporter
from holder_lab.modules.counterexamples.service import SpikeService
from holder_lab.modules.experiments.schemas import ExperimentSpec

from .base import ExperimentBase, ExperimentResult


class SpikeExperiment(ExperimentBase):
    name = "spike"
    summary = "Tents at 2^-k: slopes k at the spikes, slopes from 0 decaying to 0."
    defaults = {"K": 20, "decay_limit": 0.05}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        K, limit = self.param(spec, "K"), self.param(spec, "decay_limit")
        svc = SpikeService()
        params, h = svc.build(spec.alpha, K)
        report = svc.spike_verify(h, params)
        report.parameters = {"K": K, "decay_limit": limit}
        report.seed = spec.seed

        decay = report.results[2].witness["decay"]
        report.add(f"decay below {limit} by j = K", passed=decay[-1] < limit, upper=decay[-1], tol=limit)
        xs = np.asarray(params.xk)
        return ExperimentResult(report, {"decay": (xs, np.asarray(decay))})


EXPERIMENTS: tuple[type[ExperimentBase], ...] = (SpikeExperiment,)
