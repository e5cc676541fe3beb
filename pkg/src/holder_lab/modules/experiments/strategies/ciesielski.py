# src/holder_lab/modules/experiments/strategies/ciesielski.py
from __future__ import annotations

from typing import Any

import numpy as np

from holder_lab.core.progress import ProgressReporter
from holder_lab.modules.ciesielski.coeffs import CoeffSeq
from holder_lab.modules.ciesielski.service import CiesielskiService
from holder_lab.modules.experiments.schemas import ExperimentSpec
from holder_lab.modules.holder.families import power
from holder_lab.modules.holder.service import HolderService

from .approx import named_function
from .base import ExperimentBase, ExperimentResult


class _CiesielskiExperiment(ExperimentBase):
    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.service = CiesielskiService(self.settings.WORKERS)


class BiorthogonalityExperiment(_CiesielskiExperiment):
    name = "ciesielski-biorth"
    summary = "analyze(phi_n) = e_n exactly and the x^a coefficients at the left end of each level."
    defaults = {"N": 1024, "levels": 10}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        N, levels = self.param(spec, "N"), self.param(spec, "levels")
        report = self.new_report(spec)
        if reporter:
            reporter.start("profile", total=N, text="basis functions")
        wrong: list[int] = []
        worst = 0.0
        for n in range(1, N + 1):
            c = self.service.analyze(self.service.phi(n, spec.alpha), N)
            err = np.abs(c.values - CoeffSeq.unit(spec.alpha, n, N).values)
            if float(err.max()) > 0.0:
                wrong.append(n)
                worst = max(worst, float(err.max()))
            if reporter:
                reporter.update("profile", 1)
        if reporter:
            reporter.end("profile")
        report.add("analyze(phi_n) = e_n", passed=not wrong, upper=worst, tol=0.0, mismatches=wrong[:20])

        a = spec.alpha
        c = self.service.analyze(power(a), 2 ** (levels + 1))
        firsts = np.array([c.level(m)[0] for m in range(levels + 1)])
        expected = 1.0 - 2.0 ** (a - 1.0)
        dev = float(np.max(np.abs(firsts - expected)))
        report.add(
            "x^a: a_(2^m + 1) = 1 - 2^(a-1)",
            passed=dev <= 1e-12,
            lower=float(firsts.min()),
            upper=float(firsts.max()),
            tol=1e-12,
            expected=expected,
        )
        return ExperimentResult(report)


class RoundTripExperiment(_CiesielskiExperiment):
    name = "ciesielski-roundtrip"
    summary = "analyze(synthesize(c)) = c for random finitely supported sequences."
    defaults = {"trials": 100, "max_N": 256, "tol": 1e-12}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        trials, max_n, tol = (self.param(spec, k) for k in ("trials", "max_N", "tol"))
        report = self.new_report(spec)
        rng = np.random.default_rng(spec.seed)
        worst = 0.0
        failed = 0
        for _ in range(trials):
            N = int(rng.integers(1, max_n + 1))
            vals = rng.integers(-64, 65, N) / 16.0 * (rng.random(N) < 0.5)
            c = CoeffSeq(spec.alpha, vals)
            back = self.service.analyze(self.service.synthesize(c), N)
            err = float(np.max(np.abs(back.values - c.values)))
            worst = max(worst, err)
            failed += err > tol * max(1.0, c.max_abs())
        report.add(
            "analyze o synthesize = id",
            passed=failed == 0,
            upper=worst,
            tol=tol,
            failed=failed,
        )
        return ExperimentResult(report)


class CpProfileExperiment(_CiesielskiExperiment):
    name = "cp-profile"
    summary = "Points whose every dyadic neighbourhood holds a heavy coefficient."
    defaults = {"function": "power", "N": 4096, "eps": 0.05, "depth": 8}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        fname, N, eps, depth = (self.param(spec, k) for k in ("function", "N", "eps", "depth"))
        report = self.new_report(spec)
        h = named_function(fname, spec.alpha)
        c = self.service.analyze(h, N)
        out = self.service.cp_profile(c, eps, depth, reporter=reporter)
        crit = np.asarray(HolderService(self.settings).critical_set(h))
        near = [
            bool(crit.size) and float(np.min(np.abs(crit - x))) <= 2.0**-depth for x in out.points
        ]
        report.add(
            out.label,
            passed=all(near),
            points=out.points,
            criticals=crit,
            heavy_counts=out.heavy_counts,
        )
        return ExperimentResult(report)


class OnesProfileExperiment(_CiesielskiExperiment):
    name = "ones-profile"
    summary = "Slopes from 0 of phi_1 + ... + phi_N along 2^-j and their closed form."
    defaults = {"N": 1025}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        N = self.param(spec, "N")
        report = self.new_report(spec)
        out = self.service.ones_profile(N, spec.alpha)
        pairs = [(s, cf) for s, cf in zip(out.slopes, out.closed_form, strict=True) if cf is not None]
        dev = max((abs(s - cf) / cf for s, cf in pairs), default=0.0)
        report.add(
            "slopes match the closed form",
            passed=dev <= 1e-12,
            upper=dev,
            tol=1e-12,
            checked=len(pairs),
        )
        report.add(
            "b_hat below the N -> inf limit",
            passed=out.b_hat <= out.limit * (1.0 + 1e-12),
            lower=out.b_hat,
            upper=out.limit,
            cauchy_gaps=out.cauchy_gaps,
        )
        return ExperimentResult(
            report, {"profile": (np.asarray(out.points), np.asarray(out.slopes))}
        )


EXPERIMENTS: tuple[type[ExperimentBase], ...] = (
    BiorthogonalityExperiment,
    RoundTripExperiment,
    CpProfileExperiment,
    OnesProfileExperiment,
)
