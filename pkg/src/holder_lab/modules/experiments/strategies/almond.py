# src/holder_lab/modules/experiments/strategies/almond.py
from __future__ import annotations

from typing import Any

import numpy as np

from holder_lab.core.progress import ProgressReporter
from holder_lab.modules.almond.service import AlmondService
from holder_lab.modules.experiments.schemas import ExperimentSpec

from .base import ExperimentBase, ExperimentResult

_ALPHA_SWEEP = tuple(round(0.1 * i, 1) for i in range(1, 10))
_NEST_LEVEL = 14


class _AlmondExperiment(ExperimentBase):
    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.service = AlmondService(self.settings)


class KSolveExperiment(_AlmondExperiment):
    name = "k-solve"
    summary = "Cut ratio k(alpha) by bisection, residual and monotonicity in alpha."
    defaults = {"tol": 1e-12}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        tol = self.param(spec, "tol")
        report = self.new_report(spec)
        prm = self.service.params(spec.alpha, tol)
        report.add("k(alpha)", passed=0.0 < prm.k < 0.5, lower=prm.k, upper=prm.k)
        report.add("residual", passed=prm.residual <= tol, upper=prm.residual, tol=tol)
        if spec.alpha == 0.5:
            report.add(
                "k(1/2) = 4/9",
                passed=abs(prm.k - 4.0 / 9.0) <= tol,
                lower=prm.k,
                upper=prm.k,
                tol=tol,
                expected=4.0 / 9.0,
            )
        # the bottom node of stage 1 sits at 1 - k and realises the liminf slope from 0
        nodes = self.service.build(spec.alpha, 1).nodes
        direct = float(nodes.value[2]) / float(nodes.x[2]) ** spec.alpha
        report.add(
            "liminf slope = L(0, 1 - k)",
            passed=0.0 < prm.liminf_slope < 1.0 and abs(direct - prm.liminf_slope) <= 1e-12,
            lower=prm.liminf_slope,
            upper=prm.liminf_slope,
            tol=1e-12,
            direct=direct,
        )
        report.add("failure constant c", passed=prm.failure_c > 0.0, lower=prm.failure_c)

        ks = [self.service.solve_k(a, tol) for a in _ALPHA_SWEEP]
        report.add(
            "k increasing in alpha",
            passed=all(b > a for a, b in zip(ks, ks[1:], strict=False)),
            alphas=_ALPHA_SWEEP,
            ks=ks,
        )
        return ExperimentResult(report)


class AlmondBuildExperiment(_AlmondExperiment):
    name = "almond-build"
    summary = "Stages h_d: depth-1 nodes, nesting, node persistence, seminorm 1, gap decay."
    defaults = {"depth": 6, "norm_depth": 8, "gap_depth": 20, "tol": 1e-3}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        depth, norm_depth, gap_depth, tol = (
            self.param(spec, k) for k in ("depth", "norm_depth", "gap_depth", "tol")
        )
        report = self.new_report(spec)
        stages = [self.service.build(spec.alpha, d) for d in range(depth + 1)]
        k, ka = stages[0].k, stages[0].ka

        if depth >= 1:
            nodes = stages[1].nodes
            inner = (nodes.x > 0.0) & (nodes.x < 1.0)
            xs, vs = nodes.x[inner], nodes.value[inner]
            expected = np.array([k, 1.0 - k]), np.array([ka, 1.0 - ka])
            ok = xs.size == 2 and np.allclose(xs, expected[0], rtol=0, atol=1e-15) and np.allclose(
                vs, expected[1], rtol=0, atol=1e-15
            )
            report.add("depth-1 nodes", passed=bool(ok), x=xs, value=vs, top=nodes.top[inner])

        grid = np.arange(2**_NEST_LEVEL + 1) / 2.0**_NEST_LEVEL
        if reporter:
            reporter.start("build", total=depth, text=f"nesting on 2^-{_NEST_LEVEL}")
        worst = -np.inf
        for d in range(depth):
            lo0, hi0 = stages[d].lower(grid), stages[d].upper(grid)
            lo1, hi1 = stages[d + 1].lower(grid), stages[d + 1].upper(grid)
            chain = np.stack([lo0 - lo1, lo1 - hi1, hi1 - hi0])
            worst = max(worst, float(chain.max()))
            if reporter:
                reporter.update("build", 1)
        if reporter:
            reporter.end("build")
        if depth >= 1:
            report.add("lower_d <= lower_d+1 <= upper_d+1 <= upper_d", passed=worst <= 1e-12, upper=worst)

        persisted = True
        for d in range(min(depth, 7)):
            a, b = stages[d].nodes, stages[d + 1].nodes
            idx = np.searchsorted(b.x, a.x)
            idx = np.minimum(idx, len(b) - 1)
            persisted &= bool(np.all(b.x[idx] == a.x) and np.all(b.value[idx] == a.value))
        report.add("nodes persist", passed=persisted)

        if reporter:
            reporter.start("bound", total=2 * (norm_depth + 1), text="stage seminorms")
        for d in range(norm_depth + 1):
            stage = stages[d] if d <= depth else self.service.build(spec.alpha, d)
            for which in ("h", "h_tilde"):
                b = self.service.stage_seminorm(stage, which, tol)
                report.add(
                    f"L({which}_{d}) = 1",
                    passed=b.converged and b.encloses(1.0, atol=tol),
                    lower=b.lower,
                    upper=b.upper,
                    tol=tol,
                    converged=b.converged,
                )
                if reporter:
                    reporter.update("bound", 1)
        if reporter:
            reporter.end("bound")

        gaps = self.service.measured_gaps(spec.alpha, gap_depth)
        widest = [self.service.build(spec.alpha, d).max_gap for d in range(gap_depth + 1)]
        drift = max(abs(g - w) / w for g, w in zip(gaps, widest, strict=True))
        report.add(
            "sup |h_d - h~_d| decreasing",
            passed=all(b < a for a, b in zip(gaps, gaps[1:], strict=False)),
            upper=gaps[-1],
            gaps=gaps,
        )
        report.add(
            "measured gap = widest-leaf thickness",
            passed=drift <= 1e-9,
            upper=drift,
            tol=1e-9,
        )
        if spec.alpha == 0.5 and gap_depth >= 20:
            report.add(
                "sup |h_20 - h~_20| < 1e-3",
                passed=gaps[20] < 1e-3,
                upper=gaps[20],
                tol=1e-3,
            )
        return ExperimentResult(
            report, {"gap-decay": (np.arange(gap_depth + 1, dtype=float), np.asarray(gaps))}
        )


class AlmondLimsupExperiment(_AlmondExperiment):
    name = "almond-limsup"
    summary = "Node-pair slopes from a node over shrinking windows; limsup 1."
    defaults = {"depth": 12, "scales": 10, "x": 0.0}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        depth, scales, x = (self.param(spec, k) for k in ("depth", "scales", "x"))
        report = self.new_report(spec)
        stage = self.service.build(spec.alpha, depth)
        out = self.service.limsup_diagnostic(stage, x, scales)
        report.add(
            "running max -> 1",
            passed=out.estimate is not None and out.estimate >= 0.99,
            lower=out.estimate,
            upper=1.0,
            kind=out.kind,
            radii=out.radii,
            scale_max=out.scale_max,
            running_max=out.running_max,
        )
        return ExperimentResult(report)


class AlmondLiminfExperiment(_AlmondExperiment):
    name = "almond-liminf"
    summary = "Slopes from 0 at the minima s_j against (1 - k^a)/(1 - k)^a, lower envelope."
    defaults = {"depth": 12, "levels": 8}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        depth, levels = self.param(spec, "depth"), self.param(spec, "levels")
        report = self.new_report(spec)
        stage = self.service.build(spec.alpha, depth)
        out = self.service.liminf_diagnostic(stage, 0.0, levels)
        worst = max(out.deviations)
        report.add(
            "L(0, s_j) = liminf slope",
            passed=worst <= 1e-10,
            lower=min(out.slopes),
            upper=max(out.slopes),
            tol=1e-10,
            closed_form=out.closed_form,
            points=out.points,
        )
        report.add(
            "h_d >= liminf slope * x^a on (0, k]",
            passed=out.envelope_min is not None and out.envelope_min >= -1e-12,
            lower=out.envelope_min,
        )
        return ExperimentResult(
            report, {"liminf": (np.asarray(out.points), np.asarray(out.slopes))}
        )


class PolygonFailureExperiment(_AlmondExperiment):
    name = "polygon-failure"
    summary = "Interpolating polygons of h_d miss L(h - g) <= 1 by at least the constant c."
    defaults = {"depth": 12, "partitions": 20, "nodes": 8, "tol": 1e-6}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        depth, count, nodes, tol = (self.param(spec, k) for k in ("depth", "partitions", "nodes", "tol"))
        report = self.new_report(spec)
        rng = np.random.default_rng(spec.seed)
        partitions = [np.linspace(0.0, 1.0, 9)]
        for _ in range(count):
            x1 = 2.0 ** rng.uniform(-8.0, -2.0)
            rest = np.sort(rng.uniform(x1, 1.0, max(nodes - 3, 0)))
            partitions.append(np.unique(np.concatenate([[0.0, x1], rest, [1.0]])))
        if reporter:
            reporter.start("search", total=len(partitions), text="partitions")
        slopes = []
        for i, p in enumerate(partitions):
            cert = self.service.polygon_failure_certificate(spec.alpha, p, depth, tol)
            res = cert.results[-1]
            slopes.append(res.lower)
            report.add(
                f"partition {i}: L(h - g) >= 1 + c",
                passed=cert.passed,
                lower=res.lower,
                tol=tol,
                first_node=float(p[1]),
                checks={r.label: r.passed for r in cert.results},
                **res.witness,
            )
            if reporter:
                reporter.update("search", 1)
        if reporter:
            reporter.end("search")
        return ExperimentResult(report)


class AlmondFiguresExperiment(_AlmondExperiment):
    name = "almond-figures"
    summary = "Sampled (x, h_d, h~_d) series for d = 0..depth."
    defaults = {"depth": 3, "samples": 2049}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        depth, samples = self.param(spec, "depth"), self.param(spec, "samples")
        report = self.new_report(spec)
        series = {}
        for d in range(depth + 1):
            stage = self.service.build(spec.alpha, d)
            x, h, ht = self.service.almond_series(stage, samples)
            series[f"d{d}"] = (x, h, ht)
            at = np.isin(x, stage.nodes.x)
            off = float(np.max(np.abs(h[at] - stage.nodes.value) + np.abs(ht[at] - stage.nodes.value)))
            thickness = float(np.max(np.abs(h - ht)))
            report.add(
                f"stage {d}: arcs meet at the nodes",
                passed=off <= 1e-12 and thickness <= stage.max_gap + 1e-12,
                upper=thickness,
                tol=1e-12,
                node_error=off,
                points=int(x.size),
                nodes=len(stage.nodes),
            )
        return ExperimentResult(report, series)


EXPERIMENTS: tuple[type[ExperimentBase], ...] = (
    KSolveExperiment,
    AlmondBuildExperiment,
    AlmondLimsupExperiment,
    AlmondLiminfExperiment,
    PolygonFailureExperiment,
    AlmondFiguresExperiment,
)
