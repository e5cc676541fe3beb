# src/holder_lab/modules/experiments/strategies/approx.py
from __future__ import annotations

from collections.abc import Callable
from typing import Any

import numpy as np

from holder_lab.core.errors import InvalidParameter
from holder_lab.core.progress import ProgressReporter
from holder_lab.modules.approx.service import ApproxService
from holder_lab.modules.experiments.schemas import ExperimentSpec
from holder_lab.modules.holder.families import (
    identity,
    peak_arcs,
    power,
    random_arc_function,
    random_polygon,
    symmetric_two_arc,
    two_arc,
)
from holder_lab.modules.holder.piecewise import PiecewiseFn, Polygon

from .base import ExperimentBase, ExperimentResult

FAMILIES: dict[str, Callable[[float], PiecewiseFn]] = {
    "power": power,
    "two-arc": two_arc,
    "peak-arcs": peak_arcs,
    "symmetric-two-arc": symmetric_two_arc,
}


def named_function(name: str, alpha: float) -> PiecewiseFn:
    try:
        return FAMILIES[name](alpha)
    except KeyError:
        raise InvalidParameter(
            f"unknown function {name!r}; choose from {', '.join(FAMILIES)}"
        ) from None


class _ApproxExperiment(ExperimentBase):
    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.service = ApproxService(self.settings)
        self.holder = self.service.holder

    def freeze_width(self, h: PiecewiseFn, eps_p: float, delta_p: float) -> tuple[list[float], float]:
        """Criticals and a half-width with n * omega_h(2 delta) <= eps' delta' / 2."""
        pts = sorted({0.0, 1.0, *self.holder.critical_set(h)})
        lip = max(self.holder.seminorm(h).upper, 1e-300)
        gap = min(b - a for a, b in zip(pts, pts[1:], strict=False))
        delta = 0.5 * (eps_p * delta_p / (2.0 * len(pts) * lip)) ** (1.0 / h.alpha)
        return pts, min(delta, 0.249 * gap)


class InsertedConstantsExperiment(_ApproxExperiment):
    name = "inserted-constants"
    summary = "g frozen around the critical points: the five pair configurations and the band bound."
    defaults = {"function": "power", "delta": 1e-3, "tol": 1e-3}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        fname, delta, tol = (self.param(spec, k) for k in ("function", "delta", "tol"))
        report = self.new_report(spec)
        h = named_function(fname, spec.alpha)
        pts = self.holder.critical_set(h)
        plan = self.service.plan_inserted_constants(h, pts, delta)
        g = self.service.apply_plan(h, plan)
        report.add(
            "g based and frozen",
            passed=g.based and all(c not in self.holder.critical_set(g) for c in plan.criticals),
            criticals=plan.criticals,
            jumps=plan.delta_jumps,
        )
        check = self.service.five_case_check(h, g, plan, tol)
        for case in check.cases:
            report.add(
                f"case {case.case}",
                passed=case.passed,
                upper=case.max_slope,
                tol=tol,
                pairs=case.pairs,
                max_excess=case.max_excess,
            )
        report.add(
            "band L(h - g) on |x - y| < D <= L(h)",
            passed=check.passed,
            lower=check.band.lower,
            upper=check.band.upper,
            tol=tol,
            reference=check.reference.upper,
            gap=check.gap,
            unclassified=check.unclassified,
        )
        return ExperimentResult(report)


class KPBoundExperiment(_ApproxExperiment):
    name = "kp-bound"
    summary = "Interpolating polygons never increase the seminorm, cell by cell."
    defaults = {"trials": 50, "nodes": 9, "tol": 1e-6}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        trials, nodes, tol = (self.param(spec, k) for k in ("trials", "nodes", "tol"))
        report = self.new_report(spec)
        rng = np.random.default_rng(spec.seed)
        if reporter:
            reporter.start("bound", total=trials, text="(h, P) pairs")
        for i in range(trials):
            h = (
                random_polygon(spec.alpha, rng, nodes=int(rng.integers(3, 10)))
                if i % 2
                else random_arc_function(spec.alpha, rng, pieces=int(rng.integers(2, 6)))
            )
            part = np.unique(np.concatenate([[0.0, 1.0], rng.uniform(0.0, 1.0, nodes - 2)]))
            p = self.service.kp_interpolate(h, part)
            lp, lh = self.holder.seminorm(p, tol), self.holder.seminorm(h, tol)
            bad = self.service.kp_cell_violations(h, p, part)
            report.add(
                f"trial {i}",
                passed=lp.upper <= lh.upper + tol and bad == 0,
                lower=lp.lower,
                upper=lp.upper,
                tol=tol,
                reference=lh.upper,
                cell_violations=bad,
            )
            if reporter:
                reporter.update("bound", 1)
        if reporter:
            reporter.end("bound")
        return ExperimentResult(report)


class DenseApproxExperiment(_ApproxExperiment):
    name = "dense-approx"
    summary = "Polygon f with certified L_xy(h - f) <= eps on every distance band down to delta_depth."
    defaults = {"function": "power", "eps": 0.1, "depth": 6}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        fname, eps, depth = (self.param(spec, k) for k in ("function", "eps", "depth"))
        report = self.new_report(spec)
        h = named_function(fname, spec.alpha)
        f, out = self.service.dense_polygon_approx(h, eps, depth, reporter=reporter)
        report.add(
            "sup |h - f|",
            passed=out.sup.converged,
            lower=out.sup.lower,
            upper=out.sup.upper,
            tol=out.sup.tol,
            nodes=out.nodes,
        )
        for band in out.bands:
            report.add(
                f"band [{band.d_lo:.6g}, {band.d_hi:.6g}]",
                passed=band.passed,
                lower=band.bound.lower,
                upper=band.bound.upper,
                tol=band.bound.tol,
                resolved=band.resolved,
            )
        xs, ys = f.nodes
        return ExperimentResult(report, {"polygon": (xs, ys, h.evaluate(xs))})


class Lemma3BExperiment(_ApproxExperiment):
    name = "lemma-3b"
    summary = "(3B1) sup |h - g| <= eps' delta' and (3B2) local slopes <= 1 + eps' for inserted constants."
    defaults = {"function": "power", "eps_prime": 0.2, "delta_prime": 0.1}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        fname, eps_p, delta_p = (self.param(spec, k) for k in ("function", "eps_prime", "delta_prime"))
        h = named_function(fname, spec.alpha)
        pts, delta = self.freeze_width(h, eps_p, delta_p)
        g = self.service.inserted_constants(h, pts, delta)
        report = self.service.verify_3b(h, g, eps_p, delta_p)
        report.parameters = dict(sorted({**self.new_report(spec).parameters, "delta": delta}.items()))
        report.seed = spec.seed
        return ExperimentResult(report)


class ThreeBallExperiment(_ApproxExperiment):
    name = "three-ball"
    summary = "g with L(h + f_i - g) <= 1 + eps for f = x, -x, 0."
    defaults = {"function": "power", "eps": 0.2}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        fname, eps = self.param(spec, "function"), self.param(spec, "eps")
        report = self.new_report(spec)
        h = named_function(fname, spec.alpha)
        x = identity(spec.alpha)
        zero = Polygon.from_nodes(spec.alpha, [0.0, 1.0], [0.0, 0.0])
        w = self.service.three_ball_witness(h, x, -x, zero, eps)
        for label, b in zip(("f1 = x", "f2 = -x", "f3 = 0"), w.per_ball_norms, strict=True):
            report.add(
                f"L(h + {label[:2]} - g) <= 1 + eps ({label})",
                passed=b.upper <= 1.0 + eps,
                lower=b.lower,
                upper=b.upper,
                tol=b.tol,
                converged=b.converged,
            )
        report.add("witness", passed=w.passed, delta_prime=w.delta_prime, delta=w.delta)
        return ExperimentResult(report)


class NoMSummandExperiment(_ApproxExperiment):
    name = "no-msummand"
    summary = "Every polygon g violates L(h + f_i - g) <= 1 for h = x^a, f = x, -x."
    defaults = {"family": "polygon-grid", "max_candidates": 2000}

    def run(self, spec: ExperimentSpec, reporter: ProgressReporter | None = None) -> ExperimentResult:
        family, budget = self.param(spec, "family"), self.param(spec, "max_candidates")
        if family != "polygon-grid":
            raise InvalidParameter(f"unknown family {family!r}; only 'polygon-grid' is built in")
        report = self.new_report(spec)
        anchor = self.service.msummand_certificate(identity(spec.alpha))
        expected = 1.0 / (1.0 - anchor.x_tilde) ** spec.alpha if anchor.x_tilde is not None else None
        report.add(
            "g = x: witness slope",
            passed=anchor.kind == "witness" and anchor.violated,
            lower=anchor.slope_value,
            upper=anchor.slope_value,
            x_tilde=anchor.x_tilde,
            expected=expected,
        )
        out, _ = self.service.msummand_search(spec.alpha, budget, spec.seed, reporter=reporter)
        report.add(
            "all candidates violated",
            passed=out.all_violated,
            lower=out.min_witness_slope,
            candidates=out.candidates,
            by_kind=out.by_kind,
            by_node_count=out.by_node_count,
            worst_nodes=out.worst_nodes,
        )
        return ExperimentResult(report)


EXPERIMENTS: tuple[type[ExperimentBase], ...] = (
    InsertedConstantsExperiment,
    KPBoundExperiment,
    DenseApproxExperiment,
    Lemma3BExperiment,
    ThreeBallExperiment,
    NoMSummandExperiment,
)
