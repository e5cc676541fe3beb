# src/holder_lab/modules/holder/service.py
from __future__ import annotations

import bisect
import math
from typing import Any

import numpy as np
import pybnb

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.errors import InvalidParameter
from holder_lab.core.logging import get_logger

from .bounds import BoxTree, PairSlopeProblem, SupNormProblem, breakpoint_sup
from .piecewise import PiecewiseFn
from .schemas import CertifiedBound, CriticalPoint

log = get_logger(__name__)

# all breakpoint pairs are scored below this many breakpoints, a sample above
_EXHAUSTIVE_POINTS = 256
_SAMPLE_SEED = 20240601


class HolderService:
    """Slopes, certified norms and critical points of exact functions."""

    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or get_settings()

    # ---- public API ----------------------------------------------------------
    @staticmethod
    def slope(f: PiecewiseFn, x: float, y: float) -> float:
        return f.slope(x, y)

    def seminorm(self, f: PiecewiseFn, tol: float | None = None) -> CertifiedBound:
        """Encloses L(f) = sup_{x != y} |f(x) - f(y)| / |x - y|^alpha."""
        return self.band_slope(f, 0.0, 1.0, tol)

    def band_slope(
        self, f: PiecewiseFn, d_lo: float, d_hi: float, tol: float | None = None
    ) -> CertifiedBound:
        """Encloses sup of slope(f, x, y) over d_lo <= |x - y| <= d_hi."""
        tol = self._check_tol(tol)
        if not 0.0 <= d_lo < d_hi <= 1.0:
            raise InvalidParameter(
                f"empty band: need 0 <= d_lo < d_hi <= 1, got [{d_lo}, {d_hi}]"
            )
        lower0, witness0 = self._sampled_lower(f, d_lo, d_hi)
        tree = BoxTree(f, d_hi=d_hi, min_width=self.settings.BNB_MIN_WIDTH)
        problem = PairSlopeProblem(tree, d_lo=d_lo)
        return self._pair_search(problem, lower0, witness0, tol, f"band slope [{d_lo:g}, {d_hi:g}]")

    def cross_slope(
        self,
        f: PiecewiseFn,
        left: tuple[float, float],
        right: tuple[float, float],
        tol: float | None = None,
    ) -> CertifiedBound:
        """
        Encloses sup of slope(f, x, y) over x in `left`, y in `right`. Both
        ranges are runs of whole segments and `left` ends before `right` starts.
        """
        tol = self._check_tol(tol)
        i0, i1 = _segment_run(f, *left)
        j0, j1 = _segment_run(f, *right)
        if i1 > j0:
            raise InvalidParameter(f"ranges {left} and {right} overlap or are out of order")
        tree = BoxTree(f, min_width=self.settings.BNB_MIN_WIDTH)
        problem = PairSlopeProblem(tree, start=(tree.run(i0, i1), tree.run(j0, j1)))
        bps = np.asarray(f.breakpoints)
        lower0, witness0 = self._grid_lower(f, bps[i0 : i1 + 1], bps[j0 : j1 + 1])
        return self._pair_search(problem, lower0, witness0, tol, f"cross slope {left} x {right}")

    def sup_norm(self, f: PiecewiseFn, tol: float | None = None) -> CertifiedBound:
        """Encloses ||f||_inf; single-term segments are exact at their endpoints."""
        tol = self._check_tol(tol)
        slack = self.settings.BOUND_SLACK
        lower0, arg0 = breakpoint_sup(f)
        problem = SupNormProblem(BoxTree(f, min_width=self.settings.BNB_MIN_WIDTH))
        problem.best, problem.argmax = lower0, arg0
        results = self._solve(problem, lower0, tol - slack)

        lower = problem.best
        raw_upper = max(_finite_or(results.bound, lower), problem.stuck, lower)
        converged = raw_upper - lower <= tol - slack
        if not converged:
            log.warning("sup norm not converged: [%.12g, %.12g]", lower, raw_upper)
        x = problem.argmax
        return CertifiedBound(
            lower=lower,
            upper=raw_upper + slack,
            tol=tol,
            converged=converged,
            witness=None if x is None else (x, x),
            nodes=int(results.nodes),
        )

    def lipschitz_norm(self, f: PiecewiseFn, tol: float | None = None) -> CertifiedBound:
        """||f||_L = max(||f||_inf, L(f))."""
        sup, lip = self.sup_norm(f, tol), self.seminorm(f, tol)
        top = sup if sup.lower >= lip.lower else lip
        return CertifiedBound(
            lower=max(sup.lower, lip.lower),
            upper=max(sup.upper, lip.upper),
            tol=sup.tol,
            converged=sup.converged and lip.converged,
            witness=top.witness,
            nodes=sup.nodes + lip.nodes,
        )

    @staticmethod
    def critical_points(f: PiecewiseFn) -> list[CriticalPoint]:
        """
        A point is critical iff a nonzero arc is anchored there at a segment
        end; every other breakpoint is listed as noncritical.
        """
        crit: dict[float, float] = {}
        for seg in f.segments:
            for t in seg.anchored_arcs():
                crit[t.anchor] = max(crit.get(t.anchor, 0.0), abs(t.coeff))
        points = sorted(set(f.breakpoints) | set(crit))
        return [
            CriticalPoint(
                x=p,
                classification="critical" if p in crit else "noncritical",
                coefficient=crit.get(p, 0.0),
            )
            for p in points
        ]

    def critical_set(self, f: PiecewiseFn) -> list[float]:
        return [c.x for c in self.critical_points(f) if c.critical]

    # ---- helpers -------------------------------------------------------------
    def _check_tol(self, tol: float | None) -> float:
        tol = self.settings.DEFAULT_TOL if tol is None else float(tol)
        if not tol > 0.0:
            raise InvalidParameter(f"tol must be positive, got {tol!r}")
        if tol <= self.settings.BOUND_SLACK:
            raise InvalidParameter(
                f"tol={tol!r} must exceed the bound slack {self.settings.BOUND_SLACK!r}"
            )
        return tol

    def _solve(self, problem: pybnb.Problem, best: float, gap: float) -> Any:
        solver = pybnb.Solver(comm=None)
        return solver.solve(
            problem,
            best_objective=best if math.isfinite(best) else None,
            absolute_gap=gap,
            node_limit=self.settings.BNB_MAX_ITERATIONS,
            queue_strategy="bound",
            log=None,
            disable_signal_handlers=True,
        )

    def _pair_search(
        self,
        problem: PairSlopeProblem,
        lower0: float,
        witness0: tuple[float, float] | None,
        tol: float,
        label: str,
    ) -> CertifiedBound:
        slack = self.settings.BOUND_SLACK
        problem.best, problem.witness = lower0, witness0
        results = self._solve(problem, lower0, tol - slack)

        lower = problem.best
        raw_upper = max(_finite_or(results.bound, lower), problem.stuck, lower)
        converged = raw_upper - lower <= tol - slack
        if not converged:
            log.warning(
                "%s not converged after %d nodes: [%.12g, %.12g]",
                label,
                results.nodes,
                lower,
                raw_upper,
            )
        log.debug("%s: [%.12g, %.12g] in %d nodes", label, lower, raw_upper, results.nodes)
        return CertifiedBound(
            lower=lower,
            upper=raw_upper + slack,
            tol=tol,
            converged=converged,
            witness=problem.witness,
            nodes=int(results.nodes),
        )

    @staticmethod
    def _grid_lower(
        f: PiecewiseFn, xs: np.ndarray, ys: np.ndarray
    ) -> tuple[float, tuple[float, float] | None]:
        """Best slope over xs x ys, thinned to _EXHAUSTIVE_POINTS per side."""
        rng = np.random.default_rng(_SAMPLE_SEED)
        keep = []
        for pts in (xs, ys):
            if pts.size > _EXHAUSTIVE_POINTS:
                inner = rng.choice(pts[1:-1], _EXHAUSTIVE_POINTS - 2, replace=False)
                pts = np.unique(np.concatenate([pts[:1], inner, pts[-1:]]))
            keep.append(pts)
        gx, gy = np.meshgrid(*keep, indexing="ij")
        gx, gy = gx.ravel(), gy.ravel()
        ok = gy > gx
        if not bool(np.any(ok)):
            return -math.inf, None
        gx, gy = gx[ok], gy[ok]
        vals = f.slopes(gx, gy)
        k = int(np.nanargmax(vals))
        return float(vals[k]), (float(gx[k]), float(gy[k]))

    def _sampled_lower(
        self, f: PiecewiseFn, d_lo: float, d_hi: float
    ) -> tuple[float, tuple[float, float] | None]:
        """Best slope over breakpoint pairs (or a seeded sample) inside the band."""
        pts = np.unique(np.asarray(f.breakpoints))
        rng = np.random.default_rng(_SAMPLE_SEED)
        if pts.size <= _EXHAUSTIVE_POINTS:
            i, j = np.triu_indices(pts.size, k=1)
            xs, ys = pts[i], pts[j]
        else:
            n = self.settings.SAMPLE_PAIRS
            pool = np.concatenate([pts, rng.random(pts.size)])
            xs, ys = rng.choice(pool, n), rng.choice(pool, n)
            pts = rng.choice(pts, min(pts.size, 4 * _EXHAUSTIVE_POINTS), replace=False)

        # pairs pushed to the band edges
        edge_x = [pts, np.maximum(pts - d_hi, 0.0)]
        edge_y = [np.minimum(pts + d_hi, 1.0), pts]
        if d_lo > 0.0:
            edge_x.append(pts)
            edge_y.append(np.minimum(pts + d_lo, 1.0))
        xs = np.concatenate([xs, *edge_x])
        ys = np.concatenate([ys, *edge_y])

        d = np.abs(ys - xs)
        keep = (d > 0.0) & (d >= d_lo) & (d <= d_hi)
        if not bool(np.any(keep)):
            return -math.inf, None
        xs, ys = xs[keep], ys[keep]
        vals = f.slopes(xs, ys)
        k = int(np.nanargmax(vals))
        pair = (float(min(xs[k], ys[k])), float(max(xs[k], ys[k])))
        return float(vals[k]), pair


def _segment_run(f: PiecewiseFn, u: float, v: float) -> tuple[int, int]:
    """Indices [i0, i1) of the segments tiling [u, v]; u and v must be breakpoints."""
    bps = f.breakpoints
    i0, i1 = bisect.bisect_left(bps, u), bisect.bisect_left(bps, v)
    if i0 >= len(bps) or bps[i0] != u or i1 >= len(bps) or bps[i1] != v or i0 >= i1:
        raise InvalidParameter(f"[{u}, {v}] is not a run of whole segments")
    return i0, i1


def _finite_or(value: float | None, fallback: float) -> float:
    if value is None or math.isnan(value):
        return fallback
    return float(value)
