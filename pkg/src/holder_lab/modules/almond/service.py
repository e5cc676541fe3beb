# src/holder_lab/modules/almond/service.py
from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.errors import (
    BudgetExhausted,
    InsufficientDepth,
    InvalidParameter,
    RootIsolationError,
)
from holder_lab.core.logging import get_logger
from holder_lab.core.report import CertificateReport
from holder_lab.core.workers import get_worker_count
from holder_lab.modules.approx.service import ApproxService
from holder_lab.modules.holder.bounds import Box, BoxTree
from holder_lab.modules.holder.piecewise import CONTINUITY_TOL, PiecewiseFn, check_alpha
from holder_lab.modules.holder.schemas import CertifiedBound

from .construction import AlmondStage, Which
from .schemas import AlmondParams, LiminfReport, LimsupReport

log = get_logger(__name__)

# grid points per scan when isolating the first crossing of h and g
_SCAN_POINTS = 1025
_ENVELOPE_POINTS = 4096


def ratio_residual(y: float, alpha: float) -> float:
    """2y^a - 1 - (1 - 2y)^a; increasing on (0, 1/2) from -2 to 2^(1-a) - 1."""
    return 2.0 * y**alpha - 1.0 - (1.0 - 2.0 * y) ** alpha


class AlmondService:
    """Cut ratio, almond stages and the slope certificates around them."""

    def __init__(
        self, settings: Settings | None = None, approx: ApproxService | None = None
    ) -> None:
        self.settings = settings or get_settings()
        self.approx = approx or ApproxService(self.settings)
        self.workers = self.settings.WORKERS or get_worker_count()

    # ---- ratio ---------------------------------------------------------------
    @staticmethod
    def solve_k(alpha: float, tol: float = 1e-12) -> float:
        alpha = check_alpha(alpha)
        if not tol > 0.0:
            raise InvalidParameter(f"tol must be positive, got {tol!r}")
        lo, hi = 0.0, 0.5
        while True:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if ratio_residual(mid, alpha) < 0.0:
                lo = mid
            else:
                hi = mid
        k = lo if abs(ratio_residual(lo, alpha)) <= abs(ratio_residual(hi, alpha)) else hi
        res = abs(ratio_residual(k, alpha))
        if res > tol:
            raise RootIsolationError(f"k({alpha}) residual {res:.3g} above tol {tol:.3g}")
        return k

    def params(self, alpha: float, tol: float = 1e-12) -> AlmondParams:
        k = self.solve_k(alpha, tol)
        ka = k**alpha
        return AlmondParams(
            alpha=alpha,
            k=k,
            residual=abs(ratio_residual(k, alpha)),
            liminf_slope=(1.0 - ka) / (1.0 - k) ** alpha,
            failure_c=(1.0 - ka) * (k * (1.0 - 2.0 * k)) ** (1.0 - alpha) / (1.0 - k),
        )

    # ---- construction --------------------------------------------------------
    def build(self, alpha: float, depth: int) -> AlmondStage:
        if depth < 0:
            raise InvalidParameter(f"depth must be >= 0, got {depth}")
        segments = 2 * 3**depth
        if segments > self.settings.ALMOND_SEGMENT_BUDGET:
            log.warning("almond depth %d needs %d segments", depth, segments)
            raise BudgetExhausted(
                f"depth {depth} needs {segments} segments "
                f"(budget {self.settings.ALMOND_SEGMENT_BUDGET})"
            )
        stage = AlmondStage(alpha, self.solve_k(alpha), depth, workers=self.workers)
        log.debug("built %r", stage)
        return stage

    def materialize(self, stage: AlmondStage, which: Which = "h") -> PiecewiseFn:
        return stage.materialize(which, budget=self.settings.MATERIALIZE_BUDGET)

    @staticmethod
    def almond_series(
        stage: AlmondStage, samples: int = 2049
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """(x, h_d(x), h_tilde_d(x)) on a uniform grid merged with the stage's nodes."""
        if samples < 2:
            raise InvalidParameter("almond series need at least two samples")
        x = np.unique(np.concatenate([np.linspace(0.0, 1.0, samples), stage.nodes.x]))
        return x, stage.h(x), stage.h_tilde(x)

    def stage_seminorm(
        self, stage: AlmondStage, which: Which = "h", tol: float | None = None
    ) -> CertifiedBound:
        """
        Encloses L(h_d) or L(h_tilde_d) level by level. The three children of
        the root almond carry affine copies of stage d - 1 (the middle one
        flipped), so L at stage j is the max of L at stage j - 1 and the
        slopes of pairs split between two children. Pairs across the top or
        bottom node go through that node when it is the strict max or min of
        both neighbours; pairs between the outer children are searched.
        """
        if which not in ("h", "h_tilde"):
            raise InvalidParameter(f"stage seminorms cover h and h_tilde, got {which!r}")
        holder = self.approx.holder
        tol = self.settings.DEFAULT_TOL if tol is None else tol

        base = holder.seminorm(self._stage_fn(stage, 0, which), tol)
        lower, upper = base.lower, base.upper
        converged, nodes, witness = base.converged, base.nodes, base.witness
        for j in range(1, stage.depth + 1):
            f = self._stage_fn(stage, j, which)
            n = len(f.segments) // 3
            bps = f.breakpoints
            tree = BoxTree(f, min_width=self.settings.BNB_MIN_WIDTH)
            left, mid, right = tree.run(0, n), tree.run(n, 2 * n), tree.run(2 * n, 3 * n)
            for i, (a, b) in ((n, (left, mid)), (2 * n, (mid, right))):
                if not _through_node(f, i, a, b):
                    log.warning("stage %d: node %g is not an extremum, searching pairs", j, bps[i])
                    across = holder.cross_slope(f, (bps[i - n], bps[i]), (bps[i], bps[i + n]), tol)
                    upper = max(upper, across.upper)
                    lower = max(lower, across.lower)
                    converged &= across.converged
                    nodes += across.nodes
            outer = holder.cross_slope(f, (0.0, bps[n]), (bps[2 * n], 1.0), tol)
            upper = max(upper, outer.upper)
            lower = max(lower, outer.lower)
            converged &= outer.converged
            nodes += outer.nodes
            witness = outer.witness
        log.debug("L(%s_%d) in [%.12g, %.12g]", which, stage.depth, lower, upper)
        return CertifiedBound(
            lower=lower,
            upper=upper,
            tol=tol,
            converged=converged and upper - lower <= tol,
            witness=witness,
            nodes=nodes,
        )

    def measured_gaps(self, alpha: float, depth: int, samples: int = 4097) -> list[float]:
        """AlmondStage.measured_gap for d = 0..depth."""
        return [self.build(alpha, d).measured_gap(samples) for d in range(depth + 1)]

    # ---- diagnostics ---------------------------------------------------------
    def limsup_diagnostic(self, stage: AlmondStage, x: float, scales: int) -> LimsupReport:
        """
        Slopes from node x to opposite-kind nodes y, grouped by scale j = 1..scales:
        scale_max[j] is the max over k^j < |y - x| <= k^(j-1) and running_max[j]
        the max over 0 < |y - x| <= k^(j-1), which is non-increasing in j. The
        slopes are capped by 1 and reach it on every scale the stage resolves.
        """
        if scales < 1 or scales > stage.depth + 1:
            raise InvalidParameter(f"scales must be in 1..{stage.depth + 1}, got {scales}")
        nodes = stage.nodes
        hit = np.flatnonzero(nodes.x == x)
        if hit.size == 0:
            raise InvalidParameter(f"{x!r} is not a recorded node at depth {stage.depth}")
        i = int(hit[0])
        vx, top = float(nodes.value[i]), bool(nodes.top[i])

        other = (nodes.top != top) & (nodes.x != x)
        dist = np.abs(nodes.x[other] - x)
        slopes = np.abs(nodes.value[other] - vx) / dist**stage.alpha
        radii = [stage.k ** (j - 1) for j in range(1, scales + 2)]
        per_scale: list[float | None] = []
        running: list[float | None] = []
        for j in range(scales):
            outer, inner = radii[j], radii[j + 1]
            ring = (dist <= outer) & (dist > inner)
            ball = dist <= outer
            per_scale.append(float(slopes[ring].max()) if bool(ring.any()) else None)
            running.append(float(slopes[ball].max()) if bool(ball.any()) else None)
        resolved = [m for m in running if m is not None]
        return LimsupReport(
            x=x,
            kind="top" if top else "bottom",
            depth=stage.depth,
            radii=radii[:scales],
            scale_max=per_scale,
            running_max=running,
            estimate=resolved[-1] if resolved else None,
        )

    def liminf_diagnostic(
        self, stage: AlmondStage, x: float = 0.0, levels: int | None = None
    ) -> LiminfReport:
        """L_{0,s_j}(h) at the minima s_j = (1 - k) k^j, j = 1..levels, against the closed form."""
        if x != 0.0:
            raise InvalidParameter("the liminf diagnostic runs at the node 0")
        levels = stage.depth - 1 if levels is None else levels
        if levels < 1:
            raise InsufficientDepth("liminf needs at least one resolved minimum", needed_depth=2)
        if levels + 1 > stage.depth:
            raise InsufficientDepth(
                f"minimum s_{levels} is recorded from depth {levels + 1} on",
                needed_depth=levels + 1,
            )
        a = stage.alpha
        closed = (1.0 - stage.ka) / (1.0 - stage.k) ** a
        chain = stage.left_chain(levels + 1)[1:]
        points = [s for _, _, s, _ in chain]
        slopes = [hs / s**a for _, _, s, hs in chain]

        grid = stage.k * np.arange(1, _ENVELOPE_POINTS + 1) / _ENVELOPE_POINTS
        envelope = float(np.min(stage.h(grid) - closed * grid**a))
        return LiminfReport(
            depth=stage.depth,
            closed_form=closed,
            points=points,
            slopes=slopes,
            deviations=[abs(s - closed) for s in slopes],
            envelope_min=envelope,
        )

    # ---- certificates --------------------------------------------------------
    def polygon_failure_certificate(
        self, alpha: float, partition: ArrayLike, depth: int, tol: float = 1e-6
    ) -> CertificateReport:
        """
        g = polygon interpolating h_d on the partition. Below its first node g
        is linear with slope m, so on the almond scale t around the first
        crossing x_tilde the falling arc from r' = k^2 t to s' = (1 - k) k t
        gives L_{r's'}(h - g) = 1 + m (s' - r')^(1-a) >= 1 + c.
        """
        prm = self.params(alpha)
        stage = self.build(alpha, depth)
        h = stage.function("h")
        g = self.approx.kp_interpolate(h, partition)
        k, a = prm.k, prm.alpha
        x1 = float(g.breakpoints[1])
        m = float(g.eval(x1)) / x1
        if not m > 0.0:
            raise InvalidParameter(f"g is not increasing on [0, {x1}]")

        x_tilde = self._first_crossing(stage, g, x1, m, prm.liminf_slope)
        i = max(0, math.floor(math.log(x_tilde) / math.log(k)))
        while i > 0 and k**i < x_tilde:
            i -= 1
        while k ** (i + 1) > x_tilde:
            i += 1
        if stage.depth < i + 2:
            raise InsufficientDepth(
                f"x_tilde={x_tilde:.6g} sits on scale k^{i}; depth {stage.depth} does not resolve it",
                needed_depth=i + 2,
            )
        chain = stage.left_chain(i + 3)
        t = chain[i][0]
        r_p, h_rp = chain[i + 2][0], chain[i + 2][1]
        s_p, h_sp = chain[i + 1][2], chain[i + 1][3]
        width = s_p - r_p
        diff_r = h_rp - float(g.eval(r_p))
        diff_s = h_sp - float(g.eval(s_p))
        witness = abs(diff_s - diff_r) / width**a
        h_slope = abs(h_sp - h_rp) / width**a
        steep = (1.0 - k**a) / (1.0 - k) * t ** (a - 1.0)

        report = CertificateReport(
            experiment="polygon-failure",
            alpha=a,
            parameters={"depth": depth, "first_node": x1, "nodes": len(g.breakpoints)},
        )
        report.add(
            "crossing h(x~) = g(x~)",
            passed=abs(float(h(x_tilde)) - float(g.eval(x_tilde))) <= tol,
            lower=x_tilde,
            upper=x_tilde,
            tol=tol,
            scale=t,
            index=i,
        )
        report.add(
            "slope of h on (r', s') = 1",
            passed=abs(h_slope - 1.0) <= 1e-10,
            lower=h_slope,
            upper=h_slope,
            tol=1e-10,
            r_prime=r_p,
            s_prime=s_p,
        )
        report.add(
            "steepness of g below x1",
            passed=m >= steep - tol,
            lower=m,
            bound=steep,
        )
        report.add(
            "L_{r's'}(h - g) >= 1 + c",
            passed=witness >= 1.0 + prm.failure_c - tol,
            lower=witness,
            upper=witness,
            tol=tol,
            c=prm.failure_c,
            r_prime=r_p,
            s_prime=s_p,
        )
        log.debug("polygon failure: x~=%g t=%g witness=%.12g", x_tilde, t, witness)
        return report

    # ---- helpers -------------------------------------------------------------
    @staticmethod
    def _first_crossing(
        stage: AlmondStage, g: PiecewiseFn, x1: float, m: float, envelope: float
    ) -> float:
        """First zero of h - g in (0, x1]; h >= envelope x^a keeps it above (envelope/m)^(1/(1-a))."""
        a = stage.alpha
        x_lo = min(x1, (envelope / m) ** (1.0 / (1.0 - a)))
        grid = np.linspace(x_lo, x1, _SCAN_POINTS)
        diff = stage.h(grid) - m * grid
        below = np.flatnonzero(diff <= 0.0)
        j = int(below[0]) if below.size else grid.size - 1
        if j == 0:
            return float(grid[0])
        lo, hi = float(grid[j - 1]), float(grid[j])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if float(stage.h(mid)) - m * mid > 0.0:
                lo = mid
            else:
                hi = mid
        return hi

    def _stage_fn(self, stage: AlmondStage, depth: int, which: Which) -> PiecewiseFn:
        sub = AlmondStage(stage.alpha, stage.k, depth, workers=self.workers)
        return sub.materialize(which, budget=self.settings.MATERIALIZE_BUDGET)


def _through_node(f: PiecewiseFn, i: int, left: Box, right: Box) -> bool:
    """
    True when breakpoint i is the max (or min) of f over both boxes, up to
    the continuity tolerance; then every pair across it has a slope at most
    the larger slope inside the two boxes.
    """
    z = f.breakpoints[i]
    vals = (f.segments[i - 1].value(z, f.alpha), f.segments[i].value(z, f.alpha))
    eta = CONTINUITY_TOL * max(1.0, *(abs(v) for v in vals))
    top = max(left.hi, right.hi) - min(vals) <= eta
    bottom = max(vals) - min(left.lo, right.lo) <= eta
    return top or bottom
