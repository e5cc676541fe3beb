# src/holder_lab/modules/approx/service.py
from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import ArrayLike, NDArray

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.errors import BudgetExhausted, InvalidParameter, RootIsolationError
from holder_lab.core.logging import get_logger
from holder_lab.core.progress import ProgressReporter
from holder_lab.core.report import CertificateReport
from holder_lab.core.workers import get_worker_count
from holder_lab.modules.holder.piecewise import (
    HolderFunction,
    PiecewiseFn,
    Polygon,
    Segment,
    check_alpha,
    from_segments,
)
from holder_lab.modules.holder.schemas import CertifiedBound
from holder_lab.modules.holder.service import HolderService

from .schemas import (
    BandCheck,
    CaseStat,
    DenseApproxReport,
    FiveCaseReport,
    InsertedConstantsPlan,
    MSummandSearchReport,
    ThreeBallWitness,
    ViolationWitness,
)

log = get_logger(__name__)

_SAMPLE_SEED = 20240602
# mesh nodes allowed in one dense approximation
_MESH_BUDGET = 1 << 20
# node values of the M-summand family live on this grid inside [-1, 2]
_GRID_STEPS = 16
_GRID_RANGE = (-16, 32)


class ApproxService:
    """Approximation operators and the certificates built on them."""

    def __init__(
        self, settings: Settings | None = None, holder: HolderService | None = None
    ) -> None:
        self.settings = settings or get_settings()
        self.holder = holder or HolderService(self.settings)
        self.workers = self.settings.WORKERS or get_worker_count()

    # ---- inserted constants --------------------------------------------------
    def plan_inserted_constants(
        self, h: PiecewiseFn, criticals: Sequence[float], delta: float
    ) -> InsertedConstantsPlan:
        if not delta > 0.0:
            raise InvalidParameter(f"delta must be positive, got {delta!r}")
        if not h.based:
            raise InvalidParameter("inserted constants need a based h (h(0) = 0)")
        pts = sorted({0.0, 1.0, *(float(c) for c in criticals)})
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise InvalidParameter("critical points must lie in [0, 1]")
        missing = [c for c in self.holder.critical_set(h) if c not in pts]
        if missing:
            raise InvalidParameter(f"critical points of h missing from the list: {missing}")
        gap = min(b - a for a, b in zip(pts, pts[1:], strict=False))
        if gap <= 2.0 * delta:
            raise InvalidParameter(
                f"frozen intervals overlap: delta={delta!r} needs critical gaps > {2 * delta!r}, "
                f"smallest gap is {gap!r}"
            )
        jumps = [_clamped(h, x - delta) - _clamped(h, x + delta) for x in pts]
        return InsertedConstantsPlan(criticals=pts, delta=delta, delta_jumps=jumps)

    def inserted_constants(
        self, h: PiecewiseFn, criticals: Sequence[float], delta: float
    ) -> PiecewiseFn:
        """g: constant on [x_k - delta, x_k + delta], h plus the accumulated jumps between."""
        return self.apply_plan(h, self.plan_inserted_constants(h, criticals, delta))

    @staticmethod
    def apply_plan(h: PiecewiseFn, plan: InsertedConstantsPlan) -> PiecewiseFn:
        xs, dl = plan.criticals, plan.delta
        segs: list[Segment] = []
        carried = 0.0
        for k, xk in enumerate(xs):
            lo, hi = max(0.0, xk - dl), min(1.0, xk + dl)
            segs.append(Segment.affine(lo, hi, 0.0, _clamped(h, xk - dl) + carried))
            carried += plan.delta_jumps[k]
            if k + 1 < len(xs):
                segs += _pieces(h, xk + dl, xs[k + 1] - dl, carried)
        return from_segments(h.alpha, segs)

    def five_case_check(
        self,
        h: PiecewiseFn,
        g: PiecewiseFn,
        plan: InsertedConstantsPlan,
        tol: float | None = None,
    ) -> FiveCaseReport:
        """
        Sorts sampled pairs with |x - y| < D into the five configurations
        (free/free, free/frozen, frozen/frozen, frozen/free, across one frozen
        interval), compares L_xy(h - g) with each case's bound in terms of h,
        and certifies band_slope(h - g, 0, D) against L(h).
        """
        tol = self.settings.DEFAULT_TOL if tol is None else tol
        gap = plan.min_gap
        xs = np.asarray(plan.criticals)
        lo, hi = xs - plan.delta, xs + plan.delta
        x, y = self._case_pairs(lo, hi, gap)
        diff = h - g

        jx, ix = _frozen_index(lo, hi, x)
        jy, iy = _frozen_index(lo, hi, y)
        cases = {
            1: ~ix & ~iy & (jx == jy),
            2: ~ix & iy & (jy == jx + 1),
            3: ix & iy & (jx == jy),
            4: ix & ~iy & (jy == jx),
            5: ~ix & ~iy & (jy == jx + 1),
        }
        lo_c, hi_c = np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)
        bounds: dict[int, Callable[[NDArray[np.bool_]], NDArray[np.float64]]] = {
            1: lambda m: np.zeros(int(m.sum())),
            2: lambda m: _nan0(h.slopes(lo_c[jy[m]], y[m])),
            3: lambda m: _nan0(h.slopes(x[m], y[m])),
            4: lambda m: _nan0(h.slopes(x[m], hi_c[jx[m]])),
            5: lambda m: _nan0(h.slopes(lo_c[jy[m]], hi_c[jy[m]])),
        }
        stats: list[CaseStat] = []
        for case, mask in cases.items():
            if not bool(mask.any()):
                stats.append(CaseStat(case=case))
                continue
            slopes = diff.slopes(x[mask], y[mask])
            excess = slopes - bounds[case](mask)
            stats.append(
                CaseStat(
                    case=case,
                    pairs=int(mask.sum()),
                    max_slope=float(np.max(slopes)),
                    max_excess=float(np.max(excess)),
                    passed=bool(np.max(excess) <= tol),
                )
            )
        classified = np.zeros(x.size, dtype=bool)
        for mask in cases.values():
            classified |= mask

        band = self.holder.band_slope(diff, 0.0, min(gap, 1.0), tol)
        reference = self.holder.seminorm(h, tol)
        unclassified = int((~classified).sum())
        passed = (
            all(s.passed for s in stats)
            and unclassified == 0
            and band.upper <= reference.upper + tol
        )
        return FiveCaseReport(
            gap=gap,
            cases=stats,
            unclassified=unclassified,
            band=band,
            reference=reference,
            passed=passed,
        )

    # ---- polygons ------------------------------------------------------------
    def kp_interpolate(self, h: HolderFunction, partition: ArrayLike) -> Polygon:
        """Polygon through (x_k, h(x_k)); L(p) <= L(h) cell by cell."""
        xs = _check_partition(partition)
        ys = np.asarray(h(xs), dtype=float)
        return Polygon.from_nodes(h.alpha, xs, ys)

    @staticmethod
    def kp_cell_violations(
        h: HolderFunction, p: PiecewiseFn, partition: ArrayLike, samples: int = 33
    ) -> int:
        """
        Cells [x_{k-1}, x_k] where some grid pair has L_xy(p) > L_{x_{k-1} x_k}(h).
        The grid is p's own breakpoints in the cell plus `samples` uniform points.
        """
        xs = _check_partition(partition)
        hv = np.asarray(h(xs), dtype=float)
        bps = np.asarray(p.breakpoints)
        bad = 0
        for a, b, ha, hb in zip(xs[:-1], xs[1:], hv[:-1], hv[1:], strict=True):
            bound = abs(hb - ha) / (b - a) ** p.alpha
            inner = bps[(bps > a) & (bps < b)]
            grid = np.unique(np.concatenate([np.linspace(a, b, samples), inner]))
            i, j = np.triu_indices(grid.size, k=1)
            worst = float(np.max(p.slopes(grid[i], grid[j])))
            if worst > bound * (1.0 + 1e-12) + 1e-12:
                bad += 1
        return bad

    def dense_polygon_approx(
        self,
        h: PiecewiseFn,
        eps: float,
        depth: int,
        tol: float | None = None,
        reporter: ProgressReporter | None = None,
    ) -> tuple[Polygon, DenseApproxReport]:
        """
        Polygon f interpolating h on uniform meshes: one mesh on each stretch
        between the critical neighbourhoods of radius delta_0, then one per
        annulus delta_m <= |x - x_k| <= delta_{m-1}. Cell widths are picked so
        the Hölder slope of h on a cell is at most eps/4.

        The annuli continue past delta_depth down to a core radius r with
        8 L(h) r^alpha <= eps delta_depth^alpha, so the unmeshed cores move
        h - f by less than eps delta_depth^alpha / 4 and every band
        [delta_m, delta_{m-1}] is decided by its certified bound.
        """
        if not eps > 0.0:
            raise InvalidParameter(f"eps must be positive, got {eps!r}")
        if depth < 1:
            raise InvalidParameter(f"depth must be >= 1, got {depth}")
        crit = self.holder.critical_set(h)
        if len(crit) > self.settings.MAX_CRITICALS:
            raise InvalidParameter(
                f"{len(crit)} critical points: not an isolated critical set at this resolution"
            )
        tol = min(self.settings.DEFAULT_TOL, eps / 10.0) if tol is None else tol
        xs = sorted({0.0, 1.0, *crit})
        gap = min(b - a for a, b in zip(xs, xs[1:], strict=False))
        d0 = min(0.25, gap / 4.0)
        deltas = [d0 * 2.0**-m for m in range(depth + 1)]
        target = eps / 4.0
        core_depth = depth + self._core_levels(h, eps, deltas[-1], tol)
        radii = [d0 * 2.0**-m for m in range(core_depth + 1)]

        nodes: list[NDArray[np.float64]] = [np.asarray(xs), np.asarray(h.breakpoints)]
        for a, b in zip(xs, xs[1:], strict=False):
            nodes.append(self._mesh(h, a + d0, b - d0, target))
        for m in range(1, core_depth + 1):
            for xk in xs:
                for u, v in ((xk - radii[m - 1], xk - radii[m]), (xk + radii[m], xk + radii[m - 1])):
                    u, v = max(u, 0.0), min(v, 1.0)
                    if v > u:
                        nodes.append(self._mesh(h, u, v, target))
        mesh = np.unique(np.concatenate(nodes))
        if mesh.size > _MESH_BUDGET:
            raise BudgetExhausted(f"dense mesh needs {mesh.size} nodes (budget {_MESH_BUDGET})")
        f = Polygon.from_nodes(h.alpha, mesh, h.evaluate(mesh))
        log.debug(
            "dense approx eps=%g depth=%d core depth=%d: %d nodes", eps, depth, core_depth, mesh.size
        )

        diff = h - f
        sup = self.holder.sup_norm(diff, tol)
        bands: list[BandCheck] = []
        if reporter:
            reporter.start("bound", total=depth + 1, text="distance bands")
        for m in range(depth + 1):
            d_hi = 1.0 if m == 0 else deltas[m - 1]
            d_lo = deltas[m]
            bound = self.holder.band_slope(diff, d_lo, d_hi, tol)
            bands.append(
                BandCheck(
                    d_lo=d_lo,
                    d_hi=d_hi,
                    bound=bound,
                    resolved=4.0 * sup.upper <= eps * d_lo**h.alpha,
                    passed=bound.converged and bound.upper <= eps + tol,
                )
            )
            if reporter:
                reporter.update("bound", 1)
        if reporter:
            reporter.end("bound")

        unresolved = [b.d_lo for b in bands if not b.resolved]
        if unresolved:
            log.warning("dense approx: sup |h - f| does not resolve bands from %g down", unresolved[0])
        report = DenseApproxReport(
            eps=eps,
            depth=depth,
            core_depth=core_depth,
            core_radius=radii[-1],
            criticals=xs,
            deltas=deltas,
            nodes=int(mesh.size),
            sup=sup,
            bands=bands,
            passed=all(b.passed for b in bands),
        )
        return f, report

    def _core_levels(self, h: PiecewiseFn, eps: float, delta: float, tol: float) -> int:
        """
        Annulus levels below delta needed for 8 L(h) r^alpha <= eps delta^alpha,
        r = delta 2^-extra, stopping where r would reach the search resolution.
        """
        lip = self.holder.seminorm(h, tol).upper
        if lip <= 0.0:
            return 0
        extra = max(0, math.ceil(math.log2(8.0 * lip / eps) / h.alpha))
        floor = 64.0 * self.settings.BNB_MIN_WIDTH
        while extra > 0 and delta * 2.0**-extra < floor:
            extra -= 1
        if 8.0 * lip * (delta * 2.0**-extra) ** h.alpha > eps * delta**h.alpha:
            log.warning("dense approx: core radius capped at %g", delta * 2.0**-extra)
        return extra

    # ---- 3-ball property -----------------------------------------------------
    def verify_3b(
        self,
        h: PiecewiseFn,
        g: PiecewiseFn,
        eps_p: float,
        delta_p: float,
        tol: float | None = None,
    ) -> CertificateReport:
        """(3B1) ||h - g||_inf <= eps' delta' and (3B2) L_xy(h - g) <= 1 + eps' for |x - y|^alpha <= delta'."""
        if not (eps_p > 0.0 and delta_p > 0.0):
            raise InvalidParameter("eps' and delta' must be positive")
        diff = h - g
        target = eps_p * delta_p
        sup = self.holder.sup_norm(
            diff, tol if tol is not None else min(self.settings.DEFAULT_TOL, target / 4.0)
        )
        reach = min(1.0, delta_p ** (1.0 / h.alpha))
        band = self.holder.band_slope(
            diff, 0.0, reach, tol if tol is not None else min(self.settings.DEFAULT_TOL, eps_p / 4.0)
        )
        report = CertificateReport(
            experiment="lemma-3b",
            alpha=h.alpha,
            parameters={"eps_prime": eps_p, "delta_prime": delta_p},
        )
        _add_bound(report, "3B1 sup|h-g| <= eps'*delta'", sup, sup.upper <= target, limit=target)
        _add_bound(
            report,
            "3B2 band slope <= 1+eps'",
            band,
            band.upper <= 1.0 + eps_p,
            limit=1.0 + eps_p,
            reach=reach,
        )
        return report

    def three_ball_witness(
        self,
        h: PiecewiseFn,
        f1: PiecewiseFn,
        f2: PiecewiseFn,
        f3: PiecewiseFn,
        eps: float,
        tol: float | None = None,
    ) -> ThreeBallWitness:
        """g with L(h + f_i - g) <= 1 + eps, built the way the 3B criterion prescribes."""
        if not eps > 0.0:
            raise InvalidParameter(f"eps must be positive, got {eps!r}")
        fs = (f1, f2, f3)
        for i, f in enumerate(fs, start=1):
            if self.holder.critical_set(f):
                raise InvalidParameter(f"f{i} has critical points; balls must be centred in H^0")
        tol = min(self.settings.DEFAULT_TOL, eps / 4.0) if tol is None else tol

        reach = self._flat_distance(fs, eps / 2.0)
        delta_p = reach**h.alpha
        crit = self.holder.critical_set(h)
        if not crit:
            g, delta = h, 0.0
        else:
            pts = sorted({0.0, 1.0, *crit})
            n = len(pts)
            lip = max(self.holder.seminorm(h, tol).upper, 1e-300)
            target = eps * delta_p / 4.0
            gap = min(b - a for a, b in zip(pts, pts[1:], strict=False))
            # |x - y| <= 2 delta forces |h(x) - h(y)| <= target / n
            delta = min(0.5 * (target / (n * lip)) ** (1.0 / h.alpha), 0.5 * reach, 0.249 * gap)
            g = self.inserted_constants(h, pts, delta)
        norms = [self.holder.seminorm(h + f - g, tol) for f in fs]
        log.debug("three-ball: delta'=%g delta=%g norms=%s", delta_p, delta, [b.upper for b in norms])
        return ThreeBallWitness(
            g=g, per_ball_norms=norms, epsilon=eps, delta_prime=delta_p, delta=delta
        )

    # ---- M-summand -----------------------------------------------------------
    def msummand_certificate(self, g: PiecewiseFn, tol: float = 1e-9) -> ViolationWitness:
        """
        No g in H^0 has L(h + f_i - g) <= 1 for h = x^a, f_1 = x, f_2 = -x:
        either a boundary slope exceeds 1, or h - f_1 - g has a zero x_tilde
        with L_{x_tilde,1}(h + f_2 - g) = |g(1)| / (1 - x_tilde)^a > 1.
        """
        if not g.based:
            raise InvalidParameter("g must be based (g(0) = 0)")
        a = g.alpha
        g1 = float(g.eval(1.0))
        boundary = (abs(2.0 - g1), abs(g1))
        if max(boundary) > 1.0 + tol:
            return ViolationWitness(
                kind="boundary", g1=g1, boundary_values=boundary, slope_value=max(boundary)
            )

        n = 2**self.settings.SCAN_LEVEL
        grid = np.arange(n + 1) / n
        phi = grid**a - grid - g.evaluate(grid)
        positive = np.flatnonzero(phi > 0.0)
        if positive.size == 0:
            inner = grid[1:]
            from_zero = np.abs(inner + g.evaluate(inner)) / inner**a
            return ViolationWitness(
                kind="not_little",
                g1=g1,
                boundary_values=boundary,
                slope_value=float(np.min(from_zero)),
            )
        x0 = float(grid[positive[0]])
        last = int(positive[-1])
        if last == n or not bool(np.all(np.isfinite(phi))):
            raise RootIsolationError(f"no sign change of h - f1 - g after x0={x0!r}")

        def phi_at(x: float) -> float:
            return x**a - x - g.eval(x)

        lo, hi = float(grid[last]), float(grid[last + 1])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if phi_at(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        x_tilde = hi
        slope = abs(phi_at(x_tilde) - phi_at(1.0)) / (1.0 - x_tilde) ** a
        return ViolationWitness(
            kind="witness",
            g1=g1,
            boundary_values=boundary,
            x0=x0,
            x_tilde=x_tilde,
            slope_value=slope,
        )

    def msummand_search(
        self,
        alpha: float,
        max_candidates: int = 200,
        seed: int = 0,
        reporter: ProgressReporter | None = None,
    ) -> tuple[MSummandSearchReport, list[ViolationWitness]]:
        """
        Polygons on uniform abscissae with 2..12 nodes, g(0) = 0, g(1) = 1 and
        interior values on the 1/16 grid in [-1, 2]; small classes are
        enumerated, larger ones sampled with `seed`.
        """
        if max_candidates < 1:
            raise InvalidParameter("max_candidates must be >= 1")
        alpha = check_alpha(alpha)
        values = self._family(max_candidates, np.random.default_rng(seed))
        polys = [
            Polygon.from_nodes(alpha, np.linspace(0.0, 1.0, v.size), v) for v in values
        ]
        if reporter:
            reporter.start("search", total=len(polys), text="M-summand candidates")

        def _one(p: Polygon) -> ViolationWitness:
            out = self.msummand_certificate(p)
            if reporter:
                reporter.update("search", 1)
            return out

        with ThreadPoolExecutor(max_workers=self.workers) as ex:
            outcomes = list(ex.map(_one, polys))
        if reporter:
            reporter.end("search")

        by_n: dict[int, int] = {}
        for v in values:
            by_n[int(v.size)] = by_n.get(int(v.size), 0) + 1
        by_kind: dict[str, int] = {}
        for o in outcomes:
            by_kind[o.kind] = by_kind.get(o.kind, 0) + 1
        witnesses = [(o.slope_value, i) for i, o in enumerate(outcomes) if o.kind == "witness"]
        worst = min(witnesses) if witnesses else None
        report = MSummandSearchReport(
            alpha=alpha,
            seed=seed,
            candidates=len(polys),
            by_node_count=by_n,
            by_kind=by_kind,
            min_witness_slope=None if worst is None else worst[0],
            worst_nodes=None if worst is None else [float(v) for v in values[worst[1]]],
            all_violated=all(o.violated for o in outcomes),
        )
        return report, outcomes

    # ---- helpers -------------------------------------------------------------
    def _case_pairs(
        self, lo: NDArray[np.float64], hi: NDArray[np.float64], gap: float
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        rng = np.random.default_rng(_SAMPLE_SEED)
        n = max(self.settings.SAMPLE_PAIRS, 1000)
        edges = np.concatenate([lo, hi])
        near = edges[rng.integers(0, edges.size, n)] + rng.uniform(-gap, gap, n)
        x = np.clip(np.concatenate([rng.random(n), near, edges]), 0.0, 1.0)
        d = gap * rng.random(x.size) ** 2
        y = np.clip(x + d, 0.0, 1.0)
        keep = (y > x) & (y - x < gap)
        return x[keep], y[keep]

    def _mesh(self, h: PiecewiseFn, u: float, v: float, target: float) -> NDArray[np.float64]:
        if not v > u:
            return np.empty(0)
        bound = _derivative_bound(h, u, v)
        if bound <= 0.0:
            return np.array([u, v])
        cell = (target / bound) ** (1.0 / (1.0 - h.alpha))
        cells = math.ceil((v - u) / cell)
        if cells > _MESH_BUDGET:
            raise BudgetExhausted(f"mesh on [{u:g}, {v:g}] needs {cells} cells")
        return np.linspace(u, v, max(cells, 1) + 1)

    def _flat_distance(self, fs: Sequence[PiecewiseFn], level: float) -> float:
        """Largest dyadic D with band_slope(f, 0, D) <= level for every f."""
        tol = min(self.settings.DEFAULT_TOL, level / 4.0)

        def flat(j: int) -> bool:
            d = 2.0**-j
            return all(self.holder.band_slope(f, 0.0, d, tol).upper <= level for f in fs)

        top = self.settings.SCAN_LEVEL
        if not flat(top):
            raise BudgetExhausted(f"no distance down to 2^-{top} makes the balls {level:g}-flat")
        lo, hi = 0, top
        while lo < hi:
            mid = (lo + hi) // 2
            if flat(mid):
                hi = mid
            else:
                lo = mid + 1
        return 2.0**-lo

    @staticmethod
    def _family(budget: int, rng: np.random.Generator) -> list[NDArray[np.float64]]:
        sizes = list(range(2, 13))
        width = _GRID_RANGE[1] - _GRID_RANGE[0] + 1
        out: list[NDArray[np.float64]] = [np.array([0.0, 1.0])]
        left = budget - 1
        for i, n in enumerate(sizes[1:]):
            if left <= 0:
                break
            quota = max(1, left // (len(sizes) - 1 - i))
            inner = n - 2
            if width**inner <= quota:
                rows = np.array(list(itertools.product(range(_GRID_RANGE[0], _GRID_RANGE[1] + 1), repeat=inner)))
            else:
                rows = rng.integers(_GRID_RANGE[0], _GRID_RANGE[1] + 1, size=(quota, inner))
            for row in rows:
                out.append(np.concatenate([[0.0], row / _GRID_STEPS, [1.0]]))
            left -= len(rows)
        return out


def _clamped(h: PiecewiseFn, x: float) -> float:
    """h extended by h(0) left of 0 and by h(1) right of 1."""
    return h.eval(min(max(x, 0.0), 1.0))


def _pieces(h: PiecewiseFn, u: float, v: float, shift: float) -> list[Segment]:
    out = []
    for s in h.segments:
        a, b = max(s.a, u), min(s.b, v)
        if a < b:
            out.append(s.restrict(a, b).shifted(shift))
    return out


def _frozen_index(
    lo: NDArray[np.float64], hi: NDArray[np.float64], p: NDArray[np.float64]
) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
    """(j, inside): inside frozen interval j, or in the free stretch right of it."""
    j = np.searchsorted(lo, p, side="right") - 1
    inside = (j >= 0) & (p <= hi[np.clip(j, 0, None)])
    return j, inside


def _nan0(v: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.nan_to_num(v, nan=0.0)


def _derivative_bound(h: PiecewiseFn, u: float, v: float) -> float:
    """sup |h'| on [u, v] from the segment formulas; anchors must stay off [u, v]."""
    worst = 0.0
    for s in h.segments:
        a, b = max(s.a, u), min(s.b, v)
        if not a < b:
            continue
        d = abs(s.slope)
        for t in s.arcs:
            dist = max(a - t.anchor, t.anchor - b, 0.0)
            if dist == 0.0:
                return math.inf
            d += abs(t.coeff) * h.alpha * dist ** (h.alpha - 1.0)
        worst = max(worst, d)
    return worst


def _check_partition(partition: ArrayLike) -> NDArray[np.float64]:
    xs = np.asarray(partition, dtype=float)
    if xs.ndim != 1 or xs.size < 2:
        raise InvalidParameter("a partition needs at least the points 0 and 1")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise InvalidParameter(f"partition must run from 0 to 1, got {xs[0]}..{xs[-1]}")
    if not bool(np.all(np.diff(xs) > 0)):
        raise InvalidParameter("partition must be strictly increasing")
    return xs


def _add_bound(
    report: CertificateReport, label: str, b: CertifiedBound, passed: bool, **witness: object
) -> None:
    report.add(
        label,
        passed=passed,
        lower=b.lower,
        upper=b.upper,
        tol=b.tol,
        converged=b.converged,
        pair=b.witness,
        **witness,
    )
