# src/holder_lab/modules/ciesielski/service.py
from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import NDArray

from holder_lab.core.errors import InvalidParameter
from holder_lab.core.logging import get_logger
from holder_lab.core.progress import ProgressReporter
from holder_lab.core.workers import get_worker_count
from holder_lab.modules.holder.piecewise import HolderFunction, Polygon, check_alpha

from .coeffs import CoeffSeq, DyadicIndex, level_arrays
from .schemas import HeavyPointReport, OnesProfileReport

log = get_logger(__name__)

# levels below this are summed inline; the pool only pays off for long sums
_PARALLEL_LEVELS = 10


def peak_height(m: int | NDArray[np.int64], alpha: float) -> float | NDArray[np.float64]:
    """
    2^{-(m+1) alpha}: height that gives the level-m triangle slope 1 from each end.
    Arrays are filled with the scalar power so phi and analyze agree bitwise.
    """
    if np.ndim(m) == 0:
        return math.ldexp(1.0, -(int(m) + 1)) ** alpha
    out = [math.ldexp(1.0, -(int(j) + 1)) ** alpha for j in np.ravel(m)]
    return np.array(out, dtype=float).reshape(np.shape(m))


class CiesielskiService:
    """Triangle system normalized in the Hölder seminorm, its transforms and profiles."""

    def __init__(self, workers: int | None = None) -> None:
        self.workers = workers or get_worker_count()

    # ---- basis ---------------------------------------------------------------
    def phi(self, n: int, alpha: float) -> Polygon:
        alpha = check_alpha(alpha)
        if n < 1:
            raise InvalidParameter(f"basis index must be >= 1, got {n}")
        if n == 1:
            return Polygon.from_nodes(alpha, [0.0, 1.0], [0.0, 1.0])
        idx = DyadicIndex.from_n(n)
        xs = [0.0, idx.xl, idx.xc, idx.xr, 1.0]
        ys = [0.0, 0.0, float(peak_height(idx.m, alpha)), 0.0, 0.0]
        keep = [i for i in range(5) if i == 0 or xs[i] != xs[i - 1]]
        return Polygon.from_nodes(alpha, [xs[i] for i in keep], [ys[i] for i in keep])

    # ---- transforms ----------------------------------------------------------
    def analyze(self, f: HolderFunction, N: int) -> CoeffSeq:
        """
        a_1 = f(1); a_n = ((f(xc)-f(xl)) - (f(xr)-f(xc))) / (2 (xc-xl)^alpha).
        Polygons are differenced segment by segment, which makes analyze(phi_n)
        the unit vector e_n exactly.
        """
        if N < 1:
            raise InvalidParameter(f"truncation N must be >= 1, got {N}")
        alpha = check_alpha(f.alpha)
        if float(f(0.0)) != 0.0:
            raise InvalidParameter("analyze needs a based function (f(0) = 0)")
        ns = np.arange(2, N + 1, dtype=np.int64)
        m, k = level_arrays(ns)
        half = np.ldexp(1.0, -(m + 1))
        xl = (k - 1) * (2.0 * half)
        xc = (2 * k - 1) * half
        xr = k * (2.0 * half)
        if isinstance(f, Polygon):
            up, down = f.increments(xl, xc), f.increments(xc, xr)
            top = float(f.eval(1.0))
        else:
            vals = np.asarray(f(np.concatenate([xl, xc, xr, [1.0]])), dtype=float)
            fl, fc, fr = np.split(vals[:-1], 3)
            up, down, top = fc - fl, fr - fc, float(vals[-1])
        h = np.asarray(peak_height(m, alpha), dtype=float)
        out = np.empty(N)
        out[0] = top
        out[1:] = 0.5 * (up / h - down / h)
        return CoeffSeq(alpha, out)

    def synthesize(self, c: CoeffSeq) -> Polygon:
        """Sum a_n phi_n as a polygon on the dyadic mesh one level below the top."""
        mesh_level = c.top_level + 1
        mesh = np.arange(2**mesh_level + 1) / 2.0**mesh_level
        levels = range(c.top_level + 1)

        def _level(m: int) -> NDArray[np.float64]:
            return self._level_values(c.level(m), m, mesh, c.alpha)

        if len(levels) >= _PARALLEL_LEVELS and self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as ex:
                parts = list(ex.map(_level, levels))
        else:
            parts = [_level(m) for m in levels]

        values = c[1] * mesh
        for part in parts:  # fixed level order keeps the sum reproducible
            values = values + part
        return Polygon.from_nodes(c.alpha, mesh, values)

    @staticmethod
    def uniform_bound(c: CoeffSeq) -> float:
        """||c||_inf * (1 + sum over present levels of 2^{-(m+1) alpha})."""
        levels = np.arange(c.top_level + 1)
        return c.max_abs() * (1.0 + float(np.sum(peak_height(levels, c.alpha))))

    # ---- profiles ------------------------------------------------------------
    def cp_profile(
        self,
        c: CoeffSeq,
        eps: float,
        depth: int,
        reporter: ProgressReporter | None = None,
    ) -> HeavyPointReport:
        """
        Dyadic points x = i/2^depth such that every radius 2^-j, j = 1..depth,
        contains the support of some n with |a_n| > eps. Finite-depth candidates
        only: membership in c_p / c_w is a statement about all n.
        """
        if eps < 0:
            raise InvalidParameter(f"eps must be >= 0, got {eps}")
        if depth < 1:
            raise InvalidParameter(f"depth must be >= 1, got {depth}")
        limit = c.complete_levels - 1
        if depth > limit:
            raise InvalidParameter(
                f"depth {depth} exceeds the resolved levels of N={c.N} (max depth {limit})"
            )

        heavy_xl: list[NDArray[np.float64]] = []
        counts: list[int] = []
        for m in range(c.top_level + 1):
            idx = np.flatnonzero(np.abs(c.level(m)) > eps)
            heavy_xl.append(idx / 2.0**m)
            counts.append(int(idx.size))

        cands = np.arange(2**depth + 1) / 2.0**depth
        covered = np.ones(cands.size, dtype=bool)
        if reporter:
            reporter.start("profile", total=depth, text=f"radii 2^-1..2^-{depth}")
        for j in range(1, depth + 1):
            r = 2.0**-j
            hit = np.zeros(cands.size, dtype=bool)
            for m in range(j, c.top_level + 1):
                xl = heavy_xl[m]
                if xl.size == 0:
                    continue
                # support [xl, xl + 2^-m] strictly inside (x - r, x + r)
                lo = np.searchsorted(xl, cands - r, side="right")
                hi = np.searchsorted(xl, cands + r - 2.0**-m, side="left")
                hit |= hi > lo
            covered &= hit
            if reporter:
                reporter.update("profile", 1)
        if reporter:
            reporter.end("profile")

        points = [float(x) for x in cands[covered]]
        log.debug("cp profile eps=%g depth=%d: %d candidates", eps, depth, len(points))
        return HeavyPointReport(
            label=f"candidates at depth {depth}",
            eps=eps,
            depth=depth,
            N=c.N,
            points=points,
            heavy_counts=counts,
        )

    def ones_profile(
        self, N: int, alpha: float, points: Sequence[float] | None = None
    ) -> OnesProfileReport:
        """Slopes L_{0,x}(f_N) of f_N = phi_1 + ... + phi_N along points decreasing to 0."""
        alpha = check_alpha(alpha)
        if N < 1:
            raise InvalidParameter(f"N must be >= 1, got {N}")
        c = CoeffSeq(alpha, np.ones(N))
        f = self.synthesize(c)
        exact_top = c.top_level + 1
        if points is None:
            xs = np.ldexp(1.0, -np.arange(exact_top + 1))
        else:
            xs = np.asarray(sorted(points, reverse=True), dtype=float)
            if xs.size == 0 or xs[-1] <= 0.0 or xs[0] > 1.0:
                raise InvalidParameter("profile points must lie in (0, 1]")
        slopes = np.abs(f.evaluate(xs)) / xs**alpha

        beta = 1.0 - alpha
        closed: list[float | None] = []
        for x in xs:
            mant, e = np.frexp(x)
            j = 1 - int(e)
            if mant == 0.5 and 0 <= j <= exact_top:
                closed.append(2.0 ** (-j * beta) * (1.0 + sum(2.0 ** (i * beta) for i in range(1, j + 1))))
            else:
                closed.append(None)

        return OnesProfileReport(
            N=N,
            alpha=alpha,
            points=[float(x) for x in xs],
            slopes=[float(s) for s in slopes],
            closed_form=closed,
            cauchy_gaps=[float(g) for g in np.abs(np.diff(slopes))],
            b_hat=float(slopes[-1]),
            limit=2.0**beta / (2.0**beta - 1.0),
        )

    # ---- helpers -------------------------------------------------------------
    @staticmethod
    def _level_values(
        coeffs: NDArray[np.float64], m: int, mesh: NDArray[np.float64], alpha: float
    ) -> NDArray[np.float64]:
        t = mesh * 2.0**m
        cell = np.minimum(np.floor(t).astype(np.int64), 2**m - 1)
        frac = t - cell
        tent = float(peak_height(m, alpha)) * (1.0 - np.abs(2.0 * frac - 1.0))
        return coeffs[cell] * tent
