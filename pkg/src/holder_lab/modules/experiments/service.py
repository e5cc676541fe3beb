# src/holder_lab/modules/experiments/service.py
from __future__ import annotations

import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.errors import EXIT_FAIL, EXIT_PASS, HolderLabError, to_exit_code
from holder_lab.core.logging import get_logger
from holder_lab.core.progress import ProgressReporter
from holder_lab.core.registry import get_experiment, load_experiments
from holder_lab.core.report import ReportWriter

from .schemas import ExperimentSpec, RunRecord

log = get_logger(__name__)


class ExperimentService:
    """Runs catalog experiments and writes their reports and series."""

    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or get_settings()

    # ---- public API ----------------------------------------------------------
    @staticmethod
    def catalog() -> list[tuple[str, str]]:
        return [(name, cls.summary) for name, cls in load_experiments().items()]

    def run(
        self, spec: ExperimentSpec, reporter: ProgressReporter | None = None
    ) -> RunRecord:
        t0 = time.perf_counter()
        try:
            cls = get_experiment(spec.name)
            result = cls(self.settings).run(spec, reporter)
        except HolderLabError as e:
            log.error("%s failed: %s", spec.name, e)
            return RunRecord(
                name=spec.name,
                passed=False,
                exit_code=to_exit_code(e),
                elapsed=time.perf_counter() - t0,
                error=f"{type(e).__name__}: {e}",
            )
        except Exception as e:
            log.exception("%s crashed", spec.name)
            return RunRecord(
                name=spec.name,
                passed=False,
                exit_code=to_exit_code(e),
                elapsed=time.perf_counter() - t0,
                error=f"{type(e).__name__}: {e}",
            )

        elapsed = time.perf_counter() - t0
        writer = ReportWriter(self._out_dir(spec))
        if reporter:
            reporter.start("write", total=1 + len(result.series), text=spec.name)
        report_path = writer.write_report(result.report, elapsed)
        series_paths = []
        for key, (x, *values) in result.series.items():
            series_paths.append(str(writer.write_series(f"{spec.name}-{key}", x, *values)))
            if reporter:
                reporter.update("write", 1)
        if reporter:
            reporter.end("write")

        passed = result.report.passed
        log.info("%s: pass=%s in %.2fs", spec.name, passed, elapsed)
        return RunRecord(
            name=spec.name,
            passed=passed,
            exit_code=EXIT_PASS if passed else EXIT_FAIL,
            report_path=str(report_path),
            series_paths=series_paths,
            elapsed=elapsed,
        )

    def run_many(
        self,
        specs: Sequence[ExperimentSpec],
        jobs: int = 1,
        reporter: ProgressReporter | None = None,
    ) -> list[RunRecord]:
        """Independent experiments on `jobs` threads; records come back in spec order."""
        if jobs <= 1 or len(specs) <= 1:
            return [self.run(s, reporter) for s in specs]
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(lambda s: self.run(s, reporter), specs))

    @staticmethod
    def exit_code(records: Sequence[RunRecord]) -> int:
        """Worst status wins: unexpected > budget > invalid > failed > passed."""
        return max((r.exit_code for r in records), default=EXIT_PASS)

    # ---- helpers -------------------------------------------------------------
    def _out_dir(self, spec: ExperimentSpec) -> Path:
        return spec.output if spec.output is not None else self.settings.output_dir()
