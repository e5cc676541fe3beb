# src/holder_lab/core/rich_progress.py
from __future__ import annotations

import threading

from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)

from holder_lab.core.progress import Phase, ProgressReporter


class RichPhaseProgressReporter(ProgressReporter):
    """Maps experiment phases to Rich tasks. Safe to share across --jobs workers."""

    def __init__(self, progress: Progress) -> None:
        self.progress = progress
        self.tasks: dict[str, int] = {}
        self.totals: dict[str, int | None] = {}
        self._lock = threading.Lock()
        self.labels = {
            "build": "Building",
            "bound": "Bounding",
            "search": "Searching",
            "profile": "Profiling",
            "write": "Writing",
        }

    def start(
        self, phase: Phase, total: int | None = None, text: str | None = None
    ) -> None:
        label = self.labels.get(phase, str(phase).title())
        with self._lock:
            old = self.tasks.get(str(phase))
            if old is not None:
                # phases repeat across experiments; reuse the row
                self.progress.reset(old, total=total, detail=(text or ""), visible=True)
            else:
                self.tasks[str(phase)] = self.progress.add_task(
                    label, total=total, detail=(text or "")
                )
            self.totals[str(phase)] = total

    def update(self, phase: Phase, advance: int = 1, text: str | None = None) -> None:
        task_id = self.tasks.get(str(phase))
        if task_id is None:
            return
        kwargs: dict[str, object] = {"advance": advance}
        if text is not None:
            kwargs["detail"] = text
        with self._lock:
            self.progress.update(task_id, **kwargs)  # type: ignore[arg-type]

    def end(self, phase: Phase) -> None:
        task_id = self.tasks.get(str(phase))
        if task_id is None:
            return
        total = self.totals.get(str(phase))
        with self._lock:
            if total is None:
                self.progress.update(task_id, visible=False, detail="")
            else:
                self.progress.update(task_id, completed=total, detail="")


def make_phase_progress(console: Console) -> tuple[Progress, RichPhaseProgressReporter]:
    """Standardized Rich progress layout + reporter instance."""
    progress = Progress(
        SpinnerColumn(),
        TextColumn("[bold]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TextColumn("•"),
        TimeElapsedColumn(),
        TextColumn("• {task.fields[detail]}"),
        console=console,
        transient=True,
    )
    return progress, RichPhaseProgressReporter(progress)
