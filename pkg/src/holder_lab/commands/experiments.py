# src/holder_lab/commands/experiments.py
from __future__ import annotations

from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.table import Table

from holder_lab.commands.common import parse_params
from holder_lab.core.config import get_settings
from holder_lab.core.errors import EXIT_INVALID, UnknownExperiment
from holder_lab.core.logging import configure_logging
from holder_lab.core.rich_progress import make_phase_progress
from holder_lab.modules.experiments.schemas import ExperimentSpec, RunRecord
from holder_lab.modules.experiments.service import ExperimentService
from holder_lab.version import get_version

__all__ = ["register"]


class ExperimentRunner:
    """Builds specs from CLI options, runs them with progress and prints a summary."""

    def __init__(self, console: Console | None = None) -> None:
        self.console = console or Console(stderr=True)
        self.service = ExperimentService()

    def specs(
        self,
        name: str,
        alpha: float,
        params: dict[str, Any],
        seed: int,
        out: Path | None,
    ) -> list[ExperimentSpec]:
        catalog = dict(self.service.catalog())
        names = list(catalog) if name == "all" else [name]
        if name != "all" and name not in catalog:
            raise UnknownExperiment(f"unknown experiment {name!r}; try `hlab list`")
        return [
            ExperimentSpec(name=n, alpha=alpha, parameters=params, seed=seed, output=out)
            for n in names
        ]

    def run(self, specs: list[ExperimentSpec], jobs: int) -> int:
        progress, reporter = make_phase_progress(self.console)
        with progress:
            records = self.service.run_many(specs, jobs=jobs, reporter=reporter)
        self._render(records)
        return self.service.exit_code(records)

    # -------- rendering --------
    def _render(self, records: list[RunRecord]) -> None:
        table = Table(title="Experiments", show_lines=False)
        table.add_column("Experiment")
        table.add_column("Pass", justify="center")
        table.add_column("Exit", justify="right")
        table.add_column("Time", justify="right")
        table.add_column("Report / error", overflow="fold")
        for r in records:
            mark = "[green]yes[/green]" if r.passed else "[red]no[/red]"
            table.add_row(r.name, mark, str(r.exit_code), f"{r.elapsed:.2f}s", r.error or r.report_path or "")
        self.console.print(table)


def register(app: typer.Typer) -> None:
    @app.command("run")
    def run_cmd(
        name: str = typer.Argument(..., help="Experiment name from `hlab list`, or 'all'."),
        alpha: float = typer.Option(0.5, "--alpha", "-a", help="Hölder exponent in (0, 1)."),
        depth: int | None = typer.Option(None, "--depth", help="Construction or scan depth."),
        eps: float | None = typer.Option(None, "--eps", help="Target accuracy."),
        delta: float | None = typer.Option(None, "--delta", help="Frozen half-width."),
        param: list[str] = typer.Option([], "--param", "-p", help="Extra key=value. Repeat flag."),
        out: Path | None = typer.Option(None, "--out", "-o", file_okay=False, help="Report directory."),
        seed: int = typer.Option(0, "--seed", min=0),
        jobs: int = typer.Option(1, "--jobs", "-j", min=1, help="Experiments run concurrently."),
        log_level: str | None = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING..."),
        json_logs: bool | None = typer.Option(None, "--json-logs/--plain-logs"),
    ) -> None:
        """Run one experiment (or all) and write its report under --out."""
        settings = get_settings()
        configure_logging(
            log_level or settings.LOG_LEVEL,
            settings.JSON_LOGS if json_logs is None else json_logs,
        )
        params = parse_params(param)
        for key, value in (("depth", depth), ("eps", eps), ("delta", delta)):
            if value is not None:
                params[key] = value
        runner = ExperimentRunner()
        try:
            specs = runner.specs(name, alpha, params, seed, out)
        except UnknownExperiment as e:
            runner.console.print(f"[red]{e}[/red]")
            raise typer.Exit(EXIT_INVALID) from None
        except ValueError as e:
            runner.console.print(f"[red]invalid parameters: {e}[/red]")
            raise typer.Exit(EXIT_INVALID) from None
        raise typer.Exit(runner.run(specs, jobs))

    @app.command("list")
    def list_cmd() -> None:
        """Print the experiment catalog."""
        table = Table(title="Experiment catalog")
        table.add_column("Name")
        table.add_column("What it checks", overflow="fold")
        for name, summary in ExperimentService.catalog():
            table.add_row(name, summary)
        Console().print(table)

    @app.command("version")
    def version_cmd() -> None:
        typer.echo(get_version())
