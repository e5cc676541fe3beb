# src/holder_lab/cli.py
from __future__ import annotations

import typer

from holder_lab.commands.experiments import register as register_experiments

app = typer.Typer(help="Hölder Lab CLI", no_args_is_help=True)
register_experiments(app)


if __name__ == "__main__":
    app()
