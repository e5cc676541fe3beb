# src/holder_lab/core/registry.py
from __future__ import annotations

from importlib.metadata import entry_points
from typing import TYPE_CHECKING

from holder_lab.core.errors import UnknownExperiment
from holder_lab.core.logging import get_logger

if TYPE_CHECKING:
    from holder_lab.modules.experiments.strategies.base import ExperimentBase

EP_GROUP = "holder_lab.experiments"

log = get_logger(__name__)


def builtin_experiments() -> dict[str, type[ExperimentBase]]:
    from holder_lab.modules.experiments.strategies import (
        almond,
        approx,
        ciesielski,
        counterexamples,
    )

    catalog: dict[str, type[ExperimentBase]] = {}
    for mod in (almond, counterexamples, approx, ciesielski):
        for cls in mod.EXPERIMENTS:
            catalog[cls.name] = cls
    return catalog


def load_experiments() -> dict[str, type[ExperimentBase]]:
    """Built-in catalog plus classes registered under the `holder_lab.experiments` group."""
    from holder_lab.modules.experiments.strategies.base import ExperimentBase

    catalog = builtin_experiments()
    for ep in entry_points(group=EP_GROUP):
        if ep.name in catalog:
            continue
        try:
            cls = ep.load()
        except Exception as e:  # skip broken plugins
            log.warning("experiment plugin %s failed to load: %s", ep.name, e)
            continue
        # Convention: each EP must load to an ExperimentBase subclass
        if isinstance(cls, type) and issubclass(cls, ExperimentBase):
            catalog[ep.name] = cls
    return dict(sorted(catalog.items()))


def get_experiment(name: str) -> type[ExperimentBase]:
    catalog = load_experiments()
    try:
        return catalog[name]
    except KeyError:
        raise UnknownExperiment(
            f"unknown experiment {name!r}; known: {', '.join(catalog)}"
        ) from None
