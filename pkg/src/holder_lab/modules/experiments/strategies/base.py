# src/holder_lab/modules/experiments/strategies/base.py
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from holder_lab.core.config import Settings, get_settings
from holder_lab.core.progress import ProgressReporter
from holder_lab.core.report import CertificateReport
from holder_lab.modules.experiments.schemas import ExperimentSpec

__all__ = ["ExperimentBase", "ExperimentResult", "Series"]

Series = tuple[NDArray[np.float64], ...]


@dataclass
class ExperimentResult:
    report: CertificateReport
    series: dict[str, Series] = field(default_factory=dict)


class ExperimentBase(ABC):
    """Strategy interface for catalog experiments."""

    name: ClassVar[str]
    summary: ClassVar[str] = ""
    defaults: ClassVar[dict[str, Any]] = {}

    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or get_settings()

    @abstractmethod
    def run(
        self, spec: ExperimentSpec, reporter: ProgressReporter | None = None
    ) -> ExperimentResult:
        raise NotImplementedError

    # ---- helpers -------------------------------------------------------------
    def param(self, spec: ExperimentSpec, key: str) -> Any:
        return spec.param(key, self.defaults[key])

    def new_report(self, spec: ExperimentSpec, **extra: Any) -> CertificateReport:
        """Report carrying every default, overridden by the spec, plus `extra`."""
        params = {k: self.param(spec, k) for k in self.defaults}
        params.update(extra)
        return CertificateReport(
            experiment=self.name, alpha=spec.alpha, parameters=params, seed=spec.seed
        )
