# src/holder_lab/core/report.py
from __future__ import annotations

import json
import time
from collections.abc import Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from holder_lab.core.logging import get_logger

log = get_logger(__name__)

__all__ = ["CertificateResult", "CertificateReport", "ReportWriter"]


class CertificateResult(BaseModel):
    """One certified quantity (or check) inside an experiment report."""

    model_config = ConfigDict(populate_by_name=True)

    label: str = Field(..., examples=["L(h_12)"])
    lower: float | None = Field(None, description="Certified or exact lower value.")
    upper: float | None = Field(None, description="Certified or exact upper value.")
    tol: float | None = Field(None, examples=[1e-6])
    witness: dict[str, Any] = Field(
        default_factory=dict,
        description="Witness points/values backing the bound.",
        examples=[{"x": 0.25, "y": 1.0}],
    )
    passed: bool = Field(..., alias="pass", examples=[True])


class CertificateReport(BaseModel):
    """Structured outcome of one experiment; serialized with a stable key order."""

    model_config = ConfigDict(populate_by_name=True)

    experiment: str = Field(..., examples=["k-solve"])
    alpha: float = Field(..., gt=0, lt=1, examples=[0.5])
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, examples=[0])
    results: list[CertificateResult] = Field(default_factory=list)
    passed: bool = Field(True, alias="pass")

    @field_validator("parameters")
    @classmethod
    def _sorted_keys(cls, v: dict[str, Any]) -> dict[str, Any]:
        return {k: v[k] for k in sorted(v)}

    def add(
        self,
        label: str,
        *,
        passed: bool,
        lower: float | None = None,
        upper: float | None = None,
        tol: float | None = None,
        **witness: Any,
    ) -> CertificateResult:
        res = CertificateResult(
            label=label,
            lower=None if lower is None else float(lower),
            upper=None if upper is None else float(upper),
            tol=tol,
            witness={k: _plain(v) for k, v in witness.items()},
            passed=bool(passed),
        )
        self.results.append(res)
        self.passed = self.passed and res.passed
        return res

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


def _plain(v: Any) -> Any:
    """numpy scalars/arrays -> JSON-friendly Python values."""
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple | list):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


class ReportWriter:
    """Writes reports, their timestamp sidecars and CSV series under one directory."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir

    # ---- public API ----------------------------------------------------------
    def write_report(
        self, report: CertificateReport, elapsed: float | None = None
    ) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{report.experiment}.json"
        path.write_text(report.to_json() + "\n", encoding="utf-8")

        # timestamps live next to the report so the report itself is reproducible
        meta = {
            "experiment": report.experiment,
            "written_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "elapsed_s": None if elapsed is None else round(elapsed, 6),
            "wall_clock": time.time(),
        }
        meta_path = path.with_suffix(".meta.json")
        meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        log.info("report written: %s (pass=%s)", path, report.passed)
        return path

    def write_series(
        self, name: str, x: np.ndarray, *values: np.ndarray
    ) -> Path:
        """CSV with header x,value[,value2...] and 17 significant digits."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{name}.csv"
        cols = [np.asarray(x, dtype=float)] + [np.asarray(v, dtype=float) for v in values]
        header = ",".join(["x"] + _value_names(len(values)))
        np.savetxt(
            path, np.column_stack(cols), fmt="%.17g", delimiter=",", header=header, comments=""
        )
        log.debug("series written: %s (%d rows)", path, len(cols[0]))
        return path


def _value_names(n: int) -> Sequence[str]:
    return ["value"] + [f"value{i}" for i in range(2, n + 1)]
