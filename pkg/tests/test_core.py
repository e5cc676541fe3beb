# tests/test_core.py
from __future__ import annotations

import json

import numpy as np
import pytest

from holder_lab.core.config import get_settings
from holder_lab.core.errors import (
    BudgetExhausted,
    DegeneratePair,
    InsufficientDepth,
    InvalidParameter,
    RootIsolationError,
    UnknownExperiment,
    to_exit_code,
)
from holder_lab.core.report import CertificateReport, ReportWriter


def test_settings_read_env(monkeypatch):
    monkeypatch.setenv("HL_DEFAULT_TOL", "1e-4")
    monkeypatch.setenv("HL_LOG_LEVEL", "debug")
    get_settings.cache_clear()
    try:
        s = get_settings()
        assert s.DEFAULT_TOL == 1e-4
        assert s.LOG_LEVEL == "DEBUG"
    finally:
        get_settings.cache_clear()


@pytest.mark.parametrize(
    ("exc", "code"),
    [
        (None, 0),
        (InvalidParameter("x"), 2),
        (DegeneratePair("x"), 2),
        (UnknownExperiment("x"), 2),
        (BudgetExhausted("x"), 3),
        (RootIsolationError("x"), 3),
        (InsufficientDepth("x", needed_depth=5), 3),
        (RuntimeError("x"), 4),
    ],
)
def test_exit_codes(exc, code):
    assert to_exit_code(exc) == code


def test_insufficient_depth_carries_depth():
    e = InsufficientDepth("scale not resolved", needed_depth=9)
    assert e.needed_depth == 9
    assert "depth >= 9" in str(e)


def test_report_pass_is_conjunction():
    rep = CertificateReport(experiment="demo", alpha=0.5, parameters={"b": 1, "a": 2})
    rep.add("first", passed=True, lower=1.0, upper=1.0)
    assert rep.passed
    rep.add("second", passed=False, upper=np.float64(2.0), pair=np.array([0.0, 0.5]))
    assert not rep.passed
    doc = json.loads(rep.to_json())
    assert list(doc["parameters"]) == ["a", "b"]
    assert doc["pass"] is False
    assert doc["results"][1]["witness"]["pair"] == [0.0, 0.5]


def test_writer_is_reproducible(tmp_path):
    rep = CertificateReport(experiment="demo", alpha=0.5)
    rep.add("ok", passed=True, lower=0.25)
    writer = ReportWriter(tmp_path)
    first = writer.write_report(rep, elapsed=0.1).read_bytes()
    second = writer.write_report(rep, elapsed=0.2).read_bytes()
    assert first == second
    meta = json.loads((tmp_path / "demo.meta.json").read_text())
    assert meta["experiment"] == "demo" and "written_at" in meta


def test_series_csv_format(tmp_path):
    path = ReportWriter(tmp_path).write_series("s", np.array([0.0, 1 / 3]), np.array([1.0, 2.0]), np.array([0.5, 0.1]))
    lines = path.read_text().splitlines()
    assert lines[0] == "x,value,value2"
    assert lines[2].split(",")[0] == "0.33333333333333331"
