# tests/test_experiments.py
from __future__ import annotations

import json

import pytest
from typer.testing import CliRunner

from holder_lab.cli import app
from holder_lab.commands.common import parse_params
from holder_lab.core.errors import InvalidParameter, UnknownExperiment
from holder_lab.core.registry import get_experiment, load_experiments
from holder_lab.modules.experiments.schemas import ExperimentSpec, RunRecord
from holder_lab.modules.experiments.service import ExperimentService

CATALOG = {
    "k-solve",
    "almond-build",
    "almond-limsup",
    "almond-liminf",
    "polygon-failure",
    "almond-figures",
    "spike",
    "inserted-constants",
    "kp-bound",
    "dense-approx",
    "lemma-3b",
    "three-ball",
    "no-msummand",
    "ciesielski-biorth",
    "ciesielski-roundtrip",
    "cp-profile",
    "ones-profile",
}


def test_catalog_complete():
    assert CATALOG <= set(load_experiments())
    assert list(load_experiments()) == sorted(load_experiments())


def test_unknown_experiment():
    with pytest.raises(UnknownExperiment):
        get_experiment("no-such-thing")


def test_spec_param_casting():
    spec = ExperimentSpec(name="k-solve", parameters={"depth": "7", "eps": 1, "flag": "yes"})
    assert spec.param("depth", 3) == 7
    assert spec.param("eps", 0.1) == 1.0
    assert spec.param("flag", False) is True
    assert spec.param("missing", 5) == 5
    with pytest.raises(InvalidParameter):
        ExperimentSpec(name="x", parameters={"depth": "deep"}).param("depth", 3)


def test_parse_params():
    assert parse_params(["depth=4", "function=two-arc", "xs=[0, 0.5]"]) == {
        "depth": 4,
        "function": "two-arc",
        "xs": [0, 0.5],
    }


def test_run_writes_reproducible_report(settings, tmp_path):
    svc = ExperimentService(settings)
    spec = ExperimentSpec(name="k-solve", output=tmp_path)
    first = svc.run(spec)
    assert first.passed and first.exit_code == 0
    body = (tmp_path / "k-solve.json").read_bytes()
    assert svc.run(spec).report_path == first.report_path
    assert (tmp_path / "k-solve.json").read_bytes() == body
    doc = json.loads(body)
    assert doc["pass"] is True
    assert doc["parameters"] == {"tol": 1e-12}


def test_run_writes_series(settings, tmp_path):
    rec = ExperimentService(settings).run(
        ExperimentSpec(name="ones-profile", parameters={"N": 65}, output=tmp_path)
    )
    assert rec.passed
    assert rec.series_paths == [str(tmp_path / "ones-profile-profile.csv")]


def test_failures_become_exit_codes(settings, tmp_path):
    svc = ExperimentService(settings)
    bad = svc.run(ExperimentSpec(name="almond-liminf", parameters={"depth": 3, "levels": 5}, output=tmp_path))
    assert bad.exit_code == 3 and "InsufficientDepth" in (bad.error or "")
    unknown = svc.run(ExperimentSpec(name="nope", output=tmp_path))
    assert unknown.exit_code == 2
    assert svc.exit_code([bad, unknown]) == 3


def test_run_many_keeps_order(settings, tmp_path):
    specs = [
        ExperimentSpec(name=n, output=tmp_path)
        for n in ("k-solve", "ciesielski-roundtrip", "spike")
    ]
    records = ExperimentService(settings).run_many(specs, jobs=3)
    assert [r.name for r in records] == ["k-solve", "ciesielski-roundtrip", "spike"]
    assert all(isinstance(r, RunRecord) and r.passed for r in records)


@pytest.mark.parametrize(
    ("name", "params"),
    [
        ("almond-build", {"depth": 3, "norm_depth": 3, "gap_depth": 20}),
        ("almond-limsup", {"depth": 8, "scales": 6}),
        ("almond-liminf", {"depth": 10, "levels": 8}),
        ("almond-figures", {"depth": 2, "samples": 129}),
        ("polygon-failure", {"partitions": 2}),
        ("inserted-constants", {"function": "peak-arcs", "delta": 0.01}),
        ("kp-bound", {"trials": 4}),
        ("dense-approx", {"eps": 0.2, "depth": 3}),
        ("lemma-3b", {"function": "power"}),
        ("lemma-3b", {"function": "two-arc"}),
        ("three-ball", {}),
        ("no-msummand", {"max_candidates": 30}),
        ("ciesielski-biorth", {"N": 64, "levels": 6}),
        ("cp-profile", {"N": 1024, "depth": 6}),
    ],
)
def test_catalog_runs_pass(settings, tmp_path, name, params):
    rec = ExperimentService(settings).run(ExperimentSpec(name=name, parameters=params, output=tmp_path))
    assert rec.error is None
    assert rec.passed


def test_cli_list_and_version():
    runner = CliRunner()
    res = runner.invoke(app, ["list"])
    assert res.exit_code == 0
    assert "k-solve" in res.stdout
    res = runner.invoke(app, ["version"])
    assert res.exit_code == 0 and res.stdout.strip()


def test_cli_run(settings, tmp_path):
    runner = CliRunner()
    res = runner.invoke(app, ["run", "k-solve", "--out", str(tmp_path), "-p", "tol=1e-12"])
    assert res.exit_code == 0
    assert (tmp_path / "k-solve.json").exists()
    assert (tmp_path / "k-solve.meta.json").exists()


def test_cli_unknown_name(settings):
    res = CliRunner().invoke(app, ["run", "nope"])
    assert res.exit_code == 2
