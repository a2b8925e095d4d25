import json

import pytest

from lorentzhol.cli import main
from lorentzhol.errors import ScenarioError
from lorentzhol.presets import PRESETS, expand_preset, preset_names
from lorentzhol.scenario import (default_tolerances, exit_code, format_report, load_scenario, preset_scenario,
                                 run_scenario, scenario_from_dict)

EXPECTED_STATUS = {"boost-pair-punctured": "failed", "cylinder-codazzi": "conditional",
                   "flat-a-theta-irrational": "conditional"}

SCENARIO = """\
schema_version: 1
name: round-flip
chart:
  kind: ppwave
  n: 2
  f:
    - [[0, 2, 0, 0], 1]
    - [[0, 0, 2, 0], 1]
deck:
  generators:
    - {kind: sign-flip, A: [[0, -1], [1, 0]]}
  discontinuity: {kind: trivial}
base: [0, 0, 0, 0]
tasks: [quotient-holonomy, transport]
transport: {loops: 3}
"""


def _write(tmp_path, text, name="s.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


@pytest.mark.parametrize("name", preset_names())
def test_every_preset_runs_with_expected_status(name):
    report = run_scenario(preset_scenario(name))
    assert report["status"] == EXPECTED_STATUS.get(name, "certified")
    assert report["provenance"]["preset"] == name
    assert report["provenance"]["family"] == PRESETS[name][0]


def test_scenario_file_runs_and_orders_tasks(tmp_path):
    s = load_scenario(_write(tmp_path, SCENARIO))
    assert s.tasks == ["transport", "quotient-holonomy"]
    report = run_scenario(s)
    q = report["tasks"]["quotient-holonomy"]
    assert report["status"] == "certified" and exit_code(report) == 0
    assert all(c["agrees"] for c in q["cross_checks"])


def test_unknown_key_reports_line_and_field(tmp_path):
    text = SCENARIO.replace("transport: {loops: 3}", "transport: {loops: 3, speed: 2}")
    with pytest.raises(ScenarioError, match=r"s\.yaml:15: field 'transport\.speed': unknown key"):
        load_scenario(_write(tmp_path, text))
    bad_gen = SCENARIO.replace("kind: sign-flip,", "kind: sign-flip, spin: 1,")
    with pytest.raises(ScenarioError, match=r":11: field 'deck\.generators\.0\.spin'"):
        load_scenario(_write(tmp_path, bad_gen))


def test_validation_errors():
    with pytest.raises(ScenarioError, match="no tasks"):
        scenario_from_dict({"name": "x", "tasks": []})
    with pytest.raises(ScenarioError, match="unknown task"):
        scenario_from_dict({"tasks": ["dance"]})
    with pytest.raises(ScenarioError, match="need a chart"):
        scenario_from_dict({"tasks": ["transport"]})
    with pytest.raises(ScenarioError, match="schema version"):
        scenario_from_dict({"schema_version": 7, "tasks": ["transport"]})
    with pytest.raises(ScenarioError, match="unknown preset"):
        scenario_from_dict({"preset": "nope"})
    with pytest.raises(ScenarioError, match="spin.preset"):
        scenario_from_dict({"tasks": ["spin-check"]})


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "absent.yaml")
    with pytest.raises(ScenarioError, match="invalid YAML"):
        load_scenario(_write(tmp_path, "tasks: [a\n"))
    with pytest.raises(ScenarioError, match="mapping"):
        load_scenario(_write(tmp_path, "- 1\n"))


def test_preset_expansion_merges_overrides():
    data = expand_preset("ppwave-basic", {"loops": 7})
    assert data["transport"]["loops"] == 7 and data["provenance"]["preset"] == "ppwave-basic"
    s = preset_scenario("ppwave-basic", tasks=["transport"], transport={"radius": 0.5})
    assert s.tasks == ["transport"] and s.transport == {"loops": 50, "radius": 0.5}


def test_reports_are_byte_identical_across_runs():
    a = format_report(run_scenario(preset_scenario("boost-quotient")))
    b = format_report(run_scenario(preset_scenario("boost-quotient")))
    assert a == b
    assert "time" not in json.loads(a)["provenance"]


def test_table_format_flattens_keys():
    text = format_report(run_scenario(preset_scenario("cahen-wallach-odd")), "table")
    assert "status" in text and "tasks.quotient-holonomy" in text
    with pytest.raises(ValueError):
        format_report({}, "xml")


def test_refusal_is_a_failed_report_with_witness():
    report = run_scenario(preset_scenario("boost-pair-punctured"))
    assert exit_code(report) == 2
    assert "witness" in json.dumps(report)


def test_tolerance_environment_variable(monkeypatch):
    monkeypatch.setenv("LORENTZHOL_TOL", "1e-8")
    assert default_tolerances()["ode"] == 1e-8


def test_cli_compute_preset_list_and_errors(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["compute", "--preset", "cahen-wallach-odd", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "certified"
    assert main(["compute", "--scenario", str(_write(tmp_path, SCENARIO)), "--format", "table"]) == 0
    assert "quotient-holonomy" in capsys.readouterr().out
    assert main(["compute", "--preset", "cylinder-codazzi"]) == 1
    assert main(["compute", "--preset", "boost-pair-punctured"]) == 2
    capsys.readouterr()
    assert main(["compute", "--preset", "nope"]) == 2
    assert "unknown preset" in capsys.readouterr().err
    assert main(["preset", "list"]) == 0
    assert "screw-5d" in capsys.readouterr().out


def test_cli_tol_flag_reaches_report(capsys, monkeypatch):
    monkeypatch.delenv("LORENTZHOL_TOL", raising=False)
    assert main(["compute", "--preset", "ppwave-basic", "--tol", "1e-9"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["provenance"]["tolerances"]["ode"] == 1e-9
    monkeypatch.delenv("LORENTZHOL_TOL", raising=False)


def test_shipped_scenario_file_runs():
    from pathlib import Path
    path = Path(__file__).resolve().parents[1] / "scenarios" / "round_flip.yaml"
    assert run_scenario(load_scenario(path))["status"] == "certified"


def test_classify_flags_partial_indecomposability_check():
    c = run_scenario(preset_scenario("ppwave-basic"))["tasks"]["classify"]
    assert c["indecomposability"] == {"invariant_null_lines": 1, "nondegenerate_subspaces": "not certified"}
