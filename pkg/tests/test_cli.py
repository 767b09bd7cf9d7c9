import csv
import io
import json
import math

import jsonschema
import pytest

from nevlab import cli
from nevlab.errors import NonConvergent
from nevlab.schemas import BY_COMMAND, ERROR


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def smt_instance(tmp_path):
    p = tmp_path / "smt.json"
    p.write_text(json.dumps({"curve": ["1", "exp(z)"], "hyperplanes": [["1", "0"], ["0", "1"], ["1", "-1"]]}))
    return str(p)


def test_analyze_csv_closed_form(capsys):
    code, out = run(capsys, "analyze", "exp(z)", "--a", "inf", "--radii", "1:40:20", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 20
    for r in rows:
        assert float(r["T"]) == pytest.approx(float(r["r"]) / math.pi, rel=1e-9)


def test_quotient_entire_example(capsys):
    code, d = run_json(capsys, "quotient", "exp(2*z)-1", "exp(z)-1", "--radius", "10")
    assert code == 0
    assert d["certificate"]["verdict"] == "EntireUpTo"
    assert d["relation"]["relation"] == [1, -2]
    jsonschema.validate(d, BY_COMMAND["quotient"])


def test_quotient_expect_entire_fails_on_witness(capsys):
    argv = ["quotient", "exp(sqrt(2)*z)-1", "exp(z)+1", "--radius", "4", "--float"]
    code, d = run_json(capsys, *argv)
    assert code == 0 and d["verdict"] == "CONSISTENT"
    code, d = run_json(capsys, *argv, "--expect-entire")
    assert code == 1 and d["certificate"]["verdict"] == "NotEntire"


def test_bounds_example(capsys):
    code, d = run_json(capsys, "bounds", "--l", "1", "--m", "2", "--s", "2", "--t", "3", "--a", "1")
    assert code == 0 and d["n1"] == 19044
    jsonschema.validate(d, BY_COMMAND["bounds"])


def test_every_command_validates_against_schema(capsys, smt_instance, tmp_path):
    moving = tmp_path / "moving.json"
    moving.write_text(json.dumps({"curve": ["1", "exp(z)"], "hyperplanes": [["1", "0"], ["0", "1"], ["1", "-1"]], "t": 0}))
    aux = tmp_path / "aux.json"
    aux.write_text(json.dumps({
        "F": {"coeffs": ["1", "1"], "bases": ["exp(2*z)"]},
        "G": {"coeffs": ["1", "1"], "bases": ["exp(z)"]},
        "n": 1, "s": 1, "t": 1,
    }))
    cases = {
        "analyze": ["analyze", "exp(z)-1", "--radii", "1:5:3"],
        "zeros": ["zeros", "exp(z)-1", "--radius", "7"],
        "quotient": ["quotient", "exp(z)+1", "exp(z)+1", "--radius", "4"],
        "verify-jensen": ["verify-jensen", "exp(z)-z", "--radii", "1:3:3"],
        "verify-fmt": ["verify-fmt", "exp(z)", "--a", "1", "--radii", "1:10:5"],
        "verify-smt": ["verify-smt", smt_instance, "--radii", "2:10:5"],
        "verify-moving-smt": ["verify-moving-smt", str(moving), "--radii", "2:6:3"],
        "verify-borel": ["verify-borel", "--radii", "1:5:3", "--", "exp(z)", "1", "-exp(z)-1"],
        "bounds": ["bounds", "--l", "1", "--m", "1", "--s", "2", "--t", "1"],
        "aux-map": ["aux-map", str(aux)],
    }
    assert set(cases) == set(BY_COMMAND)
    for name, argv in cases.items():
        code, d = run_json(capsys, *argv)
        assert code == 0, (name, d)
        jsonschema.validate(d, BY_COMMAND[name])


def test_verifier_csv_rows_match_radii(capsys, smt_instance):
    code, out = run(capsys, "verify-smt", smt_instance, "--radii", "2:40:7:log", "--format", "csv")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 7


def test_json_output_deterministic_and_atomic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["verify-fmt", "exp(z)", "--a", "2*i", "--radii", "1:20:6", "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".nevlab-")]


def test_usage_errors_exit_2(capsys):
    for argv in (
        ["zeros", "exp(z", "--radius", "1"],
        ["analyze", "exp(z)", "--radii", "0:5:3"],
        ["analyze", "exp(z)", "--radii", "1:5"],
        ["bounds", "--l", "2", "--m", "1", "--s", "2", "--t", "1"],
        ["verify-smt", "/nonexistent/instance.json"],
        ["frobnicate"],
    ):
        code, d = run_json(capsys, *argv)
        assert code == 2, argv
        jsonschema.validate(d, ERROR)


def test_failed_verifier_exit_1(capsys):
    code, d = run_json(capsys, "verify-jensen", "exp(z)-1", "--radii", "1:3:3", "--tol", "1e-30")
    assert code == 1 and d["status"] == "FAIL"


def test_nonconvergence_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise NonConvergent("refinement cap reached")

    monkeypatch.setattr(cli, "locate_zeros_disk", boom)
    code, d = run_json(capsys, "zeros", "z", "--radius", "1")
    assert code == 3 and d["error"] == "NonConvergent"


def test_moving_truncation_with_Q_override(capsys, tmp_path):
    inst = tmp_path / "m.json"
    inst.write_text(json.dumps({"curve": ["1", "exp(z)"], "hyperplanes": [["1", "0"], ["0", "1"], ["1", "-1"]]}))
    code, d = run_json(capsys, "verify-moving-smt", str(inst), "--truncation", "--Q", "1", "--radii", "2:8:3")
    assert code == 0 and d["params"]["Q"] == 1
    code, d = run_json(capsys, "verify-moving-smt", str(inst), "--Q", "1")
    assert code == 2
