import json
import math
from pathlib import Path

import pytest

from statefilter.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(capsys):
    code, out, _ = run(["analyze", "--n", "3", "--k", "2", "--eta1", "0.125"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1
    assert rep["Qpovm"] == pytest.approx(0.21651, abs=1e-5)
    assert rep["Q1"] == pytest.approx(0.21875, abs=1e-12)
    assert rep["Q2"] == pytest.approx(0.21875, abs=1e-12)
    assert rep["chosen"] == "POVM"


def test_analyze_sweep_csv(capsys):
    code, out, _ = run(["analyze", "--n", "3", "--k", "2", "--sweep", "eta1=0.05:0.5:4",
                        "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "eta1,Q1,Q2,Qpovm,chosen,Q,q1_opt"
    assert [l.split(",")[4] for l in lines[1:]] == ["VN1", "VN2", "VN2", "VN2"]


def test_thresholds(capsys):
    code, out, _ = run(["thresholds", "--n", "3", "--k", "2"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["zeta1"] == pytest.approx(0.16) and rep["zeta2"] == pytest.approx(3 / 31)
    sw = rep["switches"]
    assert [(s["from"], s["to"]) for s in sw] == [("VN1", "POVM"), ("POVM", "VN2")]
    assert abs(sw[0]["eta1"] - 3 / 31) <= rep["grid_step"]


def test_ensemble(capsys):
    code, out, _ = run(["ensemble", "--n", "3", "--k", "2", "--eta1", "0.125"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["Sb_closed"] == pytest.approx(0.09375, abs=1e-12)
    assert rep["Sb_bruteforce"] == pytest.approx(0.09375, abs=1e-12)


def test_ensemble_csv(capsys):
    code, out, _ = run(["ensemble", "--n", "3", "--k", "2", "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[2] == "1,40,0.0,0.0"


def test_classify_and_encode(capsys):
    code, out, _ = run(["classify", "--table", "00000011"], capsys)
    assert code == 0 and json.loads(out)["wk"] == {"k": 2, "polarity": 0}
    code, out, _ = run(["classify", "--hex", "03", "--n", "3"], capsys)
    assert json.loads(out)["table"] == "00000011"
    code, out, _ = run(["encode", "--n", "3", "--k", "2"], capsys)
    state = json.loads(out)["state"]
    assert state[-1] == pytest.approx(-1 / math.sqrt(8))


def test_basis(capsys):
    code, out, _ = run(["basis", "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["rows"][3] == [0.5, -0.5, -0.5, 0.5]
    code, out, _ = run(["basis", "--n", "2", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "p,j,x0,x1,x2,x3"


def test_simulate(capsys):
    code, out, _ = run(["simulate", "--n", "3", "--k", "2", "--eta1", "0.125",
                        "--trials", "100000", "--seed", "42"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["misidentifications"] == 0
    assert rep["comparison"]["passed"]


@pytest.mark.parametrize("q1", ["0.75", "0.8", "1.0"])
def test_synth_golden(q1, tmp_path):
    out = tmp_path / "d.json"
    assert main(["synth", "--example", "--q1", q1, "-o", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / f"synth_k2_q1_{q1}.json").read_bytes()


def test_same_config_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["simulate", "--n", "3", "--k", "2", "--trials", "50000", "--seed", "9"]
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv, code, kind", [
    (["analyze", "--n", "3"], 2, "bad-args"),
    (["analyze", "--n", "3", "--k", "5", "--eta1", "0.1"], 2, "bad-args"),
    (["analyze", "--n", "3", "--k", "2", "--eta1", "1.5"], 2, "bad-args"),
    (["nonsense"], 2, "bad-args"),
    (["analyze", "--n", "x"], 2, "bad-args"),
    (["synth", "--example", "--q1", "0.5"], 3, "not-psd"),
    (["ensemble", "--n", "5", "--k", "2"], 4, "cap-exceeded"),
])
def test_error_paths(argv, code, kind, capsys):
    got, out, err = run(argv, capsys)
    assert got == code
    obj = json.loads(err)
    assert obj["error"]["code"] == code and obj["error"]["kind"] == kind


def test_validation_failure_exit(capsys, monkeypatch):
    from statefilter import povm_synthesis

    class Bad:
        passed = False

        def to_json(self):
            return {"passed": False}

    monkeypatch.setattr(povm_synthesis, "validate_dilation", lambda d, p: Bad())
    got, _, err = run(["synth", "--example", "--q1", "0.8"], capsys)
    assert got == 5
    assert json.loads(err)["error"]["kind"] == "validation-failure"
