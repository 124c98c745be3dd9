import json
import subprocess
import sys

import pytest

from helpers import schema_validator
from remetrika.cli import main
from remetrika.instance import fixture, serialize_instance


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


@pytest.mark.parametrize("name", ["T1", "T2", "T4", "T5"])
def test_check_accepts(capsys, name):
    code, doc = run_json(capsys, "check", name)
    assert code == 0 and doc["has_attractor"] and doc["condition_a"] is True
    schema_validator("check.schema.json").validate(doc)


def test_check_rejects_swap(capsys):
    code, doc = run_json(capsys, "check", "T3")
    assert code == 1 and doc["condition_a"] == {"lasso": "(1)"}
    assert doc["lasso_min_image"] == 2 and doc["lasso_checked_prefixes"] == 3 * doc["states"]
    schema_validator("check.schema.json").validate(doc)


def test_malformed_input_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type":"finite","points":2,"maps":[[0,5]]}')
    code, out, err = run(capsys, "check", str(bad))
    assert code == 2 and "$.maps[0][1]" in err
    assert run(capsys, "check", str(tmp_path / "nope.json"))[0] == 2
    assert run(capsys, "frobnicate", "T1")[0] == 2
    assert run(capsys, "metric", "T2", "--mu", "geometric:3")[0] == 2
    assert run(capsys, "wong", "T4", "--alpha", "1")[0] == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_metric_csv(capsys):
    code, out, _ = run(capsys, "metric", "T2", "--mu", "geometric:1/2")
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0 and rows[0][1] == "1/2" and rows[0][2] == "1"
    code, out, _ = run(capsys, "metric", "T2", "--depth", "0")
    rows = [line.split(",") for line in out.splitlines()]
    assert all(rows[x][y] == "1" for x in range(4) for y in range(4) if x != y)
    assert run(capsys, "metric", "T3")[0] == 1


def test_metric_json_and_float(capsys, tmp_path):
    code, doc = run_json(capsys, "metric", "T5", "--format", "json", "--float")
    assert code == 0 and doc["matrix"][0][1] == "1/2" and doc["matrix_float"][0][1] == 0.5
    schema_validator("matrix.schema.json").validate(doc)
    out = tmp_path / "m.csv"
    assert main(["metric", "T5", "--float", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "0,1/2,1"
    assert (tmp_path / "m.float.csv").read_text().splitlines()[0] == "0.0,0.5,1.0"


def test_metric_on_affine_instance(capsys):
    code, doc = run_json(capsys, "metric", "sierpinski", "--format", "json", "--samples", "12", "--depth", "2")
    assert code == 0 and doc["exact"] is False and doc["points"] == 12
    schema_validator("matrix.schema.json").validate(doc)


def test_remetrize(capsys, tmp_path):
    code, doc = run_json(capsys, "remetrize", "T2", "--float")
    assert code == 0 and doc["ok"] and all(c["pass"] for c in doc["checks"].values())
    schema_validator("certificate.schema.json").validate(doc)
    assert run(capsys, "remetrize", "T3")[0] == 1
    code, doc = run_json(capsys, "remetrize", "T5", "--single", "--alpha", "1/2")
    assert doc["bessaga"]["matrix"][0][1] == "1/2"
    assert run(capsys, "remetrize", "T2", "--single")[0] == 2
    code, out, _ = run(capsys, "remetrize", "T1", "--format", "csv")
    assert out.splitlines()[:2] == ["t,value,slope", "0,0,0"]


def test_remetrize_figures(capsys, tmp_path):
    figs = tmp_path / "figs"
    assert run(capsys, "remetrize", "T2", "--figures", str(figs))[0] == 0
    assert {p.name for p in figs.iterdir()} == {"phi.csv", "d.csv", "phi.png", "d.png"}
    assert (figs / "phi.png").read_bytes()[:4] == b"\x89PNG"


def test_bessaga_and_wong(capsys):
    code, out, _ = run(capsys, "bessaga", "T5")
    assert code == 0 and out.splitlines() == ["0,1/2,1", "1/2,0,1", "1,1,0"]
    assert run(capsys, "bessaga", "T3")[0] == 1
    assert run(capsys, "wong", "T4", "--alpha", "9/10")[0] == 0
    assert run(capsys, "wong", "T1")[0] == 1


def test_unbounded(capsys, tmp_path):
    inst = tmp_path / "chain.json"
    inst.write_text(json.dumps({"type": "finite", "points": 4, "maps": [[0, 0, 1, 2]]}))
    code, doc = run_json(capsys, "unbounded", str(inst), "--x1", "[0,1]", "--a", "1/2")
    assert code == 0 and doc["ok"] and doc["D"][3][2] == "4" and doc["levels"] == ["inside", "inside", 1, 2]
    schema_validator("unbounded.schema.json").validate(doc)
    x1 = tmp_path / "x1.json"
    x1.write_text("[0, 1]")
    figs = tmp_path / "f"
    assert run(capsys, "unbounded", str(inst), "--x1", str(x1), "--figures", str(figs))[0] == 0
    assert {p.name for p in figs.iterdir()} == {"psi.csv", "D.csv", "psi.png", "D.png"}
    assert run(capsys, "unbounded", str(inst), "--x1", "[0,true]")[0] == 2
    assert run(capsys, "unbounded", str(inst), "--x1", "[0")[0] == 2
    assert run(capsys, "unbounded", "T2", "--x1", "[0]")[0] == 1


@pytest.mark.parametrize("name, depth", [("T2", "3"), ("T4", "4"), ("T1", "3")])
def test_verify(capsys, name, depth):
    code, doc = run_json(capsys, "verify", name, "--depth", depth)
    assert code == 0 and doc["ok"]
    schema_validator("verify.schema.json").validate(doc)
    suites = {c["suite"] for c in doc["checks"]}
    assert {"cylinders", "chain-metric", "remetrize", "converse"} <= suites
    if name == "T4":
        assert any(c["id"] == "wong" and c["pass"] for c in doc["checks"])


def test_render_gates(capsys):
    assert run(capsys, "render", "T1")[0] == 2
    assert run(capsys, "check", "sierpinski")[0] == 2


def test_outputs_are_deterministic(capsys, tmp_path):
    a = run(capsys, "remetrize", "T2")[1]
    b = run(capsys, "remetrize", "T2")[1]
    assert a == b


def test_console_script(tmp_path):
    p = tmp_path / "t2.json"
    p.write_text(serialize_instance(fixture("T2")))
    proc = subprocess.run([sys.executable, "-m", "remetrika.cli", "check", str(p)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["has_attractor"]
