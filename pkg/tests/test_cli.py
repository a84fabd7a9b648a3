import json
import subprocess
import sys

import pytest

from polyfix.cli import INPUT_ERROR, NEGATIVE, OK, VIOLATION, main
from polyfix.instances import em_2_1, ex_2_1
from polyfix.metric import instance_to_dict


def _write(tmp_path, inst, name="inst.json", k=None):
    doc = instance_to_dict(inst.space, inst.map)
    if k is not None:
        doc["k"] = k
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_validate(tmp_path, capsys):
    good = _write(tmp_path, em_2_1())
    assert main(["validate", good]) == OK
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"distances": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}))
    capsys.readouterr()
    assert main(["validate", str(bad), "--json"]) == NEGATIVE
    doc = json.loads(capsys.readouterr().out)
    assert doc["violations"][0]["axiom"] == "triangle"


def test_classify_exit_codes(tmp_path, capsys):
    path = _write(tmp_path, em_2_1(), k=4)
    assert main(["classify", path]) == NEGATIVE
    assert main(["classify", path, "--class", "total_pairwise"]) == OK
    capsys.readouterr()
    main(["classify", path, "--json"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["results"]["perimetric"]["infimum"] == "8/7"
    assert doc["results"]["perimetric"]["witness"] == ["x1", "x2", "x4", "x3"]


def test_json_is_byte_identical(tmp_path, capsys):
    path = _write(tmp_path, ex_2_1())
    main(["classify", path, "--k", "4", "--json"])
    first = capsys.readouterr().out
    main(["classify", path, "--k", "4", "--json"])
    assert capsys.readouterr().out == first


def test_dynamics_and_theorems(tmp_path, capsys):
    path = _write(tmp_path, ex_2_1(), k=7)
    assert main(["dynamics", path]) == NEGATIVE  # hypotheses fail (period-2 points)
    out = capsys.readouterr().out
    assert "prime period 3: ['x4', 'x5', 'x6']" in out
    assert main(["theorems", path]) == OK


def test_input_errors(tmp_path, capsys):
    assert main(["classify", str(tmp_path / "missing.json"), "--k", "4"]) == INPUT_ERROR
    path = _write(tmp_path, em_2_1())
    assert main(["classify", path]) == INPUT_ERROR  # no k anywhere
    assert main(["classify", path, "--k", "9"]) == INPUT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text('{"points": ["a"], "distances": [[0]], "map": {"a": "b"}}')
    assert main(["dynamics", str(bad), "--k", "3"]) == INPUT_ERROR
    assert "map['a']" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["fuzz", "--n", "x..y"])
    assert exc.value.code == INPUT_ERROR


def test_fuzz_cli(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["fuzz", "--trials", "50", "--seed", "4", "--out", str(out)]) in (OK, NEGATIVE)
    doc = json.loads(out.read_text())
    assert doc["config"]["trials"] == 50 and doc["violations"] == []
    assert main(["fuzz", "--k", "2..3"]) == INPUT_ERROR


def test_iterate_cli(tmp_path, capsys):
    csv_path = tmp_path / "trace.csv"
    code = main(["iterate", "--map", "affine", "--x0", "0", "--csv", str(csv_path),
                 "--uniqueness-region=-10:10", "--json"])
    assert code == OK
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["limit"][0] - 2) < 1e-6 and doc["uniqueness"]["unique"]
    assert csv_path.read_text().startswith("step,x,r_n,bound,kannan_bound")
    assert main(["iterate", "--map", "linear", "--param", "a", "--x0", "1"]) == INPUT_ERROR
    assert main(["iterate", "--map", "nope", "--x0", "1"]) == INPUT_ERROR


def test_repro_all(capsys):
    assert main(["repro", "all"]) == OK
    out = capsys.readouterr().out
    assert "MISMATCH" not in out and "x5, x6, x7" in out
    assert main(["repro", "unknown"]) == INPUT_ERROR


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polyfix", "repro", "em_2_1", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["instances"][0]["id"] == "em_2_1"
