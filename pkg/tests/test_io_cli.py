import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hypframe import exemplars as exm
from hypframe import io
from hypframe.cli import fmt_number, fmt_vector, main
from hypframe.errors import InputError
from hypframe.system import eigenvalues

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- io -------------------------------------------------------------------------


def test_parse_point():
    assert io.parse_point("1, 0,-2.5").tolist() == [1.0, 0.0, -2.5]
    with pytest.raises(InputError):
        io.parse_point("1,x")
    with pytest.raises(InputError):
        io.parse_point("1,2", dim=3)
    with pytest.raises(InputError):
        io.parse_point("1,nan")


def test_malformed_json_reports_line_and_column(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{\n "dim": 2,\n "poly": }\n')
    with pytest.raises(InputError, match=r"line 3, column"):
        io.load(f, "system")


def test_field_paths_in_errors(tmp_path):
    f = tmp_path / "sys.json"
    doc = exm.get("ex3_3").system.to_dict()
    doc["direction"] = [1, 1]
    f.write_text(json.dumps(doc))
    with pytest.raises(InputError, match=r"direction: expected 3 entries"):
        io.load(f, "system")
    doc = exm.get("ex3_3").system.to_dict()
    doc["poly"]["terms"][0]["exp"] = [1, 1]
    f.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="poly"):
        io.load(f, "system")
    doc = exm.get("ex3_3").system.to_dict()
    doc["tol"]["root"] = -1
    f.write_text(json.dumps(doc))
    with pytest.raises(InputError, match=r"tol.root"):
        io.load(f, "system")


def test_frame_and_matrix_formats(tmp_path):
    f = tmp_path / "frame.json"
    f.write_text('{"elements": [[1, 0], [0, 1]], "kind": "diagonal"}')
    with pytest.raises(InputError, match="kind"):
        io.load(f, "frame")
    f.write_text('{"rows": [[1, 0], [0]]}')
    with pytest.raises(InputError, match=r"rows\[1\]"):
        io.load(f, "matrix")


def test_system_roundtrip(tmp_path):
    sys_ = exm.get("sym3").system
    f = tmp_path / "sym3.json"
    f.write_text(json.dumps(io.system_to_json(sys_)))
    loaded = io.load(f, "system")
    x = np.arange(6.0)
    assert np.allclose(eigenvalues(loaded, x).values, eigenvalues(sys_, x).values)


# -- formatting --------------------------------------------------------------------


def test_number_formatting():
    assert fmt_vector([0.75, 5.5e-17, -1e-16]) == "0.75 0 0"
    assert fmt_number(1 / 3) == "0.333333333333"
    assert fmt_number(-2.0) == "-2"


# -- cli ---------------------------------------------------------------------------


def test_eig_prints_spectrum(capsys):
    code, out, _ = run(capsys, "eig", "ex4_4", "1,0,0,0")
    assert code == 0 and out.strip() == "0.75 0 0"


def test_frame_verify_file(capsys):
    code, out, _ = run(capsys, "frame-verify", "exR3E2", str(ROOT / "frames" / "e2_frame"), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["verified"]
    assert np.allclose(doc["gram"], np.eye(2), atol=1e-8)


def test_frame_verify_rejection_exit_code(capsys, tmp_path):
    f = tmp_path / "frame.json"
    f.write_text('{"elements": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "kind": "jordan"}')
    code, out, _ = run(capsys, "frame-verify", "ex4_4", str(f))
    assert code == 1 and "not primitive" in out


def test_majorize(capsys):
    assert run(capsys, "majorize", "1,1", "2,0")[:2] == (0, "true\n")
    assert run(capsys, "majorize", "2,0", "1,1")[:2] == (1, "false\n")
    code, out, _ = run(capsys, "majorize", "1,2,3", "0,0,6", "--transfer", "--format", "json")
    D = np.array(json.loads(out)["doubly_stochastic"])
    assert code == 0 and np.allclose(D @ [0, 0, 6], [1, 2, 3])


def test_usage_and_input_errors(capsys):
    assert run(capsys, "eig", "ex4_4", "1,0,0")[0] == 2
    assert run(capsys, "eig", "no_such_system", "1")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "derive", "exR3E3", "5")[0] == 2
    code, _, err = run(capsys, "frame-verify", "ex3_2")
    assert code == 2 and "frame" in err


def test_malformed_file_exit_code(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text("{ not json")
    code, _, err = run(capsys, "eig", str(f), "1,2")
    assert code == 2 and "line 1" in err


def test_simple_queries(capsys):
    assert run(capsys, "cone", "exR3E3", "1,0,2")[1].startswith("boundary")
    assert run(capsys, "rank", "exR3E3", "1,0,2")[1].strip() == "2"
    assert run(capsys, "trace", "ex4_4", "1,1,1,1")[1].strip() == "3"
    assert run(capsys, "ip", "ex3_4", "1,2,3", "1,1,1")[1].strip() == "7"
    assert run(capsys, "derive", "exR3E3", "1", "--point", "1,1,1")[1].strip() == "1 1"
    assert run(capsys, "eig", "sym2", "1,2,0", "--path", "oracle")[1].strip() == "2 1"


def test_certify_minimal(capsys):
    code, out, _ = run(capsys, "certify-minimal", "exR3E3", "--samples", "500", "--format", "json")
    assert code == 0 and json.loads(out)["issued"]
    code, out, _ = run(capsys, "certify-minimal", "ex4_4", "--format", "json")
    assert code == 0


def test_tuple_build_t_and_sweeps(capsys, tmp_path):
    frame = exm.get("sym2").known_frames[0].elements
    t = tmp_path / "tuple.json"
    t.write_text(json.dumps({"elements": frame.tolist()}))
    m = tmp_path / "D.json"
    m.write_text(json.dumps({"rows": [[0.7, 0.3], [0.3, 0.7]]}))
    f = tmp_path / "frame.json"
    f.write_text(json.dumps({"elements": frame.tolist(), "kind": "jordan"}))
    assert run(capsys, "tuple-verify", "sym2", str(t))[0] == 0
    code, out, _ = run(capsys, "build-t", "sym2", str(f), str(t), str(m), "--samples", "100", "--format", "json")
    assert code == 0 and json.loads(out)["majorization"]["holds"]
    assert run(capsys, "schur-sweep", "sym3", "--samples", "100")[0] == 0
    code, out, _ = run(capsys, "adjoint-s-sweep", "sym3", "--samples", "50", "--format", "json")
    assert code == 0 and json.loads(out)["label"] == "EXPLORATORY"


def test_hyperbolic_check_failure(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"dim": 2, "poly": {"dim": 2, "terms": [
        {"exp": [2, 0], "coef": 1}, {"exp": [0, 2], "coef": 1}]}, "direction": [1, 0]}))
    code, out, _ = run(capsys, "hyperbolic-check", str(f), "--samples", "20")
    assert code == 1 and "holds: false" in out


def test_export_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "ex3_4")
    f = tmp_path / "ex.json"
    f.write_text(out)
    assert code == 0
    assert run(capsys, "eig", str(f), "2,1,3")[1].strip() == "3 2 2 1"


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("HYPER_SEED", "17")
    code, out, _ = run(capsys, "hyperbolic-check", "exR3E3", "--samples", "10", "--format", "json")
    assert json.loads(out)["seed"] == 17
    monkeypatch.setenv("HYPER_SEED", "x")
    assert run(capsys, "eig", "exR3E3", "1,2,3")[0] == 2


def test_suite_single_exemplar(capsys):
    code, out, _ = run(capsys, "suite", "--exemplar", "exR2E2", "--samples", "50", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["passed"]
    assert doc["config"]["seed"] == 0 and doc["config"]["samples"] == 50
    assert all({"id", "citation", "verdict", "margin", "seed"} <= set(c) for c in doc["checks"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hypframe", "eig", "ex4_4", "1,0,0,0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.strip() == "0.75 0 0"
