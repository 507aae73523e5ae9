import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from plankzone.cli import build_parser, main


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def extremal_file(tmp_path):
    def make(n):
        path = tmp_path / f"ex{n}.json"
        assert run("gen", "--extremal", n, "-o", path)[0] == 0
        return path

    return make


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


def test_gen_extremal_three():
    code, text = run("gen", "--extremal", 3)
    assert code == 0
    V = np.array(json.loads(text)["vectors"])
    np.testing.assert_allclose(np.arctan2(V[:, 1], V[:, 0]), [0, math.pi / 3, 2 * math.pi / 3], atol=1e-15)


def test_gen_random_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("gen", "--random", 5, 3, "--seed", 7, "-o", a)
    run("gen", "--random", 5, 3, "--seed", 7, "-o", b)
    assert a.read_bytes() == b.read_bytes()
    V = np.array(json.loads(a.read_text())["vectors"])
    assert V.shape == (5, 3)
    np.testing.assert_allclose(np.linalg.norm(V, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("argv", [("gen", "--extremal", 0), ("gen", "--random", 0, 2), ("gen",), ("bogus",)])
def test_gen_invalid_exit_2(argv, capsys):
    assert run(*argv)[0] == 2


def test_verify_extremal_four(extremal_file):
    code, text = run("verify", extremal_file(4))
    rep = json.loads(text)
    assert code == 0 and rep["overall"] and rep["schema"] == "1"
    assert rep["witness"]["min_margin"] == pytest.approx(2 * math.sin(math.pi / 8), abs=1e-9)


def test_verify_orthonormal(tmp_path):
    path = write(tmp_path, "I3.json", {"vectors": np.eye(3).tolist()})
    code, text = run("verify", path, "--oracle")
    rep = json.loads(text)
    assert code == 0
    np.testing.assert_allclose(rep["witness"]["unit_margins"], 1 / math.sqrt(3), atol=1e-12)
    assert rep["oracle"]["ok"]


def test_verify_is_byte_identical(extremal_file):
    path = extremal_file(5)
    assert run("verify", path, "--seed", 3)[1] == run("verify", path, "--seed", 3)[1]


def test_verify_bound_failure_exit_1(extremal_file):
    # a negative tolerance demands more than the sharp bound
    code, text = run("verify", extremal_file(3), "--tol", -1e-3)
    assert code == 1
    assert json.loads(text)["overall"] is False


def test_verify_corrupt_json_exit_2(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{"vectors": [[1, 0],\n')
    assert run("verify", path)[0] == 2
    assert "line" in capsys.readouterr().err


def test_verify_csv_parse_error_names_position(tmp_path, capsys):
    path = write(tmp_path, "bad.csv", "1,0\n0,x\n")
    assert run("verify", path)[0] == 2
    assert "line 2, column 2" in capsys.readouterr().err


def test_verify_non_unit_rows(tmp_path, capsys):
    path = write(tmp_path, "v.csv", "2,0\n0,1\n")
    assert run("verify", path)[0] == 2
    assert "row 0" in capsys.readouterr().err
    assert run("verify", path, "--normalize")[0] == 0


def test_verify_missing_file(capsys):
    assert run("verify", "/nonexistent/file.json")[0] == 2


def test_inv_eigen_all_identity(tmp_path):
    path = write(tmp_path, "g.json", {"gram": np.eye(3).tolist()})
    code, text = run("inv-eigen", path, "--all")
    assert code == 0 and json.loads(text)["count"] == 8


def test_inv_eigen_quadrant(extremal_file):
    code, text = run("inv-eigen", extremal_file(3), "--quadrant", "++-")
    sol = json.loads(text)["solutions"][0]
    np.testing.assert_allclose(sol["w"], [0.57735, 1.15470, -1.15470], atol=1e-5)
    assert code == 0 and sol["residual"] <= 1e-10


def test_inv_eigen_empty_quadrant(extremal_file):
    code, text = run("inv-eigen", extremal_file(3), "--quadrant", "+-+")
    assert code == 0 and json.loads(text)["exists"] is False


def test_inv_eigen_bad_pattern(extremal_file):
    assert run("inv-eigen", extremal_file(3), "--quadrant", "++")[0] == 2
    assert run("inv-eigen", extremal_file(3), "--quadrant", "+x-")[0] == 2


def test_inv_eigen_dual_singular_exit_1(extremal_file, capsys):
    assert run("inv-eigen", extremal_file(3), "--dual")[0] == 1
    assert "unsupported" in capsys.readouterr().err


def test_inv_eigen_dual_invertible(tmp_path):
    path = write(tmp_path, "v.json", {"vectors": np.eye(4).tolist()})
    code, text = run("inv-eigen", path, "--dual")
    assert code == 0 and json.loads(text)["solutions"][0]["sharp_bound"]


def test_trace(extremal_file):
    code, text = run("trace", extremal_file(4), "--samples", 8)
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0
    assert rows[0] == ["theta", "T", "dT", "d2T", "Q", "quadform"]
    body = np.array(rows[1:], dtype=float)
    assert body.shape == (8, 6)
    assert body[0, 1] == 1.0
    assert abs(body[0, 4]) <= 1e-12 and abs(body[4, 4]) <= 1e-12  # theta = 0 and pi
    np.testing.assert_allclose(body[:, 5], 4.0, atol=1e-9)


def test_trace_custom_vector(tmp_path, extremal_file):
    vec = write(tmp_path, "v.json", [1.0, -1.0, 1.0, -1.0])
    code, text = run("trace", extremal_file(4), "--vector", vec, "--samples", 4)
    assert code == 0 and len(text.splitlines()) == 5
    bad = write(tmp_path, "w.json", [1.0, 2.0])
    assert run("trace", extremal_file(4), "--vector", bad)[0] == 2


def test_trace_degenerate_slice_exit_2(extremal_file):
    # for n = 3 extremal, m_00 = 1/n so the first coordinate slice is degenerate
    assert run("trace", extremal_file(3), "--slice", 0)[0] == 2
    assert run("trace", extremal_file(3), "--slice", 7)[0] == 2


def test_zones_extremal(extremal_file):
    path = extremal_file(3)
    code, text = run("zones", "--from-vectors", path, "--width", math.pi / 3)
    rep = json.loads(text)
    assert code == 0 and rep["covered"] and rep["total_width"] == pytest.approx(math.pi)
    code, text = run("zones", "--from-vectors", path, "--width", 0.95 * math.pi / 3)
    rep = json.loads(text)
    assert code == 0 and not rep["covered"] and rep["uncovered_point"] is not None


def test_zones_file_and_errors(tmp_path):
    z = write(tmp_path, "z.json", {"zones": [{"normal": [0, 0, 1], "width": 3.0}]})
    assert run("zones", z)[0] == 0
    assert run("zones", write(tmp_path, "e.json", {"zones": []}))[0] == 2
    assert run("zones", write(tmp_path, "b.json", {"zones": [{"normal": [0, 0, 1]}]}))[0] == 2
    assert run("zones")[0] == 2


def test_env_seed(monkeypatch):
    monkeypatch.setenv("PLANKZONE_SEED", "42")
    assert build_parser().parse_args(["verify", "x"]).seed == 42
    monkeypatch.delenv("PLANKZONE_SEED")
    assert build_parser().parse_args(["verify", "x"]).seed == 0


def test_help_documents_every_flag():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.choices and "verify" in a.choices).choices
    for name, p in sub.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} lacks help"


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "plankzone.cli", "gen", "--extremal", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["vectors"][0] == [1.0, 0.0]
