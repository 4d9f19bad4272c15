import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from phimf.cli import main
from phimf.matrix import write_matrix, write_vector
from phimf.scalar import TWO_PI


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(body))))


def test_tables_rows_and_format(capsys):
    code, out, err = run(capsys, "tables", "--example", "tridiag", "--dims", "32,48")
    assert code == 0 and err == ""
    table = rows(out)
    assert table[0] == ["d", "err_p", "err_r"]
    assert [r[0] for r in table[1:]] == ["32", "48"]
    for line in out.splitlines():
        assert line == line.rstrip()
    for r in table[1:]:
        for cell in r[1:]:
            assert repr(float(cell)) == cell  # shortest round-trip decimal
    assert 1e-1 < float(table[1][1]) < 1 and 1e-13 < float(table[1][2]) < 1e-11


def test_tables_deterministic_across_thread_counts(capsys, monkeypatch):
    monkeypatch.setenv("PHIMF_THREADS", "1")
    _, serial, _ = run(capsys, "tables", "--example", "kms", "--dims", "20,12,16")
    monkeypatch.setenv("PHIMF_THREADS", "3")
    _, parallel, _ = run(capsys, "tables", "--example", "kms", "--dims", "20,12,16")
    assert serial == parallel
    assert [r[0] for r in rows(serial)[1:]] == ["20", "12", "16"]


def test_bad_thread_setting(capsys, monkeypatch):
    monkeypatch.setenv("PHIMF_THREADS", "zero")
    code, out, err = run(capsys, "tables", "--dims", "8")
    assert code == 2 and out == "" and "PHIMF_THREADS" in err


@pytest.mark.parametrize("argv", [
    ["tables", "--example", "tridiag", "--dims", "1"],
    ["tables", "--dims", "600"],
    ["tables", "--dims", "16", "--N", "2", "--m", "3"],
    ["companion", "--d", "1"],
    ["zeros", "--s", "500"],
    ["zeros", "--n", "-1"],
    ["scalar", "--points", "0"],
    ["decay", "--d", "30", "--row", "40"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["tables", "--bogus"])
    assert exc.value.code == 2
    assert capsys.readouterr().out == ""


def test_companion_divergent_cell(capsys):
    code, out, _ = run(capsys, "companion", "--d", "16", "--gammas", "2,64",
                       "--orders", "50,400")
    assert code == 0
    table = rows(out)
    assert table[0] == ["gamma", "N", "err_p", "err_r"]
    assert [(r[0], r[1]) for r in table[1:]] == [("2.0", "50"), ("2.0", "400"),
                                                ("64.0", "50"), ("64.0", "400")]
    assert table[4][2] == "divergent"
    assert float(table[4][3]) < 1e-9


def test_json_output_and_file(capsys, tmp_path):
    target = tmp_path / "t.json"
    code, out, _ = run(capsys, "tables", "--dims", "12", "--format", "json",
                       "--output", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["columns"] == ["d", "err_p", "err_r"] and data["rows"][0][0] == 12


def test_decay_output(capsys):
    code, out, _ = run(capsys, "decay", "--d", "40", "--s", "20")
    assert code == 0
    assert out.startswith("# row 20")
    table = rows(out)
    assert table[0] == ["offset", "actual_max_abs", "thm3_bound", "bestpoly_bound"]
    offsets = [int(r[0]) for r in table[1:]]
    assert offsets == list(range(7, 21))
    assert all(float(r[1]) <= float(r[2]) for r in table[1:])


def test_decay_from_file(capsys, tmp_path):
    from phimf.matrix import build_tridiag_toeplitz
    path = tmp_path / "A.txt"
    write_matrix(path, build_tridiag_toeplitz(30, -0.4, 0.1, -0.4))
    code, out, _ = run(capsys, "decay", "--matrix", str(path), "--n", "2", "--s", "10")
    assert code == 0 and "violations: 0" in out


def test_zeros_output(capsys):
    code, out, _ = run(capsys, "zeros", "--n", "1", "--s", "5")
    table = rows(out)
    assert code == 0 and table[0] == ["re", "im"] and len(table) == 1 + 12
    z = np.array([complex(float(a), float(b)) for a, b in table[1:]])
    assert np.allclose(np.sort_complex(z), np.sort_complex(z.conj()))


def test_scalar_output(capsys):
    code, out, _ = run(capsys, "scalar")
    table = rows(out)
    assert code == 0 and table[0] == ["x", "psi1", "psi_ns", "abs_error"]
    assert len(table) == 1001
    assert float(table[1][0]) == pytest.approx(-3 * np.pi)
    code, out, _ = run(capsys, "scalar", "--n", "20", "--s", "0", "--points", "5",
                       "--imag-points", "3", "--imag-min", "-6.283185307179586",
                       "--imag-max", "6.283185307179586")
    table = rows(out)
    assert len(table) == 1 + 15 and len(table[0]) == 7


def test_scalar_complex_grid_marks_poles(capsys):
    code, out, _ = run(capsys, "scalar", "--points", "3", "--xmin", "-1", "--xmax", "1",
                       "--imag-points", "3", "--imag-min", str(-TWO_PI),
                       "--imag-max", str(TWO_PI))
    table = rows(out)
    assert code == 0
    nan_rows = [r for r in table[1:] if r[2] == "nan"]
    assert len(nan_rows) == 2 and all(float(r[0]) == 0.0 for r in nan_rows)


@pytest.fixture
def bvp_files(tmp_path):
    def make(A, g, h):
        write_matrix(tmp_path / "A.csv", np.atleast_2d(A))
        write_vector(tmp_path / "g.txt", g)
        write_vector(tmp_path / "h.txt", h)
        return ["--matrix", str(tmp_path / "A.csv"), "--g", str(tmp_path / "g.txt"),
                "--h", str(tmp_path / "h.txt")]
    return make


def test_bvp_zero_matrix(capsys, bvp_files):
    files = bvp_files(np.zeros((3, 3)), np.zeros(3), np.ones(3))
    code, out, err = run(capsys, "bvp", *files, "--tau", "1")
    assert code == 0 and err == ""
    data = json.loads(out)
    assert set(data) == {"p", "trajectory", "residual_report"}
    np.testing.assert_allclose(data["p"], np.ones(3), atol=1e-13)
    for pt in data["trajectory"]:
        np.testing.assert_allclose(pt["u"], pt["t"] * np.ones(3), atol=1e-13)
    assert data["residual_report"]["max_residual"] < 1e-8


def test_bvp_scalar_closed_form(capsys, bvp_files, frozen):
    files = bvp_files([[1.0]], [0.0], [1.0])
    code, out, _ = run(capsys, "bvp", *files, "--tau", repr(TWO_PI))
    data = json.loads(out)
    assert code == 0
    assert data["p"][0] == pytest.approx(frozen["bvp_scalar"]["p"], rel=1e-10)
    assert len(data["trajectory"]) == 9


def test_bvp_errors(capsys, bvp_files, tmp_path):
    files = bvp_files(np.eye(2), np.zeros(3), np.ones(2))
    code, _, err = run(capsys, "bvp", *files, "--tau", "1")
    assert code == 2 and "length" in err
    files = bvp_files(np.array([[0.0, -TWO_PI], [TWO_PI, 0.0]]), np.zeros(2), np.ones(2))
    code, out, err = run(capsys, "bvp", *files, "--tau", "1")
    assert code == 3 and out == "" and "dense_lu" in err
    code, _, err = run(capsys, "bvp", *files, "--tau", "1", "--format", "csv")
    assert code == 2
    (tmp_path / "A.csv").write_text("1,2\n3\n")
    code, _, _ = run(capsys, "bvp", *files, "--tau", "1")
    assert code == 2
    code, _, _ = run(capsys, "bvp", "--matrix", str(tmp_path / "missing"), "--g", "x", "--h",
                     "y", "--tau", "1")
    assert code == 2


def test_console_entry_points(tmp_path):
    for cmd in (["phimf"], [sys.executable, "-m", "phimf"]):
        proc = subprocess.run(cmd + ["zeros", "--n", "0", "--s", "2"], capture_output=True,
                              text=True, cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.splitlines()[0] == "re,im"
        assert len(proc.stdout.splitlines()) == 1 + 5
