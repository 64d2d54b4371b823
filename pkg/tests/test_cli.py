import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from weyl_torus import cli
from weyl_torus.errors import NumericError, ResourceLimitError
from weyl_torus.golden import golden
from weyl_torus.mpoly import MPoly


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_member_exit_codes(capsys):
    code, rec = run_json(capsys, "member", "-f", "C", "-n", "2", "--point", "0,0")
    assert code == 0 and rec["psd"] and rec["schema"] == "weyl-torus/1"
    assert rec["kind"] == "membership" and rec["status"] == "boundary"  # H(0,0) has rank 1
    code, rec = run_json(capsys, "member", "-f", "C", "-n", "2", "--point", "1,-1")
    assert code == 3 and rec["status"] == "outside"
    code, rec = run_json(capsys, "member", "-f", "c", "-n", "2", "--point", "1,1", "--preimages")
    assert code == 0 and rec["status"] == "boundary" and rec["preimages"]


@pytest.mark.parametrize(
    "argv",
    [
        ["member", "-f", "E", "-n", "2", "--point", "0,0"],
        ["member", "-f", "D", "-n", "2", "--point", "0,0"],
        ["member", "-f", "C", "-n", "2", "--point", "0"],
        ["member", "-f", "C", "-n", "2", "--point", "a,b"],
        ["member", "-f", "C", "-n", "2"],
        ["theta", "-f", "C", "-n", "2"],
        ["raster", "-f", "C", "-n", "2", "--window", "1,0,0,1"],
        ["verify", "--suite", "nonsense"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert "usage" in err


def test_preimage_command(capsys):
    code, rec = run_json(capsys, "preimage", "-f", "B", "-n", "2", "--point=-0.06,0.178")
    assert code == 0 and rec["kind"] == "preimage"
    assert max(rec["residuals"]) <= 1e-9
    assert all(0 <= a < 1 for p in rec["angles"] for a in p)
    code, rec = run_json(capsys, "preimage", "-f", "C", "-n", "2", "--point", "1,-1")
    assert code == 3 and rec["psd"] is False


def test_numeric_failure_exit_4(capsys, monkeypatch):
    import weyl_torus.orbitspace as osp

    def boom(*a, **k):
        raise NumericError("no convergence", {"residual": 1.0})

    monkeypatch.setattr(osp, "preimages", boom)
    code, rec = run_json(capsys, "preimage", "-f", "C", "-n", "2", "--point", "0,0")
    assert code == 4
    assert rec["kind"] == "error" and rec["error"] == "NumericError" and rec["details"]["residual"] == 1.0


def test_resource_failure_exit_4(capsys, monkeypatch):
    import weyl_torus.geometry as geo

    def boom(*a, **k):
        raise ResourceLimitError("group too large")

    monkeypatch.setattr(geo, "weight_phi", boom)
    code, rec = run_json(capsys, "phi", "-f", "B", "-n", "2")
    assert code == 4 and rec["error"] == "ResourceLimitError"


def test_hermite_symbolic_and_value(capsys):
    code, rec = run_json(capsys, "hermite", "-f", "C", "-n", "2")
    assert code == 0 and rec["kind"] == "hermite_matrix" and rec["H"]["n"] == 2
    code, out, _ = run(capsys, "hermite", "-f", "C", "-n", "2", "--text", "--method", "explicit")
    assert out.startswith("H[1,1] = ")
    code, rec = run_json(capsys, "hermite", "-f", "C", "-n", "2", "--point", "1/2,0")
    h = golden("C2.H")
    want = [[str(p(Fraction(1, 2), Fraction(0)) * 8) for p in row] for row in h]
    got = [[str(Fraction(v)) for v in row] for row in rec["H"]]
    assert got == want


def test_theta_command(capsys):
    code, rec = run_json(capsys, "theta", "-f", "C", "-n", "2", "--tangent", "1,0")
    assert code == 0 and [Fraction(v) for v in rec["z"]] == [0, 0]
    code, rec = run_json(capsys, "theta", "-f", "B", "-n", "2", "--angles", "0,0")
    assert rec["z"] == [1.0, 1.0]


def test_raster_csv_and_svg(capsys, tmp_path):
    out, svg = tmp_path / "r.csv", tmp_path / "r.svg"
    code, _, _ = run(capsys, "raster", "-f", "C", "-n", "2", "--resolution", "20", "-o", str(out), "--svg", str(svg))
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["z1", "z2", "psd", "rank"]
    assert len(rows) == 1 + 21 * 21
    centre = [r for r in rows[1:] if abs(float(r[0])) < 1e-12 and abs(float(r[1])) < 1e-12]
    assert centre and centre[0][2] in ("1", "true", "True")
    assert svg.read_text().lstrip().startswith("<svg") or "<svg" in svg.read_text()


def test_polynomial_commands(capsys):
    code, out, _ = run(capsys, "cheb", "-f", "A", "-n", "1", "--alpha", "2", "--text")
    assert MPoly.parse(out, 1) == MPoly.parse("2*z1^2 - 1", 1)
    code, out, _ = run(capsys, "cheb", "-f", "A", "-n", "1", "--alpha", "2", "--kind", "second", "--text")
    assert MPoly.parse(out, 1) == MPoly.parse("4*z1^2 - 1", 1)
    code, out, _ = run(capsys, "phi", "-f", "C", "-n", "2", "--text")
    assert MPoly.parse(out, 2) == golden("C2.phi")
    code, rec = run_json(capsys, "phi", "-f", "A", "-n", "2", "--real")
    assert rec["coordinates"] == "real"
    code, rec = run_json(capsys, "mmatrix", "-f", "A", "-n", "1")
    assert rec["kind"] == "m_matrix" and rec["entries"][0][0]["text"] == "z1^2 - 1"
    code, rec = run_json(capsys, "mmatrix", "-f", "C", "-n", "2", "--tangent", "0,0")
    assert code == 0 and rec["kind"] == "m_value"


def test_ortho_and_conjecture(capsys):
    code, rec = run_json(capsys, "ortho", "-f", "A", "-n", "2", "--mu", "1,0", "--nu", "0,1", "--samples", "20000")
    assert code == 0 and rec["function"] == "cosine" and rec["target"] == "0/1"
    code, rec = run_json(capsys, "conjecture", "-f", "C", "-n", "2", "--samples", "100")
    assert code == 0 and rec["experimental"] is True


def test_verify_golden(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "golden")
    assert code == 0 and "PASS" in out
    code, rec = run_json(capsys, "verify", "--suite", "golden", "--json")
    assert rec["passed"] and all(c["passed"] for c in rec["checks"])


def test_verify_failure_exit_1(capsys, monkeypatch):
    import weyl_torus.verify as ver

    monkeypatch.setattr(ver, "run_suite", lambda *a, **k: [ver.CheckResult("x", False, "forced", 0.0)])
    code, out, _ = run(capsys, "verify", "--suite", "golden")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "weyl_torus", "member", "-f", "C", "-n", "2", "--point", "1,-1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["status"] == "outside"
