import json
import subprocess
import sys

import pytest

from nashlab.cli import main
from nashlab.corpus import SPECS
from nashlab.report import SCHEMA_VERSION


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture
def cusp_file(tmp_path):
    return write(tmp_path, "cusp.json", json.dumps(SPECS["cusp"], indent=1))


def test_analyze_cusp_report(tmp_path, cusp_file, capsys):
    out, plot = tmp_path / "r.json", tmp_path / "r.svg"
    code = main(["analyze", "--input", cusp_file, "--point", "0,0", "--report", str(out), "--plot", str(plot)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema_version"] == SCHEMA_VERSION
    assert report["verdict"]["classification"] == "not-C1"
    assert report["configuration"]["seed"] == 0
    fit = report["fits"]["cross-branch"]
    assert fit["alpha_hat"] == pytest.approx(1 / 3, abs=0.03)
    assert "α̂ = 0.33" in plot.read_text()
    assert "verdict: not-C1" in capsys.readouterr().out


def test_analyze_circle_and_region(tmp_path):
    circle = write(tmp_path, "c.json", json.dumps(SPECS["circle"]))
    out = tmp_path / "c.out.json"
    plot = tmp_path / "c.svg"
    assert main(["analyze", "--input", circle, "--point", "1,0", "--report", str(out), "--plot", str(plot)]) == 0
    assert json.loads(out.read_text())["verdict"]["classification"] == "C11-submanifold"
    assert "α̂ = 1.00" in plot.read_text()
    region = write(tmp_path, "z.json", json.dumps(SPECS["Z"]))
    assert main(["analyze", "--input", region, "--point", "0,0", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["verdict"]["classification"] == "criterion-inapplicable"


def test_reports_are_byte_identical(tmp_path, cusp_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["analyze", "--input", cusp_file, "--point", "0,0", "--report", str(a)])
    main(["analyze", "--input", cusp_file, "--point", "0,0", "--report", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_parse_error_names_file_and_line(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{"kind": "implicit-real",\n "variables": ["x", "y"],\n "equation": "x^2 - y^^3",\n "ambient_dim": 2}')
    code = main(["analyze", "--input", bad, "--point", "0,0", "--report", str(tmp_path / "o.json")])
    assert code == 1
    assert "bad.json:3:" in capsys.readouterr().err


def test_json_error_names_line(tmp_path, capsys):
    broken = write(tmp_path, "broken.json", '{"kind": "implicit-real",\n "equation": "x" ,,}')
    assert main(["analyze", "--input", broken, "--point", "0,0", "--report", str(tmp_path / "o.json")]) == 1
    assert "broken.json:2:" in capsys.readouterr().err


def test_point_errors(tmp_path, cusp_file):
    out = str(tmp_path / "o.json")
    assert main(["analyze", "--input", cusp_file, "--point", "1,0", "--report", out]) == 1
    assert main(["analyze", "--input", cusp_file, "--point", "a,b", "--report", out]) == 1
    assert main(["analyze", "--input", str(tmp_path / "missing.json"), "--point", "0,0", "--report", out]) == 1


def test_analysis_error_still_writes_report(tmp_path):
    # the origin is an isolated real point of x^2 + y^2 = 0: no branch reaches it
    iso = write(tmp_path, "iso.json", json.dumps({"kind": "implicit-real", "variables": ["x", "y"], "equation": "x^2 + y^2", "ambient_dim": 2}))
    out = tmp_path / "o.json"
    assert main(["analyze", "--input", iso, "--point", "0,0", "--report", str(out)]) == 2
    verdict = json.loads(out.read_text())["verdict"]
    assert verdict["classification"] == "criterion-inapplicable"
    assert verdict["evidence"][0] == {"tag": "error", "measured": "SingularPoint", "threshold": None}


def test_examples_subset_and_unknown_id(tmp_path, capsys):
    out = tmp_path / "suite.json"
    assert main(["examples", "--only", "Xk_k=2,circle", "--report", str(out)]) == 0
    table = capsys.readouterr().out
    assert "Xk_k=2" in table and "PASS" in table
    assert json.loads(out.read_text())["all_passed"] is True
    assert main(["examples", "--only", "nope"]) == 1


def test_gr_dist(tmp_path, capsys):
    a = write(tmp_path, "a.json", "[[1, 0]]")
    b = write(tmp_path, "b.json", '{"frame": [[0, 1]]}')
    assert main(["gr-dist", "--a", a, "--b", b]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(2**0.5)
    c = write(tmp_path, "c.json", "[[1, 0, 0]]")
    assert main(["gr-dist", "--a", a, "--b", c]) == 1


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "nashlab", "gr-dist", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--a" in proc.stdout
