import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from pwfinsler import fixtures as fx
from pwfinsler.cli import main
from pwfinsler.surface import serialize

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok_and_failures(capsys):
    code, out, _ = run(capsys, "validate", DATA / "tetra.json")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "validate", DATA / "snell.json")
    assert code == 1
    assert "edge-compatibility" in [c["name"] for c in json.loads(out)["checks"] if not c["passed"]]


def test_malformed_input_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"norms": [')
    code, out, err = run(capsys, "validate", bad)
    assert code == 2 and out == ""
    assert "error" in json.loads(err)
    code, _, _ = run(capsys, "validate", tmp_path / "missing.json")
    assert code == 2


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        main(["trace"])
    assert e.value.code == 2
    capsys.readouterr()


def test_snell_trace(capsys):
    s30, c30 = math.sin(math.radians(30)), math.cos(math.radians(30))
    code, out, _ = run(capsys, "trace", DATA / "snell.json", "--triangle", 0,
                       "--start", 0, -1, "--dir", s30, c30)
    assert code == 0
    d = json.loads(out)
    (ev,) = d["events"]
    ux, uy = ev["u_out"]
    assert math.atan2(ux, uy) == pytest.approx(math.asin(0.25), abs=1e-9)
    assert d["termination"] == "boundary"


def test_trace_svg(capsys):
    code, out, _ = run(capsys, "trace", DATA / "snell.json", "--triangle", 0,
                       "--start", 0, -1, "--dir", 0.5, 0.8, "--format", "svg")
    assert code == 0 and out.lstrip().startswith("<svg")


def test_curvature_and_extensions(capsys):
    code, out, _ = run(capsys, "curvature", DATA / "tetra.json", "--vertex", "v0")
    assert code == 0
    (row,) = json.loads(out)["curvature"]
    assert row["mean"] == pytest.approx(math.pi, abs=1e-9)
    code, out, _ = run(capsys, "extensions", DATA / "tetra.json", "--vertex", "v0")
    assert code == 0
    assert {e["classification"] for e in json.loads(out)["extensions"]} == {"none"}


def test_unknown_vertex_is_an_error(capsys):
    code, _, err = run(capsys, "curvature", DATA / "tetra.json", "--vertex", "nope")
    assert code in (1, 2) and "error" in json.loads(err)


def test_landsberg_and_berwald_exit_codes(capsys):
    code, out, _ = run(capsys, "check-landsberg", DATA / "quartic_cube.json")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "check-landsberg", DATA / "mixed.json")
    assert code == 1 and not json.loads(out)["passed"]
    code, _, _ = run(capsys, "check-berwald", DATA / "quartic_cube.json")
    assert code == 0
    code, _, _ = run(capsys, "check-berwald", DATA / "mixed.json")
    assert code == 1


def test_gauss_bonnet(capsys):
    code, out, _ = run(capsys, "gauss-bonnet", DATA / "tetra.json")
    d = json.loads(out)
    assert code == 0
    assert d["sum_K"] == pytest.approx(4 * math.pi, abs=1e-6)
    assert d["chi"] == 2
    code, out, err = run(capsys, "gauss-bonnet", DATA / "mixed.json")
    assert code == 1 and "error" in json.loads(err)
    code, out, _ = run(capsys, "gauss-bonnet", DATA / "mixed.json", "--force")
    assert json.loads(out)["hypothesis_violated"]


def test_cone_distance(capsys):
    h = math.pi / 2
    code, out, _ = run(capsys, "cone-distance", "--angles", h, h, h,
                       "--from", 0, 1, 0.5, "--to", 2, 0.5, 0.5)
    assert code == 0
    assert json.loads(out)["length"] == pytest.approx(math.sqrt(1.25), abs=1e-8)


def test_export_json_and_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "export", DATA / "tetra.json", "--samples", 16,
                       "--out", target)
    assert code == 0 and out == ""
    rep = json.loads(target.read_text())
    assert rep["verdicts"]["landsberg"]


def test_output_is_deterministic(capsys, tmp_path):
    src = tmp_path / "torus.json"
    src.write_text(serialize(fx.flat_torus()))
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "export", src, "--samples", 16)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_module_entry_point():
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "pwfinsler", "validate", str(DATA / "torus.json")],
                       capture_output=True, text=True, env=env, timeout=120)
    assert r.returncode == 0 and json.loads(r.stdout)["passed"]
