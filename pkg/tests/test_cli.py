"""End-to-end runs of every command, file formats and the exit-code contract."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from godel import cli
from godel.io import CurveData, RunManifest, fmt, read_curve, render_csv

T_ISO = 2 * math.pi * (math.sqrt(2) - 1)


@pytest.fixture(autouse=True)
def fixed_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def rows(path):
    lines = path.read_text().splitlines()
    return lines[0], [line.split(",") for line in lines[1:]]


class TestFormatting:
    def test_seventeen_digits(self):
        assert fmt(1 / 3) == "0.33333333333333331"
        assert fmt(0.0) == "0" and fmt(-0.0) == "0"
        assert float(fmt(math.pi)) == math.pi

    def test_csv_header(self):
        text = render_csv(CurveData("cartesian", np.array([0.0]), np.zeros((1, 4))))
        assert text.splitlines()[0] == "t,x0,x1,x2,x3"

    def test_manifest_timestamp_from_epoch(self):
        assert RunManifest("x", {}).timestamp == "2023-11-14T22:13:20Z"


class TestTrace:
    def test_isotropic_period(self, tmp_path):
        out = tmp_path / "iso.csv"
        assert cli.main(["trace", "--class", "isotropic", "--steps", "100", "--output", str(out)]) == 0
        header, data = rows(out)
        assert header == "t,x0,x1,x2,x3"
        assert len(data) == 101
        assert data[0] == ["0", "0", "0", "0", "0"]
        assert float(data[-1][1]) == pytest.approx(T_ISO, abs=1e-12)
        times = [float(r[0]) for r in data]
        assert all(b > a for a, b in zip(times, times[1:]))
        manifest = json.loads((tmp_path / "iso.csv.manifest.json").read_text())
        assert manifest["manifest"]["command"] == "trace"
        assert manifest["params"]["class"] == "isotropic"

    def test_covector_form_gives_identical_file(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["trace", "--class", "isotropic", "--output", str(a)]) == 0
        assert cli.main(["trace", "--psi", "1,0,1,0", "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_deterministic(self, tmp_path):
        outs = []
        for name in ("1.json", "2.json"):
            path = tmp_path / name
            cli.main(["trace", "--class", "timelike", "--phi0", "2", "--phi3", "0.5", "--format", "json", "--output", str(path)])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_json_schema_roundtrip(self, tmp_path):
        path = tmp_path / "c.json"
        cli.main(["trace", "--class", "timelike", "--phi0", "1.5", "--t0", "0.3", "--format", "json", "--output", str(path)])
        doc = json.loads(path.read_text())
        assert set(doc) >= {"manifest", "params", "samples"}
        assert set(doc["params"]) == {"class", "phi0", "phi3", "b", "t0"}
        assert set(doc["samples"][0]) == {"t", "x"}
        curve = read_curve(path)
        assert curve.coords.shape == (101, 4)

    def test_invalid_phi0(self, capsys):
        assert cli.main(["trace", "--class", "timelike", "--phi0", "0.5"]) == 1
        assert "phi0 >= 1" in capsys.readouterr().err

    def test_invalid_phi3(self, capsys):
        assert cli.main(["trace", "--class", "isotropic", "--phi3", "1.5"]) == 1
        assert "|phi3|" in capsys.readouterr().err

    def test_bad_psi(self):
        assert cli.main(["trace", "--psi", "1,0,1"]) == 1

    def test_bad_range(self):
        assert cli.main(["trace", "--t-min", "1", "--t-max", "0"]) == 1

    def test_oracle(self, tmp_path, capsys):
        out = tmp_path / "o.csv"
        assert cli.main(["trace", "--class", "timelike", "--phi0", "2", "--oracle", "--output", str(out)]) == 0
        assert (tmp_path / "o.oracle.csv").exists()
        assert "max |closed form - oracle|" in capsys.readouterr().err
        side = json.loads((tmp_path / "o.csv.manifest.json").read_text())
        assert side["manifest"]["config"]["oracle"]["max_deviation"] < 1e-7

    def test_oracle_tolerance_failure(self, tmp_path):
        out = tmp_path / "o.csv"
        assert cli.main(["trace", "--class", "timelike", "--phi0", "2", "--oracle", "--tol", "1e-20", "--output", str(out)]) == 2

    def test_other_charts(self, tmp_path):
        for chart, header in (("cylindrical", "t,time,r,phi,x3"), ("kundt", "t,time,x,y,z")):
            out = tmp_path / f"{chart}.csv"
            assert cli.main(["trace", "--chart", chart, "--output", str(out)]) == 0
            assert rows(out)[0] == header

    def test_stdout(self, capsys):
        assert cli.main(["trace", "--steps", "2"]) == 0
        assert capsys.readouterr().out.splitlines()[1] == "0,0,0,0,0"


class TestConvert:
    def test_axis_points_to_cylindrical(self, tmp_path):
        src = tmp_path / "axis.csv"
        src.write_text("t,x0,x1,x2,x3\n0,0,0,0,0\n1,2.5,0,0,1\n")
        out = tmp_path / "cyl.csv"
        assert cli.main(["convert", str(src), "--chart", "cylindrical", "--output", str(out)]) == 0
        _, data = rows(out)
        assert float(data[1][2]) == 0.0 and float(data[1][1]) == pytest.approx(1.25)

    def test_kundt_map(self, tmp_path):
        src = tmp_path / "p.csv"
        src.write_text("t,x0,x1,x2,x3\n0,0.5,0.7,1.2,0\n")
        out = tmp_path / "k.csv"
        assert cli.main(["convert", str(src), "--chart", "kundt", "--output", str(out)]) == 0
        _, data = rows(out)
        assert float(data[0][3]) == pytest.approx(math.exp(-0.7))
        assert float(data[0][2]) == pytest.approx(1.2 / math.sqrt(2))

    @pytest.mark.parametrize("chart", ["cylindrical", "kundt"])
    def test_roundtrip(self, tmp_path, chart):
        orig = tmp_path / "g.csv"
        cli.main(["trace", "--class", "timelike", "--phi0", "2", "--phi3", "0.5", "--t0", "0.4", "--output", str(orig)])
        mid, back = tmp_path / "mid.csv", tmp_path / "back.csv"
        assert cli.main(["convert", str(orig), "--chart", chart, "--output", str(mid)]) == 0
        assert cli.main(["convert", str(mid), "--chart", "cartesian", "--output", str(back)]) == 0
        a, b = read_curve(orig), read_curve(back)
        assert np.max(np.abs(a.coords - b.coords)) <= 1e-10

    def test_out_of_domain_rows_flagged(self, tmp_path, capsys):
        src = tmp_path / "k.csv"
        src.write_text("t,time,x,y,z\n0,0,0,1,0\n1,0,0,-1,0\n")
        out = tmp_path / "c.csv"
        assert cli.main(["convert", str(src), "--chart", "cartesian", "--output", str(out)]) == 0
        _, data = rows(out)
        assert data[0][-1] == "ok" and data[1][-1].startswith("outside")
        assert "warning" in capsys.readouterr().err

    def test_parse_failure(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert cli.main(["convert", str(bad), "--chart", "kundt"]) == 1
        assert cli.main(["convert", str(tmp_path / "missing.csv"), "--chart", "kundt"]) == 1


class TestSweep:
    def test_t0_sweep(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"class": "isotropic", "t0": {"start": 0, "stop": 2 * math.pi, "count": 64, "endpoint": False}}))
        assert cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / "out")]) == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["points"] == 64
        assert summary["bounds"]["x2_sup"] == pytest.approx(4.0, abs=1e-9)
        assert len(list((tmp_path / "out").glob("point_*.json"))) == 64

    def test_f_violation_recorded(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"class": "timelike", "phi0": [2.0], "t0": 0}))
        assert cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / "o")]) == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["bounds"]["f_violations"][0]["params"]["phi0"] == 2.0

    def test_invalid_combinations_skipped(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"class": "timelike", "phi0": [1.2, 3.0], "phi3": [0.0, 2.0]}))
        assert cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / "o")]) == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["points"] == 3 and len(summary["skipped"]) == 1

    def test_deterministic(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"class": ["isotropic", "timelike"], "phi0": [1.5], "t0": [0.0, 1.0]}))
        for name in ("a", "b"):
            cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / name)])
        for f in (tmp_path / "a").iterdir():
            assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()

    def test_empty_grid(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"class": "isotropic", "t0": []}))
        assert cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / "o")]) == 1

    @pytest.mark.parametrize("text", ["not json", '{"class": "spacelike"}', '{"phi0": {"start": 1}}', '{"colour": 1}'])
    def test_malformed(self, tmp_path, text):
        grid = tmp_path / "grid.json"
        grid.write_text(text)
        assert cli.main(["sweep", "--grid", str(grid), "--output", str(tmp_path / "o")]) == 1


class TestVerify:
    def test_unsatisfiable_tolerance(self, capsys):
        assert cli.main(["verify", "--tol", "1e-20"]) == 2
        out = capsys.readouterr().out
        assert "FAIL" in out and "integral = -3.14159" in out

    def test_unknown_tolerance_name(self):
        assert cli.main(["verify", "--tol", "nonsense=1"]) == 1

    def test_json_record(self, tmp_path):
        out = tmp_path / "v.json"
        cli.main(["verify", "--output", str(out)])
        doc = json.loads(out.read_text())
        assert len(doc["criteria"]) == 11


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "godel", "trace", "--steps", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("t,x0,x1,x2,x3")


def test_usage_error_exit_code():
    assert cli.main(["trace", "--no-such-flag"]) == 1
