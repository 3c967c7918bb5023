import json
import subprocess
import sys

import numpy as np
import pytest

from hyperalpha.cli import main, read_pattern_csv, write_pattern_csv
from hyperalpha.simulate import poisson


@pytest.fixture(scope="module")
def pattern_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "pattern.csv"
    p = poisson(1.0, 12.0, seed=77)
    write_pattern_csv(path, p.points)
    return str(path), p


class TestReadWriteCsv:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "pts.csv"
        pts = np.array([[0.125, -3.5], [1e-17, 2.0]])
        write_pattern_csv(path, pts, comments=["header note"])
        got = read_pattern_csv(path)
        np.testing.assert_array_equal(got, pts)

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("# leading\n\n1.0,2.0\n3.0,4.0  # trailing\n")
        got = read_pattern_csv(path)
        np.testing.assert_array_equal(got, [[1.0, 2.0], [3.0, 4.0]])


class TestExitCodes:
    def test_malformed_line_number(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\noops,3.0\n")
        rc = main(["estimate", "--input", str(path), "--half-width", "10"])
        assert rc == 2
        assert ":2:" in capsys.readouterr().err

    def test_inconsistent_columns(self, tmp_path, capsys):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n")
        assert main(["estimate", "--input", str(path),
                     "--half-width", "10"]) == 2

    def test_missing_file(self, tmp_path, capsys):
        rc = main(["estimate", "--input", str(tmp_path / "nope.csv"),
                   "--half-width", "10"])
        assert rc == 2

    def test_empty_input(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("# no points\n")
        rc = main(["estimate", "--input", str(path), "--half-width", "10"])
        assert rc == 3

    def test_numerical_failure(self, tmp_path, capsys):
        # a unit half-width window is too small for any scale calibration
        path = tmp_path / "tiny.csv"
        path.write_text("0.5,0.5\n-0.5,-0.5\n0.1,-0.3\n")
        rc = main(["estimate", "--input", str(path), "--half-width", "1.0"])
        assert rc == 4
        assert "error" in capsys.readouterr().err


class TestEstimate:
    def test_json_output_shape(self, pattern_csv, capsys):
        path, p = pattern_csv
        rc = main(["estimate", "--input", path, "--half-width", "12"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["schema_version"] == 1
        assert np.isfinite(out["alpha_hat"])
        assert out["ci"] is None
        assert out["n_points"] == len(p.points)
        # R is reported in the unit-intensity frame
        assert out["R"] == pytest.approx(
            12.0 * np.sqrt(len(p.points) / 24.0 ** 2))
        assert 0.1 < out["j_min"] < out["j_max"] <= 1.0
        assert out["frames"][0]["path"] == path
        assert out["config_echo"]["command"] == "estimate"

    def test_rerun_byte_identical(self, pattern_csv, tmp_path):
        path, _ = pattern_csv
        out = tmp_path / "report.json"
        argv = ["estimate", "--input", path, "--half-width", "12",
                "--output", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first

    def test_rescale_invariance(self, pattern_csv, tmp_path, capsys):
        # the pipeline normalizes to unit intensity, so measuring the same
        # pattern in different units must not move the estimate
        path, p = pattern_csv
        scaled = tmp_path / "scaled.csv"
        write_pattern_csv(scaled, 3.0 * p.points)
        rc = main(["estimate", "--input", path, "--half-width", "12"])
        assert rc == 0
        a = json.loads(capsys.readouterr().out)["alpha_hat"]
        rc = main(["estimate", "--input", str(scaled), "--half-width", "36"])
        assert rc == 0
        b = json.loads(capsys.readouterr().out)["alpha_hat"]
        assert abs(a - b) < 1e-8

    def test_half_width_inferred(self, pattern_csv, capsys):
        path, _ = pattern_csv
        rc = main(["estimate", "--input", path])
        assert rc == 0
        err = capsys.readouterr().err
        assert "half-width not given" in err

    def test_ci_requested(self, pattern_csv, capsys):
        path, _ = pattern_csv
        rc = main(["estimate", "--input", path, "--half-width", "12",
                   "--ci-level", "0.9", "--ci-draws", "2000"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        ci = out["ci"]
        assert ci["level"] == 0.9
        assert ci["lo"] < out["alpha_hat"] < ci["hi"]

    def test_glob_pools_frames(self, tmp_path, capsys):
        for k in (0, 1):
            p = poisson(1.0, 10.0, seed=50 + k)
            write_pattern_csv(tmp_path / f"frame{k}.csv", p.points)
        rc = main(["estimate", "--input", str(tmp_path / "frame*.csv"),
                   "--half-width", "10"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["frames"]) == 2
        assert out["alpha_hat"] == pytest.approx(
            np.mean([f["alpha_hat"] for f in out["frames"]]))

    def test_curve_output(self, pattern_csv, tmp_path, capsys):
        path, _ = pattern_csv
        curve_path = tmp_path / "curve.csv"
        rc = main(["estimate", "--input", path, "--half-width", "12",
                   "--curve-output", str(curve_path)])
        assert rc == 0
        lines = curve_path.read_text().splitlines()
        assert lines[0] == "j,C"
        assert len(lines) == 1 + 120


class TestCurveCommand:
    def test_with_poisson_reference(self, pattern_csv, tmp_path, capsys):
        path, _ = pattern_csv
        out = tmp_path / "curve.csv"
        rc = main(["curve", "--input", path, "--half-width", "12",
                   "--imax", "4", "--output", str(out),
                   "--poisson-reference", "2"])
        assert rc == 0
        lines = out.read_text().splitlines()
        header = [ln for ln in lines if not ln.startswith("#")][0]
        assert header == "j,C,C_poisson"
        data = [ln for ln in lines if not ln.startswith("#")][1:]
        assert len(data) == 120
        # every cell must be a plain parseable number, not a repr wrapper
        parsed = [[float(cell) for cell in row.split(",")] for row in data]
        assert all(len(row) == 3 for row in parsed)
        assert parsed[0][0] == pytest.approx(0.11)


class TestSimulateCommand:
    def test_reproducible_file(self, tmp_path, capsys):
        f1 = tmp_path / "a.csv"
        f2 = tmp_path / "b.csv"
        for f in (f1, f2):
            rc = main(["simulate", "--model", "rsa", "--half-width", "15",
                       "--seed", "4", "--lambda-prop", "2.0",
                       "--radius", "0.8", "--output", str(f)])
            assert rc == 0
        assert f1.read_bytes() == f2.read_bytes()
        meta = json.loads(capsys.readouterr().out.split("}\n{")[0] + "}")
        assert meta["model"] == "rsa"
        rows = read_pattern_csv(f1)
        assert len(rows) == meta["n_points"]

    def test_roundtrip_into_estimate(self, tmp_path, capsys):
        f = tmp_path / "cloaked.csv"
        rc = main(["simulate", "--model", "cloaked", "--alpha", "1.0",
                   "--sigma", "0.25", "--half-width", "12", "--seed", "9",
                   "--output", str(f)])
        assert rc == 0
        capsys.readouterr()
        rc = main(["estimate", "--input", str(f), "--half-width", "12"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert np.isfinite(out["alpha_hat"])


class TestCoverageCommand:
    def test_smoke(self, tmp_path):
        out = tmp_path / "cov.json"
        rc = main(["coverage", "--alpha", "1.0", "--half-width", "12",
                   "--replicates", "3", "--ci-draws", "1500",
                   "--seed", "2", "--output", str(out)])
        assert rc == 0
        got = json.loads(out.read_text())
        assert got["replicates"] == 3
        assert 0.0 <= got["coverage"] <= 1.0
        assert got["covered"] <= 3


def test_console_script_version():
    proc = subprocess.run([sys.executable, "-m", "hyperalpha.cli",
                           "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
