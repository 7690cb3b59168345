import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from greensign.cli import main


def run(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(text):
    return list(csv.reader(text.splitlines()))


class TestGamma:
    def test_nonnegative_kernel_reports_infinite_ratio(self, capsys):
        code, out, _ = run(["gamma", "--bc", "periodic", "--rho", "0.5",
                            "--T", "1", "--t-grid", "11"], capsys)
        assert code == 0
        assert "+inf" in out
        assert "nonnegative" in out

    def test_closed_and_quadrature_side_by_side(self, capsys):
        code, out, _ = run(["gamma", "--bc", "dirichlet", "--rho", "sqrt(60)",
                            "--t-grid", "201"], capsys)
        assert code == 0
        assert "gamma_closed" in out and "gamma_quadrature" in out
        vals = [float(line.split("=")[1].split("(")[0])
                for line in out.splitlines() if line.startswith("gamma")]
        assert vals[0] == pytest.approx(1.362541473923, abs=1e-9)
        assert vals[1] == pytest.approx(vals[0], abs=1e-5)

    def test_flagged_interval_prints_note(self, capsys):
        code, out, _ = run(["gamma", "--bc", "periodic", "--rho", "2.5*pi",
                            "--t-grid", "31"], capsys)
        assert code == 0
        assert "note:" in out
        assert "authoritative" in out

    def test_json_round_trip(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        code, _, _ = run(["gamma", "--bc", "periodic", "--rho", "3*pi/2",
                          "--t-grid", "31", "--format", "json",
                          "--output", str(path)], capsys)
        assert code == 0
        raw = path.read_text()
        obj = json.loads(raw)
        assert raw == json.dumps(obj, indent=2, sort_keys=True) + "\n"
        assert obj["quadrature"]["value"] == pytest.approx(
            1.0 / (1.0 - math.sqrt(2) / 2), rel=1e-6)
        assert obj["classification"] == "changes_sign"

    def test_weight_one_variant(self, capsys):
        code, out, _ = run(["gamma", "--bc", "periodic", "--rho", "3*pi/2",
                            "--t-grid", "31", "--weight", "one",
                            "--format", "json"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["quadrature"]["weight"] == "One"
        assert obj["closed"] is None


class TestGreen:
    def test_csv_schema_and_values(self, capsys):
        code, out, _ = run(["green", "--bc", "periodic", "--rho", "3*pi/2",
                            "--nodes", "5"], capsys)
        assert code == 0
        rows = rows_of(out)
        assert rows[0] == ["t", "s", "value"]
        assert len(rows) == 1 + 25
        table = {(r[0], r[1]): float(r[2]) for r in rows[1:]}
        for (t, s), v in table.items():
            assert table[(s, t)] == v  # symmetric kernel

    def test_json_matches_csv(self, capsys):
        argv = ["green", "--bc", "dirichlet", "--rho", "2", "--nodes", "3"]
        _, out_csv, _ = run(argv, capsys)
        _, out_json, _ = run(argv + ["--format", "json"], capsys)
        obj = json.loads(out_json)
        assert obj["form"] == "closed"
        flat = [v for row in obj["value"] for v in row]
        csv_vals = [float(r[2]) for r in rows_of(out_csv)[1:]]
        assert flat == csv_vals


class TestEigen:
    def test_six_by_default(self, capsys):
        code, out, _ = run(["eigen", "--bc", "periodic", "--rho", "5"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 6
        assert lines[0].startswith("lambda_1 = -25 ")

    def test_json_values_match_closed_forms(self, capsys):
        code, out, _ = run(["eigen", "--bc", "dirichlet", "--rho", "3",
                            "--count", "3", "--format", "json"], capsys)
        assert code == 0
        vals = [e["value"] for e in json.loads(out)]
        want = [(k * math.pi) ** 2 - 9.0 for k in (1, 2, 3)]
        assert vals == pytest.approx(want, rel=1e-12)


class TestClassify:
    @pytest.mark.parametrize("rho,want", [
        ("0.5", "nonnegative"),
        ("3*pi/2", "changes_sign"),
    ])
    def test_periodic_classes(self, rho, want, capsys):
        code, out, _ = run(["classify", "--bc", "periodic", "--rho", rho],
                           capsys)
        assert code == 0
        assert out.strip() == want


class TestCheck:
    def test_report_round_trip_and_pass(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, _, _ = run(["check", "--bc", "dirichlet", "--rho", "sqrt(60)",
                          "--f", "t*(1-t)", "--t-grid", "201",
                          "--output", str(path)], capsys)
        assert code == 0
        raw = path.read_text()
        obj = json.loads(raw)
        assert raw == json.dumps(obj, indent=2, sort_keys=True) + "\n"
        assert obj["all_passed"] is True
        assert obj["h2"]["passed"] is True
        assert obj["cone"]["sigma"] > 0

    def test_strict_failure_exits_4(self, capsys):
        code, out, err = run(["check", "--bc", "dirichlet", "--rho",
                              "sqrt(60)", "--f", "t", "--t-grid", "201",
                              "--strict"], capsys)
        assert code == 4
        assert json.loads(out)["h2"]["passed"] is False
        assert "error" in err

    def test_non_strict_failure_still_exits_0(self, capsys):
        code, out, _ = run(["check", "--bc", "dirichlet", "--rho", "sqrt(60)",
                            "--f", "t", "--t-grid", "201"], capsys)
        assert code == 0
        assert json.loads(out)["all_passed"] is False


class TestSolve:
    def test_positive_profile_csv(self, capsys):
        code, out, err = run(["solve", "--bc", "dirichlet", "--rho",
                              "sqrt(60)", "--T", "1", "--rhs", "t*(1-t)",
                              "--solve-grid", "101"], capsys)
        assert code == 0
        rows = rows_of(out)
        assert rows[0] == ["t", "u"]
        assert len(rows) == 102
        us = np.array([float(r[1]) for r in rows[1:]])
        assert us[0] == 0.0 and us[-1] == 0.0
        assert np.min(us[1:-1]) > 0
        assert "positivity=Positive" in err

    def test_json_profile(self, capsys):
        code, out, _ = run(["solve", "--bc", "periodic", "--rho", "2",
                            "--f", "1+0*x", "--solve-grid", "51",
                            "--format", "json"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["iterations"] == 1
        assert obj["converged"] is True
        assert obj["u"][0] == pytest.approx(0.25, abs=1e-9)

    def test_requires_exactly_one_rhs(self, capsys):
        code, _, err = run(["solve", "--bc", "dirichlet", "--rho", "2"],
                           capsys)
        assert code == 1
        assert err.startswith("error: GreensignError:")
        code, _, _ = run(["solve", "--bc", "dirichlet", "--rho", "2",
                          "--rhs", "t", "--f", "x"], capsys)
        assert code == 1


class TestErrorsAndEnv:
    def test_resonance_exits_3(self, capsys):
        code, _, err = run(["green", "--bc", "periodic", "--rho", "2*pi"],
                           capsys)
        assert code == 3
        assert err.startswith("error: ResonantPotential:")

    def test_usage_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["nonsense"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["green", "--rho", "2"])  # missing --bc
        assert exc.value.code == 2

    def test_bad_expression_exits_1(self, capsys):
        code, _, err = run(["gamma", "--bc", "periodic", "--rho", "2*"],
                           capsys)
        assert code == 1
        assert err.startswith("error: ExpressionError:")

    def test_missing_potential_exits_1(self, capsys):
        code, _, err = run(["classify", "--bc", "dirichlet"], capsys)
        assert code == 1
        assert "potential" in err

    def test_grid_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("GREENSIGN_GRID", "101")
        code, out, _ = run(["green", "--bc", "neumann", "--rho", "2",
                            "--nodes", "2", "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["form"] == "numeric"
        monkeypatch.setenv("GREENSIGN_GRID", "bogus")
        code, _, err = run(["green", "--bc", "neumann", "--rho", "2",
                            "--nodes", "2"], capsys)
        assert code == 1
        assert "GREENSIGN_GRID" in err

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("GREENSIGN_GRID", "bogus")
        code, _, _ = run(["green", "--bc", "neumann", "--rho", "2",
                          "--grid", "101", "--nodes", "2"], capsys)
        assert code == 0


class TestSamples:
    def make_file(self, tmp_path, header=True):
        ts = np.linspace(0.0, 1.0, 201)
        path = tmp_path / "a.csv"
        with open(path, "w") as fh:
            if header:
                fh.write("t,a\n")
            for t in ts:
                fh.write(f"{t},{(1.5 * math.pi) ** 2}\n")
        return str(path)

    def test_sampled_potential_matches_constant(self, capsys, tmp_path):
        path = self.make_file(tmp_path)
        code, out, _ = run(["gamma", "--bc", "periodic", "--samples", path,
                            "--t-grid", "11", "--format", "json"], capsys)
        assert code == 0
        obj = json.loads(out)
        assert obj["quadrature"]["value"] == pytest.approx(
            1.0 / (1.0 - math.sqrt(2) / 2), rel=1e-6)

    def test_headerless_file(self, capsys, tmp_path):
        path = self.make_file(tmp_path, header=False)
        code, out, _ = run(["classify", "--bc", "periodic",
                            "--samples", path], capsys)
        assert code == 0
        assert out.strip() == "changes_sign"

    def test_conflicting_T_rejected(self, capsys, tmp_path):
        path = self.make_file(tmp_path)
        code, _, err = run(["classify", "--bc", "periodic", "--samples", path,
                            "--T", "2"], capsys)
        assert code == 1
        assert "--T" in err


class TestFigures:
    def test_figure1_schema_and_determinism(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["figure", "1", "--output", str(p1)], capsys)[0] == 0
        assert run(["figure", "1", "--output", str(p2)], capsys)[0] == 0
        assert p1.read_bytes() == p2.read_bytes()
        rows = rows_of(p1.read_text())
        assert rows[0] == ["rho", "gamma_closed", "gamma_quadrature"]
        assert len(rows) == 301
        gammas = np.array([float(r[1]) for r in rows[1:]])
        x = np.array([float(r[0]) for r in rows[1:]]) / math.pi
        assert np.all(gammas > 1.0)
        # blows up at the left edge of the first band, dips toward one at
        # the even resonances, levels off at (k+1)/k past each odd integer
        assert gammas[0] > 1000.0
        for even in (2.0, 4.0, 6.0):
            assert np.min(gammas[np.abs(x - even) < 0.1]) < 1.01
        assert gammas[np.argmin(np.abs(x - 3.0))] == pytest.approx(2.0, abs=0.01)
        assert gammas[np.argmin(np.abs(x - 5.0))] == pytest.approx(1.5, abs=0.01)
        quad = np.array([float(r[2]) for r in rows[1:]])
        assert np.max(np.abs(quad - gammas) / gammas) < 1e-5

    def test_figure2_schema(self, capsys, tmp_path):
        path = tmp_path / "f2.csv"
        assert run(["figure", "2", "--output", str(path)], capsys)[0] == 0
        rows = rows_of(path.read_text())
        assert rows[0] == ["t", "gamma_closed", "gamma_quadrature"]
        closed = np.array([float(r[1]) for r in rows[1:]])
        quad = np.array([float(r[2]) for r in rows[1:]])
        assert np.max(np.abs(closed - quad)) < 1e-6
        assert np.all(closed > 1.0)

    def test_figures_4_and_5_profiles(self, capsys, tmp_path):
        p4, p5 = tmp_path / "f4.csv", tmp_path / "f5.csv"
        assert run(["figure", "4", "--output", str(p4)], capsys)[0] == 0
        assert run(["figure", "5", "--output", str(p5)], capsys)[0] == 0
        for p in (p4, p5):
            rows = rows_of(p.read_text())
            assert rows[0] == ["t", "u"]
            assert len(rows) == 2002
        u4 = np.array([float(r[1]) for r in rows_of(p4.read_text())[1:]])
        u5 = np.array([float(r[1]) for r in rows_of(p5.read_text())[1:]])
        assert np.min(u4[1:-1]) > 0
        assert np.min(u5) < 0 < np.max(u5)


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "greensign.cli", "eigen",
                           "--bc", "neumann", "--rho", "1", "--count", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("lambda_1 = -1 ")
