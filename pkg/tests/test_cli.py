"""Command-line interface: outputs, exit codes, reproducibility."""

import json
import re

import numpy as np
import pytest

from lunasil import default_network, solve_steady_state
from lunasil.cli import main

HEADER_RE = re.compile(r"# lunasil \d+\.\d+\.\d+ config=[0-9a-f]{12} seed=(none|\d+)")


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def read_csv(path):
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#") or not line:
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return header, rows


class TestTable2:
    def test_four_rows_in_order(self, tmp_path):
        assert run(tmp_path, "table2") == 0
        header, rows = read_csv(tmp_path / "table2.csv")
        assert header[0] == "design"
        assert [r[0] for r in rows] == [
            "conventional_21cm",
            "crystalline_21cm",
            "conventional_50cm",
            "crystalline_50cm",
        ]

    def test_header_line(self, tmp_path):
        run(tmp_path, "table2")
        first = (tmp_path / "table2.csv").read_text().splitlines()[0]
        assert HEADER_RE.fullmatch(first)

    def test_json_byte_identical(self, tmp_path):
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        d1.mkdir()
        d2.mkdir()
        assert run(d1, "table2", "--format", "json") == 0
        assert run(d2, "table2", "--format", "json") == 0
        assert (d1 / "table2.json").read_bytes() == (d2 / "table2.json").read_bytes()

    def test_ratio_reported(self, tmp_path):
        run(tmp_path, "table2", "--format", "json")
        doc = json.loads((tmp_path / "table2.json").read_text())
        assert 2.0 < doc["ratio_21cm_50cm_conventional"] < 4.0


class TestBudget:
    def test_columns_and_quadrature(self, tmp_path):
        assert run(tmp_path, "budget") == 0
        header, rows = read_csv(tmp_path / "budget.csv")
        assert header == ["f_hz", "thermal", "vibration", "pressure", "total"]
        for row in rows[:: len(rows) // 7]:
            vals = [float(v) for v in row]
            quad = sum(v * v for v in vals[1:-1]) ** 0.5
            assert vals[-1] == pytest.approx(quad, rel=1e-9)

    def test_no_components_zero_total(self, tmp_path):
        assert run(tmp_path, "budget", "--components", "none") == 0
        header, rows = read_csv(tmp_path / "budget.csv")
        assert header == ["f_hz", "total"]
        assert all(float(r[1]) == 0.0 for r in rows)

    def test_percentiles_ordered(self, tmp_path):
        d10 = tmp_path / "p10"
        d90 = tmp_path / "p90"
        d10.mkdir()
        d90.mkdir()
        run(d10, "budget", "--percentile", "p10")
        run(d90, "budget", "--percentile", "p90")
        _, r10 = read_csv(d10 / "budget.csv")
        _, r90 = read_csv(d90 / "budget.csv")
        v10 = np.array([float(r[2]) for r in r10])
        v90 = np.array([float(r[2]) for r in r90])
        assert np.all(v90 >= v10)

    def test_floor_in_summary(self, tmp_path):
        run(tmp_path, "budget", "--format", "json")
        doc = json.loads((tmp_path / "budget.json").read_text())
        assert 0.0 < doc["allan_floor"] < 1e-16


class TestThermalCommand:
    def test_steady_matches_module(self, tmp_path):
        assert run(tmp_path, "thermal", "steady", "--ambient", "40") == 0
        doc = json.loads((tmp_path / "thermal_steady.json").read_text())
        ref = solve_steady_state(default_network(), ambient_k=40.0)
        for name, t in ref.temps_k.items():
            assert doc["temps_k"][name] == pytest.approx(t, rel=1e-12)
        assert doc["heater_power_w"] == pytest.approx(ref.heater_power_w, rel=1e-9)

    def test_transient_needs_duration(self, tmp_path, capsys):
        code = run(tmp_path, "thermal", "transient")
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["exit_code"] == 2

    def test_transient_runs(self, tmp_path):
        code = run(
            tmp_path, "thermal", "transient", "--ambient", "40",
            "--duration", "20000", "--dt", "100",
        )
        assert code == 0
        header, rows = read_csv(tmp_path / "thermal_transient.csv")
        assert header[0] == "t_s"
        assert header[-1] == "heater_w"
        assert float(rows[-1][0]) == 20000.0

    def test_unstable_transient_exit_3(self, tmp_path, capsys):
        code = run(
            tmp_path, "thermal", "transient", "--ambient", "40",
            "--duration", "1000000", "--dt", "50000",
        )
        assert code == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "IntegrationError"

    def test_size_reports_areas(self, tmp_path):
        assert run(tmp_path, "thermal", "size") == 0
        doc = json.loads((tmp_path / "thermal_size.json").read_text())
        areas = doc["areas_m2"]
        assert 10.0 <= areas[0] <= 20.0
        assert 1.0 <= areas[1] <= 10.0
        assert doc["heater"]["required_w"] <= 0.25


class TestModes:
    def test_spot_sizes(self, tmp_path):
        assert run(tmp_path, "modes", "--format", "json") == 0
        doc = json.loads((tmp_path / "modes.json").read_text())
        assert doc["w1_m"] == pytest.approx(8.389145893068934e-4, rel=1e-9)
        assert doc["w2_m"] == pytest.approx(8.478644013379335e-4, rel=1e-9)


class TestSimulate:
    def test_requires_seed(self, tmp_path, capsys):
        code = run(tmp_path, "simulate")
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert "seed" in err["error"]["message"]

    def test_drift_only_day(self, tmp_path):
        code = run(
            tmp_path, "simulate", "--seed", "0", "--model", "drift=5e-20",
            "--seconds", "86400", "--dt", "60",
        )
        assert code == 0
        doc = json.loads((tmp_path / "simulate.json").read_text())
        assert doc["final_time_error_s"] == pytest.approx(1.86624e-10, rel=1e-9)

    def test_rerun_byte_identical(self, tmp_path):
        d1 = tmp_path / "a"
        d2 = tmp_path / "b"
        d1.mkdir()
        d2.mkdir()
        args = ("simulate", "--seed", "7", "--seconds", "7200", "--dt", "1")
        assert run(d1, *args) == 0
        assert run(d2, *args) == 0
        for name in ("trace.csv", "allan.csv", "simulate.json"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_censored_coherence_exit_4(self, tmp_path, capsys):
        code = run(
            tmp_path, "simulate", "--seed", "1", "--model", "flicker-floor=1e-22",
            "--seconds", "7200", "--coherence", "--n-seeds", "10",
            "--coherence-samples", "512",
        )
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "InfeasibleError"

    def test_censored_allowed(self, tmp_path):
        code = run(
            tmp_path, "simulate", "--seed", "1", "--model", "flicker-floor=1e-22",
            "--seconds", "7200", "--coherence", "--n-seeds", "10",
            "--coherence-samples", "512", "--allow-censored",
        )
        assert code == 0
        doc = json.loads((tmp_path / "simulate.json").read_text())
        assert doc["coherence"]["censored"] is True


class TestTimescale:
    def test_summary_keys(self, tmp_path):
        code = run(
            tmp_path, "timescale", "--seed", "3", "--days", "1",
            "--model", "flicker-floor=8e-19,drift=5e-20",
        )
        assert code == 0
        doc = json.loads((tmp_path / "timescale.json").read_text())
        for key in (
            "sigma_y_1day",
            "max_holdover_error_s",
            "final_time_error_s",
            "policy",
        ):
            assert key in doc

    def test_holdover_flag(self, tmp_path):
        code = run(
            tmp_path, "timescale", "--seed", "3", "--days", "1",
            "--model", "drift=5e-20", "--atomic-white", "0",
            "--holdover", "21600", "64800",
        )
        assert code == 0
        doc = json.loads((tmp_path / "timescale.json").read_text())
        expect = 0.5 * 5e-20 * 43200.0**2
        assert doc["max_holdover_error_s"] == pytest.approx(expect, rel=0.05)

    def test_quiet_model_zero(self, tmp_path):
        code = run(
            tmp_path, "timescale", "--seed", "0", "--days", "1",
            "--model", "none", "--atomic-white", "0",
        )
        assert code == 0
        doc = json.loads((tmp_path / "timescale.json").read_text())
        assert doc["final_time_error_s"] == 0.0
        assert doc["max_holdover_error_s"] == 0.0


class TestPlumbing:
    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[design]\ncoating = 'conventional'\nlength_m = 0.21\nzz = 1\n")
        code = run(tmp_path, "budget", "--design", str(bad))
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert "zz" in err["error"]["message"]

    def test_all_csv_outputs_carry_header(self, tmp_path):
        run(tmp_path, "budget", "--seed", "5")
        first = (tmp_path / "budget.csv").read_text().splitlines()[0]
        assert HEADER_RE.fullmatch(first)
        assert "seed=5" in first
