"""Unit tests for the command-line interface (run in-process)."""

import json

import numpy as np
import pytest

from wgqed.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main, parse_range
from wgqed.model import TWO_PI, WaveguideParams, derive_rates, mhz


class TestParseRange:
    def test_single_value(self):
        np.testing.assert_allclose(parse_range("1.5"), [1.5])

    def test_inclusive_grid(self):
        np.testing.assert_allclose(parse_range("0.3:0.9:0.2"), [0.3, 0.5, 0.7, 0.9])

    def test_malformed(self):
        for bad in ("1:2", "a:b:c", "2:1:0.5", "1:2:-1"):
            with pytest.raises(ValueError):
                parse_range(bad)


class TestRates:
    def test_csv_matches_library(self, tmp_path, capsys):
        out = tmp_path / "rates.csv"
        assert main(["rates", "--range", "1.2:2.0:0.4", "--out", str(out)]) == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("lambda_ratio,phi_rad,Gamma_a_MHz")
        assert len(lines) == 4  # header + 3 grid points
        row = [float(v) for v in lines[1].split(",")]
        r = derive_rates(WaveguideParams(gamma=mhz(5.0), gamma_nr=mhz(0.03),
                                         lambda_ratio=1.2))
        assert row[2] == pytest.approx(r.gamma_a / TWO_PI, rel=1e-10)
        assert row[5] == pytest.approx(r.g_x / TWO_PI, rel=1e-10)

    def test_json_output(self, tmp_path):
        out = tmp_path / "rates.json"
        assert main(["rates", "--range", "2.0", "--format", "json",
                     "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["columns"][0] == "lambda_ratio"
        assert len(payload["rows"]) == 1

    def test_malformed_range_is_usage_error(self, capsys):
        assert main(["rates", "--range", "nope:1"]) == EXIT_USAGE
        assert "malformed range" in capsys.readouterr().err


class TestEvolve:
    ARGS = ["evolve", "--state", "werner", "--f", "0.9", "--lambda-ratio", "1.5",
            "--t-max", "0.5", "--sample-dt", "0.01"]

    def test_csv_trajectory(self, tmp_path):
        out = tmp_path / "traj.csv"
        assert main(self.ARGS + ["--out", str(out)]) == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "t_us,C,a,b,c,d,re_z,im_z,re_w,im_w"
        assert len(lines) == 52  # header + 51 samples
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == 0.0
        assert first[1] == pytest.approx(0.8)  # Werner concurrence 2f - 1

    def test_json_contains_event_report(self, tmp_path):
        out = tmp_path / "traj.json"
        args = ["evolve", "--state", "werner", "--f", "0.9", "--lambda-ratio",
                "1.5", "--t-max", "0.5", "--sample-dt", "0.001"]
        assert main(args + ["--format", "json", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert "esd" in payload and "rates" in payload
        assert payload["esd"]["death_times_us"]  # f = 0.9 at ratio 1.5 dies
        assert payload["rates"]["gamma_b"] == pytest.approx(10.03)

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(self.ARGS + ["--out", str(a)])
        main(self.ARGS + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_missing_required_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["evolve", "--f", "0.9"])
        assert exc.value.code == 2


class TestScan:
    def test_grid_is_f_major(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(["scan", "--f-range", "0.8:0.9:0.1", "--lambda-ratios",
                     "1.5,2.0", "--t-max", "0.5", "--sample-dt", "0.01",
                     "--out", str(out)])
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "f,lambda_ratio,died,revived,t_death,t_revival,C_final"
        cells = [line.split(",")[:2] for line in lines[1:]]
        assert cells == [["0.8", "1.5"], ["0.8", "2"], ["0.9", "1.5"], ["0.9", "2"]]

    def test_parallel_jobs_match_serial(self, tmp_path):
        serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
        common = ["scan", "--f-range", "0.7:0.9:0.1", "--lambda-ratios",
                  "1.3,1.5", "--t-max", "0.4", "--sample-dt", "0.01"]
        main(common + ["--out", str(serial)])
        main(common + ["--jobs", "4", "--out", str(parallel)])
        assert serial.read_bytes() == parallel.read_bytes()

    def test_bad_ratio_list(self, capsys):
        assert main(["scan", "--f-range", "0.8", "--lambda-ratios", "x"]) == EXIT_USAGE


class TestPrepare:
    def test_exact_mode_reports_unit_fidelity(self, tmp_path):
        out = tmp_path / "prep.json"
        assert main(["prepare", "--f", "0.8", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["fidelity_to_target"] == pytest.approx(1.0, abs=1e-9)
        assert np.array(payload["rho_out"]["re"]).shape == (4, 4)

    def test_dissipative_mode_reports_durations(self, tmp_path):
        out = tmp_path / "prep.json"
        assert main(["prepare", "--f", "0.8", "--dissipative",
                     "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert len(payload["gate_durations_us"]) == 2
        assert payload["fidelity_to_target"] > 0.999


class TestMix:
    ARGS = ["mix", "--gamma-nr", "3", "--pulse", "2", "--sample-dt", "0.01"]

    def test_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "mix.csv"
        assert main(self.ARGS + ["--out", str(out)]) == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "t_us,rho_gg,rho_ee,abs_rho_eg"
        assert "f_achieved" in capsys.readouterr().out

    def test_json_f_achieved(self, tmp_path):
        out = tmp_path / "mix.json"
        assert main(self.ARGS + ["--format", "json", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["f_achieved"] == pytest.approx(0.5, abs=0.01)


class TestCpw:
    def test_text_report(self, capsys):
        assert main(["cpw", "--width", "20", "--gap", "8", "--freq", "7"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "Z0_ohm" in out and "lambda_ratio" in out

    def test_json_report(self, tmp_path):
        out = tmp_path / "cpw.json"
        assert main(["cpw", "--width", "20", "--gap", "8", "--freq", "7",
                     "--format", "json", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["Z0_ohm"] == pytest.approx(48.7, abs=0.5)
        assert payload["lambda_ratio"] == pytest.approx(1.0, abs=0.01)


class TestConfigFile:
    def test_file_supplies_defaults_and_flags_override(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[run]\nf = 0.9\nlambda-ratio = 1.5\nt-max = 0.5\n"
                       "sample-dt = 0.01\n")
        from_file = tmp_path / "a.csv"
        overridden = tmp_path / "b.csv"
        assert main(["evolve", "--f", "0.9", "--lambda-ratio", "1.5",
                     "--config", str(cfg), "--out", str(from_file)]) == EXIT_OK
        assert main(["evolve", "--f", "0.9", "--lambda-ratio", "1.5",
                     "--t-max", "0.25", "--config", str(cfg),
                     "--out", str(overridden)]) == EXIT_OK
        n_file = len(from_file.read_text().strip().splitlines())
        n_override = len(overridden.read_text().strip().splitlines())
        assert n_file == 52 and n_override == 27

    def test_unknown_key_is_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[run]\nbogus = 1\n")
        code = main(["evolve", "--f", "0.9", "--lambda-ratio", "1.5",
                     "--config", str(cfg)])
        assert code == EXIT_USAGE
        assert "unknown config key" in capsys.readouterr().err

    def test_missing_file_is_usage_error(self, tmp_path):
        code = main(["evolve", "--f", "0.9", "--lambda-ratio", "1.5",
                     "--config", str(tmp_path / "missing.ini")])
        assert code == EXIT_USAGE


class TestExitCodes:
    def test_invalid_physical_parameter(self, capsys):
        assert main(["evolve", "--f", "0.9", "--lambda-ratio", "-1"]) == EXIT_USAGE

    def test_out_of_range_fidelity(self, capsys):
        assert main(["evolve", "--state", "pw", "--f", "1.5",
                     "--lambda-ratio", "1.5"]) == EXIT_USAGE
