import json
import math
import subprocess
import sys

import numpy as np
import pytest

import scallop_pair.experiments as experiments_module
from scallop_pair import ConfigError, RunConfig, phase_sweep
from scallop_pair.cli import main
from scallop_pair.experiments import (
    DEFAULT_PHASES,
    lambda_study,
    null_tests,
    sin_squared_fit,
    theory_vs_numeric_report,
)


def fast_config(tmp_path, **overrides) -> RunConfig:
    defaults = dict(
        phases=(0.0, math.pi / 4, math.pi / 2),
        dt=(2 * math.pi / 20.0) / 500,
        output_dir=str(tmp_path),
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


class TestRunConfig:
    def test_defaults_are_valid_and_match_reference_setup(self):
        config = RunConfig()
        assert (config.L, config.h, config.a) == (10.0, 1.0, 0.25)
        assert (config.c_par, config.c_perp) == (1.0, 2.0)
        assert (config.eps, config.omega_freq) == (0.1, 20.0)
        assert len(config.phases) == 13
        params = config.params()
        assert params.L == 1.0
        assert params.lambda_ == pytest.approx(0.624196, abs=5e-7)

    def test_dimensional_convention_keeps_lengths(self):
        config = RunConfig(length_convention="dimensional")
        assert config.params().L == 10.0

    def test_from_dict_with_unit_suffixed_keys(self):
        config = RunConfig.from_dict({
            "L_um": 8.0, "h_um": 0.5, "a_um": 0.1,
            "c_par_Ns_per_um2": 1.0, "c_perp_Ns_per_um2": 2.0,
            "eps_rad": 0.05, "omega_freq_rad_per_s": 10.0,
            "phases_rad": [0.0, 1.0], "n_periods": 2,
            "dt_s": None, "length_convention": "dimensional",
            "output_dir": "out",
        })
        assert config.L == 8.0 and config.n_periods == 2
        assert config.phases == (0.0, 1.0)

    def test_rejects_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            RunConfig.from_dict({"L_microns": 10.0})

    def test_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            RunConfig(eps=-0.1)
        with pytest.raises(ConfigError):
            RunConfig(length_convention="furlongs")
        with pytest.raises(ConfigError):
            RunConfig(h=20.0)  # h > L breaks the coupling bound
        with pytest.raises(ConfigError):
            RunConfig(phases=())

    def test_from_json_roundtrip(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"eps_rad": 0.07, "phases_rad": [0.0, 0.5]}))
        config = RunConfig.from_json(path)
        assert config.eps == 0.07 and config.phases == (0.0, 0.5)

    def test_from_json_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ConfigError):
            RunConfig.from_json(path)


class TestPhaseSweep:
    def test_records_sorted_and_populated(self, tmp_path):
        config = fast_config(tmp_path)
        records = phase_sweep(config)
        assert [r.phi for r in records] == sorted(r.phi for r in records)
        assert all(r.error is None for r in records)
        assert all(r.delta_m_numeric >= 0 and r.delta_m_theory >= 0 for r in records)
        assert records[-1].delta_m_numeric > records[1].delta_m_numeric
        assert all(np.isfinite(r.runtime) and r.runtime >= 0 for r in records)

    def test_csv_contract(self, tmp_path):
        config = fast_config(tmp_path)
        phase_sweep(config)
        lines = (tmp_path / "phase_sweep.csv").read_text().splitlines()
        assert lines[0] == "phi,delta_m_numeric,delta_m_theory,rel_err"
        assert len(lines) == 1 + len(config.phases)
        assert (tmp_path / "phase_sweep.svg").exists()

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            phase_sweep(fast_config(out))
        assert (out1 / "phase_sweep.csv").read_bytes() == (out2 / "phase_sweep.csv").read_bytes()
        assert (out1 / "phase_sweep.svg").read_bytes() == (out2 / "phase_sweep.svg").read_bytes()

    def test_per_phase_failures_are_isolated(self, tmp_path, monkeypatch):
        real_integrate = experiments_module.integrate
        bad_phi = math.pi / 4

        def flaky(state, params, stroke, **kwargs):
            if stroke.phi == bad_phi:
                raise RuntimeError("synthetic failure")
            return real_integrate(state, params, stroke, **kwargs)

        monkeypatch.setattr(experiments_module, "integrate", flaky)
        records = phase_sweep(fast_config(tmp_path))
        by_phi = {r.phi: r for r in records}
        assert "synthetic failure" in by_phi[bad_phi].error
        assert math.isnan(by_phi[bad_phi].delta_m_numeric)
        others = [r for r in records if r.phi != bad_phi]
        assert all(r.error is None for r in others)

    def test_sin_squared_fit_recovers_amplitude(self):
        phases = np.array(DEFAULT_PHASES)
        amplitude, r_squared = sin_squared_fit(phases, 3.5 * np.sin(phases) ** 2)
        assert amplitude == pytest.approx(3.5, rel=1e-12)
        assert r_squared == pytest.approx(1.0, abs=1e-12)


class TestReport:
    def test_headline_numbers(self, tmp_path):
        config = RunConfig(output_dir=str(tmp_path))
        report = theory_vs_numeric_report(config)
        assert report["delta_m_theory"] == pytest.approx(1.7233e-6, rel=1e-3)
        assert report["delta_m_numeric"] == pytest.approx(2.0318e-6, rel=0.02)
        assert 0.10 <= report["relative_error"] <= 0.20
        assert report["loop_area_relative_error"] == pytest.approx(0.21, abs=0.01)
        assert report["rate_independence_passed"]
        assert report["theory_scaling_double_omega_fixed_tau"] == pytest.approx(4.0, rel=1e-12)
        assert (tmp_path / "report.json").exists()

    def test_json_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            theory_vs_numeric_report(RunConfig(output_dir=str(out)))
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    def test_decoupled_pair_flags_error_undefined(self, tmp_path):
        # h = L removes the interaction entirely; both displacements vanish
        config = RunConfig(h=10.0, output_dir=str(tmp_path))
        report = theory_vs_numeric_report(config, write=False)
        assert report["delta_m_numeric"] < 1e-9
        assert report["delta_m_theory"] == 0.0
        assert report["relative_error"] is None
        assert report["rate_independence_passed"]


class TestLambdaStudy:
    def test_reference_bounds(self, tmp_path):
        config = RunConfig(output_dir=str(tmp_path))
        report = lambda_study(config, kappa=10.0)
        assert report["C_tilde_at_lower"] == pytest.approx(0.0043, abs=5e-4)
        assert report["C_tilde_at_upper"] == pytest.approx(0.0140, abs=5e-4)
        assert report["grid_monotone_increasing"]
        assert report["band_bracketing_ok"]
        lines = (tmp_path / "lambda_study.csv").read_text().splitlines()
        assert lines[0] == "lambda,C_tilde"
        assert len(lines) == 1 + report["grid_size"]
        assert (tmp_path / "lambda_study.svg").exists()

    def test_rejects_kappa_outside_window(self, tmp_path):
        config = RunConfig(output_dir=str(tmp_path))
        with pytest.raises(ConfigError):
            lambda_study(config, kappa=2.0)
        with pytest.raises(ConfigError):
            lambda_study(config, kappa=45.0)


class TestNullTests:
    def test_passes_with_reference_setup(self, tmp_path):
        config = fast_config(tmp_path, phases=DEFAULT_PHASES)
        report = null_tests(config)
        assert report["decoupled_passed"]
        assert report["decoupled_max_drift"] < 1e-9
        assert report["sync_passed"]
        assert report["sync_ratio"] <= 1e-2
        assert report["all_passed"]
        assert (tmp_path / "null_tests.json").exists()

    def test_tightened_tolerance_fails(self, tmp_path):
        config = fast_config(tmp_path, phases=DEFAULT_PHASES)
        report = null_tests(config, tolerance_scale=1e-12)
        assert not report["all_passed"]


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def write_config(self, tmp_path, **extra):
        raw = {"phases_rad": [0.0, math.pi / 2],
               "dt_s": (2 * math.pi / 20.0) / 500,
               "output_dir": str(tmp_path)}
        raw.update(extra)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(raw))
        return str(path)

    def test_version_smoke(self, capsys):
        assert self.run("--version") == 0
        assert "scallop-pair" in capsys.readouterr().out

    def test_phase_sweep_command(self, tmp_path, capsys):
        assert self.run("phase-sweep", "--config", self.write_config(tmp_path)) == 0
        assert (tmp_path / "phase_sweep.csv").exists()
        assert "argmax" in capsys.readouterr().out

    def test_report_command(self, tmp_path, capsys):
        assert self.run("report", "--config", self.write_config(tmp_path)) == 0
        assert (tmp_path / "report.json").exists()

    def test_lambda_study_command(self, tmp_path):
        assert self.run("lambda-study", "--config", self.write_config(tmp_path),
                        "--kappa", "10") == 0
        assert (tmp_path / "lambda_study.csv").exists()

    def test_null_tests_command(self, tmp_path):
        assert self.run("null-tests", "--config", self.write_config(tmp_path)) == 0

    def test_integrate_command(self, tmp_path):
        assert self.run("integrate", "--config", self.write_config(tmp_path),
                        "--phi", str(math.pi / 3)) == 0
        assert (tmp_path / "trajectory.csv").exists()

    def test_out_flag_overrides_config(self, tmp_path):
        override = tmp_path / "elsewhere"
        assert self.run("integrate", "--config", self.write_config(tmp_path),
                        "--out", str(override)) == 0
        assert (override / "trajectory.csv").exists()

    def test_invalid_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"eps_rad": -0.5}))
        assert self.run("report", "--config", str(bad)) == 2

    def test_unknown_key_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"L_meters": 1.0}))
        assert self.run("report", "--config", str(bad)) == 2

    def test_coarse_dt_exits_2(self, tmp_path):
        assert self.run("integrate", "--config", self.write_config(tmp_path),
                        "--dt", str(2 * math.pi / 20.0 / 50)) == 2

    def test_singular_coupling_exits_3(self, tmp_path):
        # h chosen so the coupling strength is 0.99999: beyond invertibility
        h = 10.0 * (0.25 / 10.0) ** 0.99999
        config = self.write_config(tmp_path, h_um=h)
        assert self.run("integrate", "--config", config) == 3

    def test_failed_null_tests_exit_4(self, tmp_path):
        assert self.run("null-tests", "--config", self.write_config(tmp_path),
                        "--tolerance-scale", "1e-12") == 4

    def test_console_script_entry_point(self):
        result = subprocess.run(
            [sys.executable, "-m", "scallop_pair.cli", "--version"],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert "scallop-pair" in result.stdout
