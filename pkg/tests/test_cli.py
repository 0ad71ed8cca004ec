import json
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from rdslab.cli import main
from rdslab.config import ConfigError, parse_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_cli(args):
    return CliRunner().invoke(main, args)


class TestParseConfig:
    def test_fig8_file_echoes_parameters(self):
        cfg = parse_config("sync", config_file=CONFIGS / "fig8_sync.toml")
        assert cfg.params["eps"] == 0.5
        assert cfg.params["tau"] == 0.283
        assert cfg.params["sigma"] == 0.3
        assert cfg.seed == 42

    def test_flag_overrides_file(self):
        cfg = parse_config(
            "sync", config_file=CONFIGS / "fig8_sync.toml",
            flag_params={"sigma": 0.1},
        )
        assert cfg.params["sigma"] == 0.1

    def test_range_error_names_key_and_constraint(self):
        with pytest.raises(ConfigError, match=r"eps.*\[0,1\)"):
            parse_config(
                "sync", config_file=CONFIGS / "fig8_sync.toml",
                flag_params={"eps": 1.5},
            )

    def test_unknown_key_fatal(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text('command = "sync"\n[params]\ntau = 0.1\nx0s = [0.0, 0.5]\n'
                     'n = 10\nbogus = 3\n')
        with pytest.raises(ConfigError, match="bogus"):
            parse_config("sync", config_file=f)

    def test_missing_required_key(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text('command = "sync"\n[params]\ntau = 0.1\n')
        with pytest.raises(ConfigError, match="missing required key.*x0s|missing required key.*n"):
            parse_config("sync", config_file=f)

    def test_command_mismatch(self):
        with pytest.raises(ConfigError, match="sync"):
            parse_config("pdf", config_file=CONFIGS / "fig8_sync.toml")

    def test_type_errors(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text('command = "pdf"\n[params]\ntau = "a"\neps = 0.1\nsigma = 0.1\n')
        with pytest.raises(ConfigError, match="tau"):
            parse_config("pdf", config_file=f)


class TestCliRuns:
    def test_sync_run_and_manifest(self, tmp_path):
        out = tmp_path / "o"
        res = run_cli(["sync", "--config", str(CONFIGS / "fig8_sync.toml"),
                       "--out", str(out), "--n", "50"])
        assert res.exit_code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "sync"
        assert manifest["partial"] is False
        assert (out / "sync.csv").exists()
        header = (out / "sync.csv").read_text().splitlines()[0]
        assert header == "step,x_1,x_2,x_3,sup_dist"

    def test_tongues_determinism_byte_identical(self, tmp_path):
        args = ["tongues", "--tau-lo", "0.0", "--tau-hi", "1.0", "--n-tau", "40",
                "--eps-lo", "0.1", "--eps-hi", "0.3", "--n-eps", "3",
                "--sigma", "0.05", "--k", "2000", "--burn-in", "200", "--seed", "5"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        r1 = run_cli(args + ["--out", str(out1), "--workers", "1"])
        r2 = run_cli(args + ["--out", str(out2), "--workers", "8"])
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert (out1 / "tongues.csv").read_bytes() == (out2 / "tongues.csv").read_bytes()
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        assert m1["outputs"][0]["sha256"] == m2["outputs"][0]["sha256"]

    def test_classify_sigma0_deterministic_shortcircuit(self, tmp_path):
        out = tmp_path / "o"
        res = run_cli(["classify", "--tau", "0.05", "--eps", "0.1",
                       "--sigma", "0.0", "--lyap-n", "20000",
                       "--out", str(out)])
        assert res.exit_code == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["deterministic"] is True
        assert rep["kind"] == "deterministic"
        assert rep["tongue"] == [0, 1]

    def test_config_error_exit_code(self, tmp_path):
        res = run_cli(["sync", "--config", str(CONFIGS / "fig8_sync.toml"),
                       "--eps", "1.5", "--out", str(tmp_path / "o")])
        assert res.exit_code == 2

    def test_validation_error_exit_code(self, tmp_path):
        # sigma = 0 violates the conjugacy precondition at the schema level
        res = run_cli(["conjugacy", "--tau-a", "0.1", "--tau-b", "0.2",
                       "--eps", "0.5", "--sigma", "0.0",
                       "--out", str(tmp_path / "o")])
        assert res.exit_code == 2

    def test_qg_blowup_partial_artifacts(self, tmp_path):
        out = tmp_path / "o"
        res = run_cli(["qg-run", "--nx", "16", "--ny", "20", "--tau-w", "80.0",
                       "--nu", "1e-4", "--dt", "0.2", "--t-max", "400.0",
                       "--window", "10.0", "--perturb-sign", "1",
                       "--out", str(out)])
        assert res.exit_code == 4
        err = json.loads((out / "error.json").read_text())
        assert err["error"] == "blow_up"
        assert (out / "diagnostics.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["partial"] is True

    def test_subcritical_config_parses(self):
        cfg = parse_config("qg-run", config_file=CONFIGS / "subcritical.toml")
        assert cfg.params["tau_w"] == 0.3
        cfg2 = parse_config("qg-bif", config_file=CONFIGS / "pitchfork.toml")
        assert cfg2.params["tau_w_values"] == [0.62, 0.66, 0.70, 0.74, 0.78, 0.82]

    def test_entrypoint_subprocess(self, tmp_path):
        out = tmp_path / "o"
        proc = subprocess.run(
            [sys.executable, "-m", "rdslab.cli", "lyapunov", "--tau", "0.283",
             "--eps", "0.5", "--sigma", "0.3",
             "--convention", "critical_normalized", "--n", "100000",
             "--out", str(out), "--seed", "4"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        rec = json.loads((out / "lyapunov.json").read_text())
        assert -0.05 < rec["lyapunov"] < 0.0
