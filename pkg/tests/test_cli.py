"""Config validation, experiment drivers, and the command-line interface."""

import json

import numpy as np
import pytest

from diraclab.checkpoint import save_checkpoint
from diraclab.cli import main
from diraclab.driver import (
    ConfigError,
    random_band_limited_data,
    run_config,
    validate_config,
)
from diraclab.grid import Grid2D


def simulate_config(tmp_path, **options):
    opts = {"n": 16, "t_final": 0.02, "dt": 2e-3, "radius": 3.0,
            "amplitude": 0.3, "diagnostics_every": 2}
    opts.update(options)
    return {
        "experiment": "simulate",
        "seed": 11,
        "options": opts,
        "params": {"kappa": 1.0, "ell": 1},
        "output_dir": str(tmp_path / "out"),
    }


class TestValidation:
    def test_unknown_experiment_lists_key(self):
        with pytest.raises(ConfigError) as e:
            validate_config({"experiment": "nope", "seed": 1})
        assert "experiment" in e.value.keys

    def test_missing_or_wrong_seed(self):
        with pytest.raises(ConfigError) as e:
            validate_config({"experiment": "simulate"})
        assert "seed" in e.value.keys
        with pytest.raises(ConfigError) as e:
            validate_config({"experiment": "simulate", "seed": "abc"})
        assert "seed" in e.value.keys

    def test_collects_all_offenders(self):
        with pytest.raises(ConfigError) as e:
            validate_config({"experiment": "nope", "seed": None,
                             "options": [], "bogus": 1})
        assert set(e.value.keys) == {"experiment", "seed", "options", "bogus"}

    def test_valid_config_passes(self, tmp_path):
        validate_config(simulate_config(tmp_path))

    def test_band_limited_data_guard(self):
        with pytest.raises(ConfigError):
            random_band_limited_data(Grid2D(16), radius=-1.0, amplitude=1.0, seed=0)


class TestRunConfig:
    def test_simulate_writes_artifacts(self, tmp_path):
        cfg = simulate_config(tmp_path, save_state=True)
        out = run_config(cfg)
        assert (out / "simulate.csv").exists()
        assert (out / "simulate.json").exists()
        assert (out / "simulate.png").exists()
        assert (out / "final_state.dhc").exists()
        payload = json.loads((out / "simulate.json").read_text())
        assert payload["experiment"] == "simulate"
        assert payload["fitted"]["charge_drift"] < 1e-10

    def test_free_flow_charge_exact(self, tmp_path):
        cfg = simulate_config(tmp_path)
        cfg["params"] = {"kappa": 0.0}
        run_config(cfg)
        payload = json.loads((tmp_path / "out" / "simulate.json").read_text())
        assert payload["fitted"]["charge_drift"] < 1e-12

    def test_reports_are_deterministic(self, tmp_path):
        cfg = simulate_config(tmp_path)
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_config(cfg, output_dir=a)
        run_config(cfg, output_dir=b)
        assert (a / "simulate.csv").read_bytes() == (b / "simulate.csv").read_bytes()

    def test_picard_rows(self, tmp_path):
        cfg = {"experiment": "picard", "seed": 3,
               "options": {"n": 16, "T": 0.05, "n_iter": 4, "radius": 3.0,
                           "amplitude": 0.05},
               "params": {"kappa": 1.0, "ell": 1}}
        out = run_config(cfg, output_dir=tmp_path / "p")
        payload = json.loads((out / "picard.json").read_text())
        assert payload["fitted"]["diverged"] is False
        assert payload["n_rows"] == 4

    def test_illposed_sweep_csv_columns(self, tmp_path):
        cfg = {"experiment": "illposed-sweep", "seed": 0,
               "options": {"ell": 1, "s_values": [0.25],
                           "lambdas": [8, 16, 32], "quad_points": 4}}
        out = run_config(cfg, output_dir=tmp_path / "i")
        header = (out / "illposed-sweep.csv").read_text().splitlines()[0]
        assert header == ("ell,s,epsilon,delta,lambda,mu,t,"
                          "phi_Hs,L_Hs,ratio,fitted_slope,predicted_slope")


class TestCli:
    def run(self, capsys, *argv):
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, out

    def test_run_simulate(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(simulate_config(tmp_path)))
        code, out = self.run(capsys, "run", str(cfg_path))
        assert code == 0
        assert json.loads(out.strip().splitlines()[-1])["ok"] is True

    def test_run_invalid_config_exit_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"experiment": "nope", "seed": 1}))
        code, out = self.run(capsys, "run", str(cfg_path))
        assert code == 2
        err = json.loads(out)["error"]
        assert err["type"] == "validation"
        assert "experiment" in err["keys"]

    def test_run_unparseable_json(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{not json")
        code, out = self.run(capsys, "run", str(cfg_path))
        assert code == 2
        assert json.loads(out)["error"]["type"] == "parse"

    def test_run_missing_file(self, tmp_path, capsys):
        code, out = self.run(capsys, "run", str(tmp_path / "absent.json"))
        assert code == 2
        assert json.loads(out)["error"]["type"] == "io"

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_runtime_failure_exit_3(self, tmp_path, capsys):
        # enormous amplitude with a coarse step blows up the nonlinear
        # substep, which must surface as a runtime error, not a traceback
        cfg = simulate_config(tmp_path, amplitude=1e8, t_final=0.2, dt=0.05)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code, out = self.run(capsys, "run", str(cfg_path))
        assert code == 3
        assert json.loads(out)["error"]["type"] == "BlowupError"

    def test_inspect(self, tmp_path, capsys):
        from conftest import random_field

        f = random_field(Grid2D(8), 0)
        path = tmp_path / "f.dhc"
        save_checkpoint(f, path)
        code, out = self.run(capsys, "inspect", str(path))
        assert code == 0
        info = json.loads(out)
        assert info["n"] == 8
        assert info["l2_norm"] == pytest.approx(f.l2_norm(), rel=1e-12)

    def test_inspect_bad_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.dhc"
        bad.write_bytes(b"junk")
        code, out = self.run(capsys, "inspect", str(bad))
        assert code == 2
        assert json.loads(out)["error"]["type"] == "checkpoint"

    def test_output_dir_override(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(simulate_config(tmp_path)))
        other = tmp_path / "elsewhere"
        code, out = self.run(capsys, "run", str(cfg_path),
                             "--output-dir", str(other))
        assert code == 0
        assert (other / "simulate.csv").exists()
