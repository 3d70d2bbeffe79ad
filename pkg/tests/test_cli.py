import json
import math

import numpy as np
import pytest

from rdmlab import cli
from rdmlab.errors import ConfigError


def run_cli(args):
    return cli.main(args)


class TestConfigParsing:
    def test_dotted_text(self):
        raw = cli.parse_config_text(
            "experiment = detector-scenario\n"
            "seed = 7\n"
            "alpha_sq = 0.64  # comment\n"
            "\n"
            "rdm.locking = true\n")
        assert raw == {"experiment": "detector-scenario", "seed": 7,
                       "alpha_sq": 0.64, "rdm.locking": True}

    def test_malformed_line(self):
        with pytest.raises(ConfigError):
            cli.parse_config_text("no equals sign here\n")

    def test_manifest_json_source(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps({"experiment": "hydrogen-cloud", "seed": 3,
                                    "config": {"a0": 2.0, "n_samples": 10}}))
        raw = cli.load_config_source(path)
        cfg = cli.validate(raw)
        assert cfg.experiment == "hydrogen-cloud"
        assert cfg.seed == 3
        assert cfg.parameters["a0"] == 2.0


class TestValidate:
    def test_defaults_fill_in(self):
        cfg = cli.validate({"experiment": "electron-interference", "seed": 1})
        assert cfg.parameters["splitter.alpha_sq"] == 0.5
        assert cfg.parameters["grid.n_points"] == 1024

    def test_missing_seed_warns_and_defaults(self):
        cfg = cli.validate({"experiment": "hydrogen-cloud"})
        assert cfg.seed == 0
        assert any("seed" in w for w in cfg.warnings)

    def test_all_problems_reported_together(self):
        raw = {"experiment": "electron-interference",
               "splitter.alpha_sq": 1.2,
               "grid.n_points": 100,
               "bogus.key": 1}
        with pytest.raises(ConfigError) as exc:
            cli.validate(raw, {"seed": 0})
        text = "\n".join(exc.value.problems)
        assert "splitter.alpha_sq" in text
        assert "grid.n_points" in text
        assert "bogus.key" in text
        assert len(exc.value.problems) == 3

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            cli.validate({"experiment": "warp-drive", "seed": 0})

    def test_detector_time_ordering(self):
        raw = {"experiment": "detector-scenario", "seed": 0,
               "t_d2": 2.0, "t_d3": 1.0}
        with pytest.raises(ConfigError) as exc:
            cli.validate(raw)
        assert any("t_d2" in p for p in exc.value.problems)

    def test_type_mismatch(self):
        raw = {"experiment": "hydrogen-cloud", "seed": 0, "n_samples": "lots"}
        with pytest.raises(ConfigError):
            cli.validate(raw)


class TestJsonWriter:
    def test_float_precision_round_trip(self):
        value = 1.0 / 3.0
        text = cli.to_json({"v": value})
        assert json.loads(text)["v"] == value

    def test_nan_serialized_as_string(self):
        assert json.loads(cli.to_json({"v": float("nan")}))["v"] == "NaN"

    def test_nested_layout_is_valid_json(self):
        obj = {"a": [1, 2.5, True], "b": {"c": None, "d": "text"}}
        assert json.loads(cli.to_json(obj)) == {
            "a": [1, 2.5, True], "b": {"c": None, "d": "text"}}


class TestRunners:
    def test_detector_scenario_end_to_end(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = detector-scenario\nseed = 5\n"
                        "alpha_sq = 0.64\ntrials = 20000\nrdm.locking = false\n")
        code = run_cli(["--config", str(conf), "--out", str(tmp_path / "out"),
                        "--quiet"])
        assert code == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        rate = summary["results"]["d3_after_silent_d2"] / 20000
        assert rate == pytest.approx(0.64 * 0.36, abs=0.01)

    def test_electron_interference_metrics(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = electron-interference\nseed = 0\n"
                        "n_samples = 200000\nsplitter.alpha_sq = 0.5\n")
        assert run_cli(["--config", str(conf), "--out", str(tmp_path / "o"),
                        "--quiet"]) == 0
        res = json.loads((tmp_path / "o" / "summary.json").read_text())["results"]
        assert res["visibility"] == pytest.approx(1.0, abs=0.05)
        assert res["period"] == pytest.approx(math.pi / 5.0, rel=0.02)
        lines = (tmp_path / "o" / "pattern.csv").read_text().splitlines()
        assert lines[0] == "x,intensity"
        assert len(lines) == 1025

    def test_relativity_scan_outputs(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = relativity-scan\nseed = 0\n")
        assert run_cli(["--config", str(conf), "--out", str(tmp_path / "o"),
                        "--quiet"]) == 0
        res = json.loads((tmp_path / "o" / "summary.json").read_text())["results"]
        assert res["all_spacelike"] is True
        assert res["all_e_before_v"] is True
        assert res["max_simultaneity_residual"] < 1e-12

    def test_ac_phase_line_charge(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = ac-phase\nseed = 0\n")
        assert run_cli(["--config", str(conf), "--out", str(tmp_path / "o"),
                        "--quiet"]) == 0
        res = json.loads((tmp_path / "o" / "summary.json").read_text())["results"]
        assert res["abs_error"] < 1e-6

    def test_hydrogen_cloud(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = hydrogen-cloud\nseed = 2\n"
                        "n_samples = 200000\n")
        assert run_cli(["--config", str(conf), "--out", str(tmp_path / "o"),
                        "--quiet"]) == 0
        res = json.loads((tmp_path / "o" / "summary.json").read_text())["results"]
        assert res["mean_radius"] == pytest.approx(1.5, abs=0.02)
        assert res["modal_radius"] == pytest.approx(1.0, abs=0.05)

    def test_validation_failure_exit_code(self, tmp_path, capsys):
        conf = tmp_path / "bad.conf"
        conf.write_text("experiment = electron-interference\nseed = 0\n"
                        "splitter.alpha_sq = 1.2\ngrid.n_points = 100\n")
        assert run_cli(["--config", str(conf), "--quiet"]) == 2
        err = capsys.readouterr().err
        assert "splitter.alpha_sq" in err
        assert "grid.n_points" in err

    def test_missing_experiment_exit_code(self, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("seed = 0\n")
        assert run_cli(["--config", str(conf), "--quiet"]) == 2


class TestReproducibility:
    CONF = ("experiment = rdm-sample\nseed = 9\ndensity = screen\n"
            "n_samples = 150000\n")

    def run_to(self, tmp_path, name, extra_args=()):
        conf = tmp_path / "run.conf"
        conf.write_text(self.CONF)
        out = tmp_path / name
        assert run_cli(["--config", str(conf), "--out", str(out), "--quiet",
                        *extra_args]) == 0
        return out

    def test_byte_identical_reruns(self, tmp_path):
        a = self.run_to(tmp_path, "a")
        b = self.run_to(tmp_path, "b")
        for name in ("samples.csv", "summary.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_thread_count_independent(self, tmp_path):
        a = self.run_to(tmp_path, "a")
        b = self.run_to(tmp_path, "b", ["--threads", "4"])
        assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()

    def test_manifest_reproduces_run(self, tmp_path):
        a = self.run_to(tmp_path, "a")
        out = tmp_path / "c"
        assert run_cli(["--config", str(a / "manifest.json"),
                        "--out", str(out), "--quiet"]) == 0
        assert (a / "samples.csv").read_bytes() == (out / "samples.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (out / "summary.json").read_bytes()

    def test_detector_threads_independent(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("experiment = detector-scenario\nseed = 4\n"
                        "trials = 30000\n")
        out1, out2 = tmp_path / "t1", tmp_path / "t4"
        assert run_cli(["--config", str(conf), "--out", str(out1), "--quiet"]) == 0
        assert run_cli(["--config", str(conf), "--out", str(out2), "--quiet",
                        "--threads", "4"]) == 0
        assert ((out1 / "summary.json").read_bytes()
                == (out2 / "summary.json").read_bytes())
