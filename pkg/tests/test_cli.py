"""Command-line pipelines: artifacts, determinism, exit codes."""

import csv
import json

import pytest

from kgflow.cli import ConfigError, load_config, main

CUBIC = [{"u": 3, "coeff": 1.0}]

TINY_GRID = {"n": 256, "half_length": 20.0}
TINY_SOLVER = {"dt": 0.05, "t_end": 3.0, "epsilon": 0.05}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestConfigLoading:
    def test_defaults_filled(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {}))
        assert cfg["grid"]["n"] == 4096
        assert cfg["solver"]["epsilon"] == 0.05
        assert cfg["seed"] == 0

    def test_partial_section_merge(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"grid": {"n": 128}}))
        assert cfg["grid"]["n"] == 128
        assert cfg["grid"]["half_length"] == 100.0

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_non_object_top_level(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestCheckNull:
    def test_cubic_power_is_null(self, tmp_path):
        cfg = write_config(tmp_path, {"nonlinearity": CUBIC})
        out = tmp_path / "out"
        assert main(["check-null", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "null_report.json").read_text())
        assert report["verdict"] is True
        assert (out / "resolved_config.json").exists()

    def test_time_derivative_cube_is_nonnull(self, tmp_path):
        cfg = write_config(tmp_path,
                           {"nonlinearity": [{"ut": 3, "coeff": 1.0}]})
        out = tmp_path / "out"
        assert main(["check-null", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "null_report.json").read_text())
        assert report["verdict"] is False
        assert any(c != "0" for c in report["q_coefficients"])

    def test_missing_nonlinearity_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, {})
        assert main(["check-null", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2

    def test_unknown_field_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path,
                           {"nonlinearity": [{"u": 3, "bogus": 1}]})
        assert main(["check-null", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2

    def test_quartic_rejected(self, tmp_path):
        cfg = write_config(tmp_path, {"nonlinearity": [{"u": 4}]})
        assert main(["check-null", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2


class TestSimulate:
    def test_artifacts_and_columns(self, tmp_path):
        cfg = write_config(tmp_path, {"nonlinearity": CUBIC,
                                      "grid": TINY_GRID,
                                      "solver": TINY_SOLVER})
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "norms.csv")
        assert rows[0] == ["t", "linf_u", "sqrt_t_linf", "E0", "EZ1", "Hs"]
        assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
        snap = read_csv(out / "snapshot_final.csv")
        assert snap[0] == ["x", "u", "ut"]
        assert len(snap) == 1 + TINY_GRID["n"]

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_abort_flushes_partial_rows(self, tmp_path):
        cfg = write_config(tmp_path, {
            "nonlinearity": [{"ut": 3, "coeff": 2.0}],
            "grid": TINY_GRID,
            "solver": {"dt": 0.05, "t_end": 30.0, "epsilon": 0.9}})
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 1
        rows = read_csv(out / "norms.csv")
        assert len(rows) > 1  # header plus the rows observed before abort

    def test_bad_epsilon_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, {"grid": TINY_GRID,
                                      "solver": {"epsilon": 1.5}})
        assert main(["simulate", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2


class TestProfilePipelines:
    def profile_config(self, tmp_path, **overrides):
        payload = {"nonlinearity": CUBIC, "grid": TINY_GRID,
                   "solver": {"dt": 0.05, "t_end": 12.0, "epsilon": 0.05},
                   "profile": {"stations": [0.0, 0.3]}}
        payload.update(overrides)
        return write_config(tmp_path, payload)

    def test_extract_profile(self, tmp_path):
        cfg = self.profile_config(tmp_path)
        out = tmp_path / "out"
        assert main(["extract-profile", "--config", cfg,
                     "--out", str(out)]) == 0
        rows = read_csv(out / "profile.csv")
        assert rows[0] == ["t", "x_station", "re", "im", "phase_residual"]
        assert len(rows) == 1 + 12 * 2  # 12 observation times, 2 stations

    def test_fit_scattering(self, tmp_path):
        cfg = self.profile_config(tmp_path)
        out = tmp_path / "out"
        assert main(["fit-scattering", "--config", cfg,
                     "--out", str(out)]) == 0
        rows = read_csv(out / "fit.csv")
        assert rows[0] == ["x_station", "amplitude", "phase_slope",
                           "predicted_slope", "relative_error",
                           "residual_rms"]
        assert len(rows) == 3

    def test_empty_stations_is_config_error(self, tmp_path):
        cfg = self.profile_config(tmp_path, profile={"stations": []})
        assert main(["extract-profile", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2

    def test_exterior_station_is_config_error(self, tmp_path):
        cfg = self.profile_config(tmp_path, profile={"stations": [0.95]})
        assert main(["extract-profile", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2

    def test_too_few_samples_is_config_error(self, tmp_path):
        cfg = self.profile_config(
            tmp_path, solver={"dt": 0.05, "t_end": 4.0, "epsilon": 0.05})
        assert main(["fit-scattering", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2


class TestBenches:
    BENCH = {"h_exponents": [3, 4], "M": 64, "X": 2.5,
             "orders": [0], "width": 0.5}

    def test_moyal_bench(self, tmp_path):
        cfg = write_config(tmp_path, {"bench": self.BENCH})
        out = tmp_path / "out"
        assert main(["moyal-bench", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "moyal_bench.csv")
        assert rows[0] == ["k", "h", "error", "fitted_slope"]
        assert len(rows) == 3
        errs = [float(r[2]) for r in rows[1:]]
        assert errs[0] > errs[1] > 0.0

    def test_opnorm_bench(self, tmp_path):
        cfg = write_config(tmp_path, {"bench": self.BENCH})
        out = tmp_path / "out"
        assert main(["opnorm-bench", "--config", cfg, "--out", str(out)]) == 0
        rows = read_csv(out / "opnorm_bench.csv")
        assert rows[0] == ["target", "h", "norm", "fitted_slope"]
        assert all(r[0] == "L2_to_Linf" for r in rows[1:])

    def test_mismatched_m_list_is_config_error(self, tmp_path):
        bench = dict(self.BENCH, M=[64, 64, 64])
        cfg = write_config(tmp_path, {"bench": bench})
        assert main(["moyal-bench", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2

    def test_bad_target_is_config_error(self, tmp_path):
        bench = dict(self.BENCH, target="Linf_to_L2")
        cfg = write_config(tmp_path, {"bench": bench})
        assert main(["opnorm-bench", "--config", cfg,
                     "--out", str(tmp_path / "o")]) == 2


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, {"nonlinearity": CUBIC,
                                      "grid": TINY_GRID,
                                      "solver": TINY_SOLVER})
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("norms.csv", "snapshot_final.csv",
                     "resolved_config.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_resolved_config_echoes_defaults(self, tmp_path):
        cfg = write_config(tmp_path, {"grid": TINY_GRID,
                                      "solver": TINY_SOLVER})
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        resolved = json.loads((out / "resolved_config.json").read_text())
        assert resolved["grid"] == TINY_GRID
        assert resolved["frame"] == {"M": 1024, "X": 1.2}
        assert resolved["solver"]["sobolev_s"] == 4.0
