import math

import numpy as np
import pytest

from dampedwave import ConfigError, parse_config, preset
from dampedwave.cli import main

SMALL_CONFIG = """
a: 1.0
b: 0.2
n_modes: 4
alpha_rule: dirichlet_1d
lambda_rule: paper
t_horizon: 2.0
dt: 0.001
scheme: exact
seed: 77
stride: 500
replications: 3
out_dir: {out_dir}
u0: 1.0
v0: 1.0
estimators:
  - {{kind: abar_k, k: 1}}
  - {{kind: bbar_jk, j: 1, k: 1}}
"""


def write_config(tmp_path, out_name="out"):
    path = tmp_path / "run.yaml"
    path.write_text(SMALL_CONFIG.format(out_dir=tmp_path / out_name))
    return path


class TestParseConfig:
    def test_preset_is_valid_reference_setup(self):
        config = preset("paper")
        assert config.a == 1.0 and config.b == 0.2
        assert config.n_modes == 10
        assert config.t_horizon == 1000.0 and config.dt == 1e-4
        assert config.alphas[0] == pytest.approx(math.pi**2)
        assert config.lambdas == tuple(1000.0 / n**2 for n in range(1, 11))
        assert [spec.label for spec in config.estimators] == [
            "abar_k1",
            "abar_k10",
            "bbar_j1_k1",
            "bbar_j10_k10",
            "bbar_j1_a",
            "bbar_j10_a",
        ]
        assert config.u0 == (1.0,) * 10 and config.v0 == (1.0,) * 10

    def test_dt_must_be_smaller_than_horizon(self):
        with pytest.raises(ConfigError, match="dt"):
            parse_config(
                "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\n"
                "t_horizon: 1.0\ndt: 1.0\nseed: 1\n"
            )

    def test_estimator_mode_out_of_range(self):
        with pytest.raises(ConfigError, match="estimators\\[0\\].k"):
            parse_config(
                "a: 1\nb: 1\nn_modes: 10\nalpha_rule: dirichlet_1d\nlambda_rule: paper\n"
                "t_horizon: 1.0\ndt: 0.1\nseed: 1\n"
                "estimators:\n  - {kind: abar_k, k: 11}\n"
            )

    def test_unknown_key_rejected_with_path(self):
        with pytest.raises(ConfigError, match="unknown keys.*not_a_key"):
            parse_config(
                "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\n"
                "t_horizon: 1.0\ndt: 0.1\nseed: 1\nnot_a_key: 3\n"
            )

    def test_defaults(self):
        config = parse_config(
            "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\n"
            "t_horizon: 1.0\ndt: 0.1\nseed: 1\n"
        )
        assert config.scheme == "euler"
        assert config.quadrature == "left_riemann"
        assert config.stride == 10000
        assert config.estimators == ()

    def test_missing_required_key_names_it(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_config(
                "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\nt_horizon: 1.0\ndt: 0.1\n"
            )

    def test_spectrum_rules_exclusive_with_vectors(self):
        with pytest.raises(ConfigError, match="mutually exclusive"):
            parse_config(
                "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nalpha_rule: dirichlet_1d\n"
                "lambdas: [1.0]\nt_horizon: 1.0\ndt: 0.1\nseed: 1\n"
            )


class TestVarianceCommand:
    def test_reference_variance_table(self, capsys):
        assert main(["variance", "--preset", "paper"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "estimator,variance"
        table = {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}
        assert round(table["abar_k1"], 4) == 1.0000
        assert round(table["abar_k10"], 4) == 1.0000
        assert round(table["bbar_j1_k1"], 4) == 0.0811
        assert round(table["bbar_j10_k10"], 4) == 0.0008
        assert round(table["bbar_j1_a"], 4) == 0.1211
        assert round(table["bbar_j10_a"], 4) == 0.0408

    def test_empty_estimator_list_gives_empty_table(self, tmp_path, capsys):
        cfg = tmp_path / "min.yaml"
        cfg.write_text(
            "a: 1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\n"
            "t_horizon: 1.0\ndt: 0.1\nseed: 1\n"
        )
        assert main(["variance", str(cfg)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines == ["estimator,variance"]


class TestPipelineCommands:
    def test_simulate_writes_round_trippable_csv(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["simulate", str(cfg)]) == 0
        path = tmp_path / "out" / "trajectory.csv"
        header = path.read_text().splitlines()[0]
        assert header == "t," + ",".join(f"u_{i}" for i in range(1, 5)) + "," + ",".join(
            f"v_{i}" for i in range(1, 5)
        )
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (5, 9)  # steps 0, 500, 1000, 1500, 2000
        # 17-significant-digit formatting round-trips exactly: rewrite and compare
        text1 = path.read_text()
        assert main(["simulate", str(cfg)]) == 0
        assert path.read_text() == text1

    def test_estimate_writes_series_and_functionals(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["estimate", str(cfg)]) == 0
        for label in ("abar_k1", "bbar_j1_k1"):
            est = tmp_path / "out" / f"estimate_{label}.csv"
            fun = tmp_path / "out" / f"functional_{label}.csv"
            assert est.read_text().splitlines()[0] == "t,estimate,kind"
            assert fun.read_text().splitlines()[0] == "t,J_t"
            rows = est.read_text().strip().splitlines()[1:]
            assert len(rows) == 4  # strides 500..2000
            assert rows[-1].startswith("2,")

    def test_montecarlo_outputs_and_determinism(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["montecarlo", str(cfg)]) == 0
        out = tmp_path / "out"
        report = (out / "report.csv").read_text()
        assert report.splitlines()[0] == (
            "estimator,mean,var,var_theoretical,rel_err_max,rel_err_p75,sw_w,sw_p"
        )
        samples = (out / "samples_abar_k1.csv").read_text()
        qq = (out / "qq_abar_k1.csv").read_text()
        assert samples.splitlines()[0] == "replication,estimate"
        assert qq.splitlines()[0] == "theoretical,empirical"
        assert len(samples.strip().splitlines()) == 4  # header + 3 replications
        # byte-identical rerun
        assert main(["montecarlo", str(cfg)]) == 0
        assert (out / "report.csv").read_text() == report
        assert (out / "samples_abar_k1.csv").read_text() == samples
        assert (out / "qq_abar_k1.csv").read_text() == qq

    def test_qq_regenerates_from_samples(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["montecarlo", str(cfg)]) == 0
        out = tmp_path / "out"
        original = (out / "qq_bbar_j1_k1.csv").read_text()
        (out / "qq_bbar_j1_k1.csv").unlink()
        assert main(["qq", str(cfg)]) == 0
        assert (out / "qq_bbar_j1_k1.csv").read_text() == original

    def test_qq_without_samples_is_io_error(self, tmp_path):
        cfg = write_config(tmp_path, out_name="fresh")
        assert main(["qq", str(cfg)]) == 4


class TestReferencePreset:
    def test_estimate_finals_within_expected_error_bands(self, tmp_path):
        # full-scale single-trajectory run (Euler, dt = 1e-4, T = 1000):
        # finals must sit inside the error bands the limiting variances imply
        assert main(["estimate", "--preset", "paper", "--out-dir", str(tmp_path)]) == 0
        finals = {}
        for path in tmp_path.glob("estimate_*.csv"):
            last = path.read_text().strip().splitlines()[-1].split(",")
            finals[path.stem.removeprefix("estimate_")] = float(last[1])
        assert len(finals) == 6
        for label in ("abar_k1", "abar_k10"):
            assert 0.9 <= finals[label] <= 1.1
        for label in ("bbar_j1_k1", "bbar_j10_k10", "bbar_j1_a", "bbar_j10_a"):
            assert 0.17 <= finals[label] <= 0.23


class TestExitCodes:
    def test_config_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("a: -1\nb: 1\nn_modes: 1\nalphas: [1.0]\nlambdas: [1.0]\nt_horizon: 1\ndt: 0.1\nseed: 1\n")
        assert main(["variance", str(bad)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config_and_preset(self, capsys):
        assert main(["variance"]) == 2

    def test_integration_diverged_exit(self, tmp_path, capsys):
        cfg = tmp_path / "unstable.yaml"
        cfg.write_text(
            "a: 1.0\nb: 0.2\nn_modes: 10\nalpha_rule: dirichlet_1d\nlambda_rule: paper\n"
            f"t_horizon: 400.0\ndt: 0.2\nscheme: euler\nseed: 3\nout_dir: {tmp_path / 'o'}\nu0: 1.0\nv0: 1.0\n"
        )
        assert main(["simulate", str(cfg)]) == 3
        assert "diverged" in capsys.readouterr().err

    def test_unwritable_output_dir_is_io_error(self, tmp_path):
        target = tmp_path / "blocked"
        target.write_text("a file, not a directory")
        cfg = write_config(tmp_path)
        assert main(["simulate", str(cfg), "--out-dir", str(target)]) == 4

    def test_preset_and_config_conflict(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["variance", str(cfg), "--preset", "paper"]) == 2

    def test_invalid_seed_override_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["variance", str(cfg), "--seed", "-4"]) == 2
