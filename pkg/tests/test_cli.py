"""Configuration loading, CSV output determinism, and exit codes."""

import io

import pytest

from passivekey.cli import CSV_HEADER, _parse_distances, load_config, main

FAST_OPTIMIZER = """
[optimizer]
coarse_mu = 6
coarse_p_pe = 6
refine_rounds = 1
refine_mu = 3
refine_p_pe = 3
x_grid_points = 40
"""


def write_config(tmp_path, body):
    path = tmp_path / "config.ini"
    path.write_text(body)
    return str(path)


class TestConfig:
    def test_defaults(self):
        cfg = load_config(None)
        assert cfg.source.mu == 0.5
        assert cfg.channel.alpha_db_per_km == 0.20
        assert cfg.security.eps_sec == 1e-10
        assert cfg.security.f_EC == 1.16
        assert cfg.mode == "finite"
        assert cfg.Ns == [1e13]

    def test_file_overrides(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "[source]\nmu = 0.3\n"))
        assert cfg.source.mu == 0.3
        assert cfg.source.eta_A == 0.5  # untouched default

    def test_parse_distances(self):
        assert _parse_distances("10:30:10") == [10.0, 20.0, 30.0]
        assert _parse_distances("5,7.5,12") == [5.0, 7.5, 12.0]

    def test_bad_number(self, tmp_path):
        from passivekey import ConfigError

        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, "[source]\nmu = banana\n"))

    def test_bad_mode(self, tmp_path):
        from passivekey import ConfigError

        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, "[sweep]\nmode = sideways\n"))

    def test_missing_file(self):
        from passivekey import ConfigError

        with pytest.raises(ConfigError):
            load_config("/nonexistent/config.ini")


class TestRunCommand:
    def test_exit_code_on_config_error(self, tmp_path, capsys):
        path = write_config(tmp_path, "[sweep]\ndistances = 50:10:10\nmode = xyz\n")
        assert main(["run", "--config", path]) == 2
        assert "config error" in capsys.readouterr().err

    def test_csv_deterministic(self, tmp_path):
        path = write_config(tmp_path, FAST_OPTIMIZER)
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["run", "--config", path, "--sweep", "50:50:10", "--N", "1e9",
                "--mode", "finite"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_csv_shape_and_roundtrip(self, tmp_path):
        path = write_config(tmp_path, FAST_OPTIMIZER)
        out = tmp_path / "sweep.csv"
        assert main(["run", "--config", path, "--sweep", "50:60:10",
                     "--N", "1e9", "--mode", "both", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 2  # two distances x (finite, asymptotic)
        for line in lines[1:]:
            fields = line.split(",")
            assert len(fields) == len(CSV_HEADER.split(","))
            assert fields[2] in ("finite", "asymptotic")
            assert fields[-1] in ("ok", "vacuous")
            # 17-significant-digit formatting round-trips exactly
            rate = fields[9]
            assert format(float(rate), ".17g") == rate

    def test_vacuous_rows_reported_not_fatal(self, tmp_path):
        path = write_config(tmp_path, FAST_OPTIMIZER)
        out = tmp_path / "sweep.csv"
        assert main(["run", "--config", path, "--sweep", "200:200:10",
                     "--N", "1e6", "--mode", "finite", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[1].endswith("vacuous")

    def test_p_pe_pin(self, tmp_path):
        path = write_config(tmp_path, FAST_OPTIMIZER)
        out = tmp_path / "sweep.csv"
        assert main(["run", "--config", path, "--sweep", "50:50:10",
                     "--N", "1e9", "--p-pe", "0.7", "--out", str(out)]) == 0
        row = out.read_text().splitlines()[1].split(",")
        assert float(row[4]) == pytest.approx(0.7, rel=1e-12)


class TestVerifyCommand:
    def test_runs_and_reports(self, tmp_path, capsys):
        out = tmp_path / "verify.csv"
        code = main(["verify", "--seed", "3", "--trials", "2000",
                     "--out", str(out)])
        captured = capsys.readouterr().out
        assert code == 0
        assert "RESULT: PASS" in captured
        lines = out.read_text().splitlines()
        assert lines[0].startswith("check,")
        assert len(lines) == 1 + 1 + 18  # header + lemma3 + 3x3x2 lemma4 grid

    def test_verify_deterministic(self, tmp_path):
        cfg = load_config(None)
        cfg.verify_seed = 5
        cfg.verify_trials = 2000
        from passivekey.cli import run_verify

        streams = []
        for out in ("v1.csv", "v2.csv"):
            cfg.verify_path = str(tmp_path / out)
            buf = io.StringIO()
            assert run_verify(cfg, report_stream=buf) == 0
            streams.append(buf.getvalue())
        assert streams[0] == streams[1]
        assert (tmp_path / "v1.csv").read_bytes() == (tmp_path / "v2.csv").read_bytes()
