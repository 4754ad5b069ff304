import math

import numpy as np
import pytest

from dickechain import cli, dicke
from dickechain.errors import ConfigError


def test_defaults():
    cfg = cli.build_run_config(["trace"])
    assert cfg.command == "trace"
    assert cfg.n == 30 and cfg.m == 3 and cfg.c == 3.0
    assert cfg.outcomes is None
    assert cfg.out == "trace.csv"
    assert cli.build_run_config(["magic"]).out == "magic.csv"
    assert cli.build_run_config(["selftest"]).out is None


def test_flag_parsing():
    cfg = cli.build_run_config(
        ["gamma-sweep", "--n", "50", "--c", "inf", "--ct", "20", "--tmax", "1.5",
         "--phi", "0.2", "--workers", "4", "--gamma-grid", "0,1e-3,0.1",
         "--out", "x.csv"]
    )
    assert cfg.n == 50 and cfg.c == math.inf and cfg.c_t == 20.0
    assert cfg.t_max == 1.5 and cfg.phi == 0.2 and cfg.workers == 4
    assert cfg.gamma_grid == (0.0, 1e-3, 0.1)
    assert cfg.out == "x.csv"


def test_outcomes_parsing():
    cfg = cli.build_run_config(["trace", "--m", "4", "--outcomes", "2,3"])
    assert cfg.outcomes == (2, 3)
    assert cli.build_run_config(["trace", "--outcomes", "all-N"]).outcomes is None
    with pytest.raises(ConfigError):
        cli.build_run_config(["trace", "--outcomes", "two"])


def test_config_file_and_flag_override(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text(
        "# sweep setup\n"
        "n = 12\n"
        "c = 2.5\n"
        "gamma-grid = 0,0.01\n"
        "exact = true\n"
    )
    cfg = cli.build_run_config(["gamma-sweep", "--config", str(f), "--n", "15"])
    assert cfg.n == 15  # flag wins
    assert cfg.c == 2.5
    assert cfg.gamma_grid == (0.0, 0.01)
    assert cfg.exact is True


def test_config_file_errors(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("bogus = 1\n")
    assert cli.main(["trace", "--config", str(f)]) == 1
    f.write_text("just words\n")
    assert cli.main(["trace", "--config", str(f)]) == 1
    assert cli.main(["trace", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_exit_code_config_errors():
    assert cli.main(["trace", "--workers", "0"]) == 1
    assert cli.main(["trace", "--no-such-flag"]) == 1
    assert cli.main(["wrong-command"]) == 1
    assert cli.main([]) == 1


def test_exit_code_capacity(tmp_path):
    code = cli.main(["trace", "--n", "220", "--exact", "--out", str(tmp_path / "t.csv")])
    assert code == 2


def test_exit_code_output(tmp_path):
    code = cli.main(["trace", "--n", "3", "--ct", "4",
                     "--out", str(tmp_path / "no_dir" / "t.csv")])
    assert code == 4


def test_trace_end_to_end(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = cli.main(["trace", "--n", "4", "--ct", "4", "--c", "inf", "--out", str(out)])
    assert code == 0
    assert "trace: " in capsys.readouterr().out
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("t,E,")
    assert len(lines) == 18  # header + 17 grid points (dt = pi/16)
    assert (tmp_path / "t.csv.meta.txt").exists()


def test_precision_end_to_end(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code = cli.main(["precision", "--n", "8", "--ct", "4", "--c-list", "1,3",
                     "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "c=1.0: max_err_grid=" in printed
    assert "c=3.0: max_err_grid=" in printed
    assert out.exists()


def test_selftest_passes(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "checks passed" in out


def test_selftest_catches_broken_overlap(monkeypatch, capsys):
    real = dicke.x_overlap_row

    def tampered(q, N, method="auto"):
        row = np.array(real(q, N, method))
        if q == 1 and N >= 2:
            row[0] = -row[0]  # silently corrupt one matrix element
        return row

    monkeypatch.setattr(dicke, "x_overlap_row", tampered)
    assert cli.main(["selftest"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
