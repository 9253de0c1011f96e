import csv
import subprocess
import sys
from importlib import resources

import pytest

from dressmag.cli import cli_main

DATA = resources.files("dressmag") / "data"


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_no_arguments(capsys):
    assert cli_main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert cli_main(["calibrate"]) == 1
    assert "invalid choice" in capsys.readouterr().err


def test_bad_flag_value(capsys):
    assert cli_main(["rabi", "--seed", "x"]) == 1


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("omega_hz = 18e3\ncolour = blue\n")
    assert cli_main(["rabi", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "line 2" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_missing_config_file(tmp_path):
    assert cli_main(["rabi", "--config", str(tmp_path / "none.cfg")]) == 1


def test_malformed_scenarios(tmp_path, capsys):
    sc = tmp_path / "s.csv"
    sc.write_text("omega_g_hz,delta_omega_g_hz,n,T_s,T_add_s\n1,2,3\n")
    assert cli_main(["sensitivity", "--scenarios", str(sc), "--out", str(tmp_path)]) == 1
    assert "row 1" in capsys.readouterr().err


def test_runtime_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "short.cfg"
    cfg.write_text("T_add_s = 0.001\nrabi_points = 3\n")
    assert cli_main(["rabi", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "shorter" in capsys.readouterr().err


def test_sensitivity_table(tmp_path):
    out = tmp_path / "o"
    assert cli_main(["sensitivity", "--scenarios", str(DATA / "table1.csv"), "--out", str(out)]) == 0
    rows = read(out / "sensitivity.csv")
    assert len(rows) == 22
    assert list(rows[0]) == ["phi_rad", "T_s", "T_add_s", "n", "delta_omega_rad_s", "S_rad", "S_hz",
                             "S_Q_rad", "B_sens_pT"]
    assert list(read(out / "sensitivity_plot.csv")[0]) == ["x", "y", "sigma"]


def test_rabi_fig3(tmp_path):
    out = tmp_path / "o"
    assert cli_main(["rabi", "--config", str(DATA / "fig3.cfg"), "--out", str(out)]) == 0
    rows = read(out / "rabi.csv")
    assert len(rows) == 21 and all(r["n"] == "30" for r in rows)
    assert float(rows[0]["T_s"]) == pytest.approx(1e-4) and float(rows[-1]["T_s"]) == pytest.approx(0.5)
    fit = read(out / "rabi_fit.csv")[0]
    assert float(fit["omega_g_hz"]) == pytest.approx(7.54, rel=0.05)


def test_zero_signal_rabi_is_flat(tmp_path):
    cfg = tmp_path / "zero.cfg"
    cfg.write_text("omega_g_hz = 0\nrabi_points = 5\n")
    assert cli_main(["rabi", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = read(tmp_path / "rabi.csv")
    assert all(float(r["P_expected"]) == pytest.approx(1.0, abs=1e-4) for r in rows)


@pytest.mark.parametrize("cmd", ["stirap", "protection", "validate-rwa"])
def test_other_subcommands(tmp_path, cmd):
    assert cli_main([cmd, "--out", str(tmp_path)]) == 0
    assert (tmp_path / f"{cmd}.csv").exists() and (tmp_path / f"{cmd}_plot.csv").exists()


def test_ramsey_subcommand(tmp_path):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("ramsey_points = 5\nramsey_t_stop_s = 0.4\nprepare = ideal\n")
    assert cli_main(["ramsey", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert len(read(tmp_path / "ramsey.csv")) == 5


def test_byte_determinism(tmp_path):
    cfg = tmp_path / "noisy.cfg"
    cfg.write_text("noise_enabled = true\nprepare = ideal\nramsey_points = 4\nramsey_t_stop_s = 0.05\n"
                   "trajectories = 130\nramsey_rf_hz = 500\n")
    outs = []
    for i, workers in enumerate(("1", "4", "1")):
        out = tmp_path / f"run{i}"
        assert cli_main(["ramsey", "--config", str(cfg), "--seed", "5", "--workers", workers, "--out", str(out)]) == 0
        outs.append((out / "ramsey.csv").read_bytes() + (out / "ramsey_plot.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dressmag.cli"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr
