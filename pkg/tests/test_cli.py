import csv
import math

import numpy as np
import pytest

from pyrofront.cli import dump_config, main, parse_args


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_idealized_csv(tmp_path):
    out = tmp_path / "v2.csv"
    assert main(["idealized", "--omega", "2", "--xmin", "-1", "--xmax", "1",
                 "--points", "101", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["x", "v", "w"]
    x = np.array([float(r[0]) for r in rows[1:]])
    v = np.array([float(r[1]) for r in rows[1:]])
    np.testing.assert_allclose(v, x * np.exp(x), rtol=1e-14, atol=1e-16)
    assert out.read_bytes().count(b"\r") == 0


def test_sqrt3_sugar():
    cfg, _ = parse_args(["idealized", "--omega", "sqrt3"])
    assert cfg.parameters["omega"] == math.sqrt(3)


def test_wave_csv(tmp_path):
    out = tmp_path / "w.csv"
    assert main(["wave", "--omega", "3", "--points", "2001", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["x", "v", "w", "idealized"]
    assert len(rows) == 2002


def test_stability_csv(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["stability", "--omega", "3", "--points", "2001", "--samples", "5",
                 "--out", str(out)])
    assert code == 0
    assert read_rows(out)[0] == ["name", "sigma", "bound", "Q", "pass"]


def test_simulate_preset(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--preset", "invasion", "--t-end", "0.1", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["t", "x", "u"]
    assert float(rows[-1][0]) == pytest.approx(0.1)


def test_config_round_trip(tmp_path, capsys):
    argv = ["wave", "--omega", "2.5", "--lambda", "1e1", "--points", "301", "--out", "a.csv"]
    cfg, dump = parse_args(argv + ["--dump-config"])
    assert dump
    assert main(argv + ["--dump-config"]) == 0
    text = capsys.readouterr().out
    assert text == dump_config(cfg)
    path = tmp_path / "wave.cfg"
    path.write_text(text)
    again, _ = parse_args(["wave", "--config", str(path)])
    assert again == cfg


def test_flags_override_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# comment\nomega = 3\npoints = 401\n")
    cfg, _ = parse_args(["wave", "--config", str(path), "--points", "801"])
    assert cfg.parameters["omega"] == 3.0 and cfg.parameters["points"] == 801


@pytest.mark.parametrize("argv,needle", [
    (["wave"], "omega"),
    (["wave", "--omega", "abc"], "omega"),
    (["wave", "--omega", "3", "--points", "1.5"], "points"),
    (["idealized", "--omega", "2", "--bogus", "1"], None),
    (["verify"], "verify"),
    (["verify", "--scenario", "nope"], "nope"),
    (["verify", "--scenario", "invasion", "--set", "invasion.bogus=1"], "bogus"),
])
def test_usage_errors_exit_2(argv, needle, capsys):
    assert main(argv) == 2
    if needle:
        assert needle in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "c.cfg"
    path.write_text("omega = 3\nspeed = 4\n")
    assert main(["wave", "--config", str(path)]) == 2
    assert "speed" in capsys.readouterr().err


def test_io_error_exit_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["idealized", "--omega", "2", "--out", str(blocker / "sub" / "v.csv")]) == 3


def test_verify_exit_codes(tmp_path):
    out = tmp_path / "ledger"
    assert main(["verify", "--scenario", "figure_fighss_fixture", "--out", str(out)]) == 0
    assert read_rows(out / "ledger.csv")[0] == ["scenario_id", "claim_ref", "pass", "runtime_ms"]
    code = main(["verify", "--scenario", "wave_convergence_omega3",
                 "--set", "wave_convergence_omega3.delta_limit=1e-30", "--out", str(out)])
    assert code == 1


def test_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("PYROFRONT_OUT_DIR", str(tmp_path))
    assert main(["idealized", "--omega", "3"]) == 0
    assert (tmp_path / "idealized.csv").exists()
