import csv

import pytest

from pyrofront.kernels import make_step
from pyrofront.numerics import Grid1D
from pyrofront.verify import (
    run_all,
    run_scenario,
    scenario_defaults,
    scenario_ids,
    scenario_tags,
    write_reports,
)
from pyrofront.verify import extinction_constant, frozen_horizon


def test_registry_lists_and_filters():
    ids = scenario_ids()
    assert ids == sorted(ids) and len(ids) >= 12
    assert {"pde", "wave", "stability", "figure"} <= set(scenario_tags())
    wave = scenario_ids("wave")
    assert wave and all(i in ids for i in wave)
    assert "comparison_ordering" not in wave
    assert scenario_ids("no-such-tag") == []


def test_unknown_scenario_and_key():
    with pytest.raises(ValueError, match="unknown scenario"):
        run_scenario("nope")
    with pytest.raises(ValueError, match="no parameter"):
        run_scenario("invasion", {"bogus": 1})
    with pytest.raises(ValueError):
        run_all(overrides={"nope": {}})


def test_overrides_are_coerced_and_can_break_a_check():
    assert run_scenario("figure_fighss_fixture").passed
    rep = run_scenario("wave_convergence_omega3", {"delta_limit": "1e-30"})
    assert not rep.passed
    assert any("delta" in c for c in rep.failed_checks())
    with pytest.raises(ValueError, match="expected a number"):
        run_scenario("invasion", {"c": "fast"})


def test_defaults_are_copies():
    d = scenario_defaults("invasion")
    d["c"] = 99
    assert scenario_defaults("invasion")["c"] != 99


def test_write_reports_layout(tmp_path):
    reports = [run_scenario("figure_fighss_fixture"), run_scenario("divergence_sides")]
    paths = write_reports(reports, tmp_path)
    assert all(p.exists() for p in paths)
    with open(tmp_path / "ledger.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["scenario_id", "claim_ref", "pass", "runtime_ms"]
    assert [r[0] for r in rows[1:]] == ["figure_fighss_fixture", "divergence_sides"]
    assert rows[1][2] == "true"
    raw = (tmp_path / "divergence_sides.csv").read_bytes()
    assert b"\r\n" not in raw and raw.startswith(b"kind,name,value\n")
    assert b"runtime" not in raw


def test_reports_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        write_reports([run_scenario("invasion"), run_scenario("wave_vs_idealized_3")], out)
    for p in sorted(a.iterdir()):
        if p.name != "ledger.csv":
            assert p.read_bytes() == (b / p.name).read_bytes(), p.name


def test_extinction_constant_matches_closed_form():
    # on [-1, 1] with a half-width 0.5 unit step, the sup sits at the origin:
    # int_{-1/2}^{1/2} (1 - y^2) dy = 11/12
    c = extinction_constant(make_step(1.0, 0.5), Grid1D(0.0, 1.0, 101))
    assert c == pytest.approx(11 / 12, abs=1e-4)


def test_frozen_horizon_takes_smaller_bound():
    assert frozen_horizon(0.2) == 1.0
    assert frozen_horizon(1.0) == 0.5
    assert frozen_horizon(0.0) == 1.0
