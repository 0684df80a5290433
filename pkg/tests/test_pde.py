import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from sklearn.base import clone

from pyrofront.exceptions import BlowUp, ConfigurationError
from pyrofront.kernels import make_step, zero_kernel
from pyrofront.numerics import Grid1D
from pyrofront.pde import (
    EvolutionSolver,
    ProblemSpec,
    nonlocal_term,
    ordering_check,
    simulate,
    simulate_frozen,
    step,
    tabulated_boundary,
    trajectory_rows,
)

KERNEL = make_step(1.0, 0.5)


def interval_spec(u0, grid, kernel=KERNEL, c=1.0, theta=1.0, t_end=0.05, **kw):
    dt = kw.pop("dt", 0.9 * grid.h ** 2 / (2 * c))
    return ProblemSpec("interval", c, theta, kernel, grid, u0, dt, t_end, **kw)


def test_heat_decay_rate():
    g = Grid1D(0.0, 1.0, 401)
    spec = interval_spec(np.sin(math.pi * g.nodes), g, kernel=zero_kernel(),
                         dt=g.h ** 2 / 4, t_end=0.1, snapshot_every=1000)
    traj = simulate(spec)
    amp = traj.final.values[200]
    assert traj.times[-1] == pytest.approx(0.1, abs=1e-15)
    assert amp == pytest.approx(math.exp(-math.pi ** 2 * 0.1), rel=0.02)


def test_cfl_violation_rejected():
    g = Grid1D(0.0, 1.0, 101)
    with pytest.raises(ConfigurationError, match="CFL"):
        interval_spec(np.zeros(101), g, dt=1.01 * g.h ** 2 / 2)
    spec = interval_spec(np.zeros(101), g)
    with pytest.raises(ConfigurationError):
        step(spec.initial, 0.0, spec, dt=g.h ** 2)


def test_radial_cfl_depends_on_dimension():
    g = Grid1D(0.0, 1.0, 51)
    ok = ProblemSpec("radial", 1.0, 1.0, KERNEL, g, np.zeros(51), g.h ** 2 / 6, 0.01, dimension=3)
    assert ok.cfl_limit == pytest.approx(g.h ** 2 / 6)
    with pytest.raises(ConfigurationError):
        ProblemSpec("radial", 1.0, 1.0, KERNEL, g, np.zeros(51), g.h ** 2 / 4, 0.01, dimension=3)


@pytest.mark.parametrize("bad", [
    dict(mode="disk"),
    dict(c=0.0),
    dict(theta=math.nan),
    dict(snapshot_every=0),
    dict(boundary=1.0),
])
def test_problem_validation(bad):
    g = Grid1D(0.0, 1.0, 11)
    kw = dict(mode="interval", c=1.0, theta=1.0, kernel=KERNEL, grid=g,
              initial=np.zeros(11), dt=0.001, t_end=0.01)
    kw.update(bad)
    with pytest.raises(ValueError):
        ProblemSpec(**kw)


def test_radial_grid_must_be_unit():
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        ProblemSpec("radial", 1.0, 1.0, KERNEL, Grid1D(0, 2, 11), np.zeros(11), 1e-4, 0.01)


def test_time_grid_ends_on_t_end():
    g = Grid1D(0.0, 1.0, 21)
    spec = interval_spec(np.zeros(21), g, dt=0.001, t_end=0.0105)
    assert spec.n_steps == 11
    assert spec.time_at(11) == 0.0105
    assert simulate(spec).times[-1] == 0.0105


@pytest.mark.parametrize("dim,expected", [(2, math.pi * 0.25), (3, 4 / 3 * math.pi * 0.125)])
def test_radial_nonlocal_term_at_origin(dim, expected):
    g = Grid1D(0.0, 1.0, 201)
    spec = ProblemSpec("radial", 1.0, 1.0, KERNEL, g, np.zeros(201), 1e-6, 1e-5, dimension=dim)
    assert nonlocal_term(np.ones(201), spec)[0] == pytest.approx(expected, rel=2e-2)


def test_radial_one_dimension_matches_symmetric_interval():
    gi = Grid1D(-1.0, 1.0, 201)
    gr = Grid1D(0.0, 1.0, 101)
    f = lambda x: 2.5 * np.cos(math.pi * x / 2) ** 2
    dt = 0.9 * gi.h ** 2 / 2
    a = simulate(interval_spec(f(gi.nodes), gi, dt=dt, t_end=0.05))
    b = simulate(ProblemSpec("radial", 1.0, 1.0, KERNEL, gr, f(gr.nodes), dt, 0.05, dimension=1))
    np.testing.assert_allclose(a.final.values[100:], b.final.values, atol=1e-12)


def test_blowup_is_reported():
    g = Grid1D(0.0, 1.0, 41)
    spec = interval_spec(10 * np.sin(math.pi * g.nodes), g, kernel=make_step(200.0, 0.5),
                         theta=0.0, t_end=2.0)
    traj = simulate(spec)
    assert traj.blew_up and 0 < traj.blowup_time < 2.0
    assert np.all(np.isfinite(traj.values))
    with pytest.raises(BlowUp):
        u, t = spec.initial, 0.0
        for _ in range(100000):
            u = step(u, t, spec)
            t += spec.dt


def test_frozen_equals_full_without_ignition():
    g = Grid1D(0.0, 1.0, 51)
    spec = interval_spec(0.5 * np.sin(math.pi * g.nodes), g)
    np.testing.assert_array_equal(simulate(spec).values, simulate_frozen(spec).values)


def test_time_dependent_boundary():
    g = Grid1D(0.0, 1.0, 21)
    bnd = tabulated_boundary([0.0, 1.0], [0.0, 2.0])
    spec = interval_spec(np.zeros(21), g, boundary=bnd, t_end=0.5)
    final = simulate(spec).final.values
    assert final[0] == pytest.approx(1.0) and final[-1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tabulated_boundary([0.0, 0.0], [1.0, 2.0])


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, 31, elements=st.floats(0, 3)),
       arrays(np.float64, 31, elements=st.floats(0, 1)))
def test_comparison_principle(u0, gap):
    g = Grid1D(0.0, 1.5, 31)
    u0[[0, -1]] = 0.0
    gap[[0, -1]] = 0.0
    k = make_step(1.0, 0.3)
    lo = interval_spec(u0, g, kernel=k, theta=1.0, t_end=0.02)
    hi = interval_spec(u0 + gap, g, kernel=k, theta=1.0, t_end=0.02)
    rep = ordering_check(lo, hi, tolerance=0.0)
    assert rep.passed and rep.max_violation == 0.0


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, 31, elements=st.floats(-2, 0.99)))
def test_no_heating_below_threshold_keeps_maximum(u0):
    g = Grid1D(0.0, 1.0, 31)
    u0[[0, -1]] = 0.0
    traj = simulate(interval_spec(u0, g, t_end=0.01))
    top = max(u0.max(), 0.0)
    assert traj.values.max() <= top + 1e-15


def test_ordering_check_rejects_mismatch():
    g = Grid1D(0.0, 1.0, 21)
    a = interval_spec(np.zeros(21), g)
    b = interval_spec(np.zeros(21), g, c=0.5)
    with pytest.raises(ValueError):
        ordering_check(a, b)


def test_trajectory_rows():
    g = Grid1D(0.0, 1.0, 5)
    traj = simulate(interval_spec(np.zeros(5), g, dt=0.01, t_end=0.02))
    rows = list(trajectory_rows(traj))
    assert len(rows) == 3 * 5
    assert rows[-1] == (0.02, 1.0, 0.0)


def test_estimator_api():
    est = EvolutionSolver(diffusion=0.5, t_end=0.02, n_points=41)
    params = est.get_params()
    assert params["diffusion"] == 0.5 and params["kernel"] is None
    copy = clone(est)
    assert copy.get_params()["n_points"] == 41
    with pytest.raises(AttributeError):
        est.predict([0.0])
    est.fit(lambda x: np.sin(math.pi * x))
    out = est.predict([0.0, 0.01, 0.02])
    assert out.shape == (3, 41)
    np.testing.assert_allclose(out[0], np.sin(math.pi * est.spec_.grid.nodes))
    assert est.blowup_time_ is None
    assert est.score([0.02], out[2:]) == 0.0
    with pytest.raises(ValueError):
        est.predict([1.0])


def test_estimator_validates_initial_samples():
    with pytest.raises(ValueError):
        EvolutionSolver(n_points=5).fit([0.0, 1.0])
    with pytest.raises(ValueError):
        EvolutionSolver(n_points=3).fit([0.0, np.nan, 0.0])
