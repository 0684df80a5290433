import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pyrofront.exceptions import WitnessUnavailable
from pyrofront.kernels import make_gaussian, make_step
from pyrofront.numerics import Grid1D
from pyrofront.stability import (
    Perturbation,
    instability_witness,
    plateau_bump,
    positive_part_increment,
    small_support_bound,
    small_support_check,
    stability_form,
    witness_lower_bound,
)
from pyrofront.waves import WaveParams, solve

reals = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=500)
@given(reals, reals)
def test_positive_part_increment_bounded_by_perturbation(a, b):
    d = float(positive_part_increment(a, b))
    assert abs(d) <= abs(b)
    assert d * b >= 0


def test_positive_part_increment_cases():
    v = np.array([1.0, -1.0, 0.5, np.inf, -np.inf])
    phi = np.array([-3.0, 2.0, 0.1, -5.0, 5.0])
    np.testing.assert_array_equal(positive_part_increment(v, phi), [-1.0, 1.0, 0.1, -5.0, 0.0])


def test_plateau_bump_shape():
    w = 0.5
    x = np.array([0.0, 2 * w, 2.5 * w, 3 * w, 4 * w])
    np.testing.assert_allclose(plateau_bump(x, w), [1.0, 1.0, 0.5, 0.0, 0.0])
    xs = np.linspace(-2, 2, 40001)
    slope = np.max(np.abs(np.gradient(plateau_bump(xs, w), xs[1] - xs[0])))
    assert slope <= 1.5 / w + 1e-3


def test_perturbation_must_vanish_at_edges():
    g = Grid1D(-1, 1, 21)
    with pytest.raises(ValueError):
        Perturbation(g, np.ones(21))
    p = Perturbation.from_function(g, lambda x: np.ones_like(x), tag="flat")
    assert p.meta == {"tag": "flat"}
    assert p.sigma == pytest.approx(2.0 - 2 * g.h)
    assert p.sup == 1.0


def test_form_zero_for_zero_perturbation(wave3_wide, wide_step):
    g = Grid1D(-1, 1, 201)
    p = Perturbation(g, np.zeros(201))
    assert stability_form(wave3_wide, p, 1.0, wide_step) == 0.0
    assert p.support is None


def test_negative_region_contributes_only_diffusion(wide_step):
    # profile far below zero: the nonlocal gain vanishes, Q = -c int phi'^2
    g = Grid1D(-1, 1, 2001)
    p = Perturbation.from_function(g, lambda x: 0.01 * np.sin(math.pi * x))
    q = stability_form(-10 * np.ones(2001), p, 2.0, wide_step)
    assert q == pytest.approx(-2.0 * 0.01 ** 2 * math.pi ** 2, rel=2e-3)


def test_form_quadratic_scaling(wave3_wide, wide_step):
    g = Grid1D(-1.5, 2.5, 4001)
    qs = []
    for eps in (1e-3, 2e-3, 4e-3):
        p = Perturbation.from_function(g, lambda x: eps * plateau_bump(x - 1.5, 0.2))
        qs.append(stability_form(wave3_wide, p, 1.0, wide_step))
    assert qs[1] / qs[0] == pytest.approx(4.0, rel=1e-6)
    assert qs[2] / qs[1] == pytest.approx(4.0, rel=1e-6)


def test_profile_shape_checked(wide_step):
    g = Grid1D(-1, 1, 21)
    p = Perturbation.from_function(g, np.cos)
    with pytest.raises(ValueError):
        stability_form(np.zeros(5), p, 1.0, wide_step)
    with pytest.raises(ValueError):
        stability_form(np.zeros(21), p, 0.0, wide_step)


def test_witness_is_positive(wave3, unit_step):
    eps = 0.01
    pert = instability_witness(wave3, unit_step, 1.0, eps)
    mu, width = pert.meta["mu"], pert.meta["width"]
    assert 0 < mu <= unit_step.lower_radius
    bound = witness_lower_bound(unit_step.lower_intensity, mu, eps, 1.0, width)
    assert bound > 0
    q = stability_form(wave3, pert, 1.0, unit_step)
    assert q >= 0.5 * bound


def test_witness_requires_lower_envelope(wave3):
    g = make_gaussian(1.0, 0.1, 0.3)
    no_lower = g.with_lower_envelope(0.0, 0.0) if hasattr(g, "with_lower_envelope") else None
    if no_lower is None:
        pytest.skip("kernel has no lower-envelope override")
    with pytest.raises(WitnessUnavailable):
        instability_witness(wave3, no_lower, 1.0, 0.01)


def test_witness_unavailable_for_nonpositive_profile(wave3, unit_step):
    from pyrofront.numerics import Field
    from pyrofront.waves import WaveProfile

    g = wave3.grid
    flat = WaveProfile(wave3.params, Field(g, -np.ones(g.n_points)), Field(g, np.zeros(g.n_points)))
    with pytest.raises(WitnessUnavailable):
        instability_witness(flat, unit_step, 1.0, 0.01)


@pytest.mark.parametrize("c,lam,expected", [(1.0, 10.0, 0.5848), (1.0, 1.0, 2 ** (1 / 3))])
def test_small_support_bound(c, lam, expected):
    assert small_support_bound(c, lam) == pytest.approx(expected, abs=1e-4)


def test_small_support_check_passes_and_skips(wave3_wide, wide_step):
    g = Grid1D(-1.5, 2.5, 4001)
    short = Perturbation.from_function(g, lambda x: 0.1 * plateau_bump(x - 0.2, 0.1))
    rep = small_support_check(wave3_wide, short, 1.0, wide_step, name="short")
    assert not rep.skipped and rep.passed and rep.Q <= 1e-10
    long = Perturbation.from_function(g, lambda x: 0.1 * plateau_bump(x, 0.5))
    rep = small_support_check(wave3_wide, long, 1.0, wide_step, name="long")
    assert rep.skipped and not rep.passed and math.isnan(rep.Q)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.0, 1.5), st.floats(0.05, 0.2), st.floats(-1.0, 1.0))
def test_small_support_property(wave3_wide, wide_step, center, width, amp):
    g = Grid1D(-2.0, 3.0, 2501)
    pert = Perturbation.from_function(g, lambda x: amp * plateau_bump(x - center, width))
    assert pert.sigma <= small_support_bound(1.0, wide_step.intensity)
    assert stability_form(wave3_wide, pert, 1.0, wide_step) <= 1e-10
