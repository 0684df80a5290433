"""Quadratic stability form of a traveling wave and explicit test perturbations.

For a wave profile ``v`` and a compactly supported perturbation ``phi`` the
form is

    Q(phi) = int phi * (((v + phi)_+ - v_+) * K) - c int |phi'|^2 .

``Q <= 0`` means the L2 distance between the wave and its perturbation does
not grow initially.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_positive
from .exceptions import WitnessUnavailable
from .numerics import Field, Grid1D, convolve, trapezoid

__all__ = [
    "Perturbation",
    "positive_part_increment",
    "stability_form",
    "plateau_bump",
    "instability_witness",
    "witness_lower_bound",
    "small_support_bound",
    "small_support_check",
    "SmallSupportReport",
]


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Compactly supported perturbation sampled on a grid."""

    grid: Grid1D
    phi: Field
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        phi = self.phi if isinstance(self.phi, Field) else Field(self.grid, self.phi)
        if phi.grid != self.grid:
            raise ValueError("phi is sampled on a different grid")
        vals = phi.values
        if vals.size < 5 or np.any(vals[:2] != 0) or np.any(vals[-2:] != 0):
            raise ValueError("perturbation must vanish on the first and last two nodes")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_function(cls, grid, func, **meta):
        vals = np.asarray(func(grid.nodes), dtype=float)
        vals[:2] = 0.0
        vals[-2:] = 0.0
        return cls(grid, Field(grid, vals), meta)

    @property
    def support(self):
        nz = np.flatnonzero(self.phi.values)
        if nz.size == 0:
            return None
        x = self.grid.nodes
        h = self.grid.h
        # the support extends to the zero nodes on either side
        return float(x[nz[0]] - h), float(x[nz[-1]] + h)

    @property
    def sigma(self):
        s = self.support
        return 0.0 if s is None else s[1] - s[0]

    @property
    def sup(self):
        return float(np.max(np.abs(self.phi.values)))


def positive_part_increment(v, phi):
    """``(v + phi)_+ - v_+`` without cancellation (also valid for ``v = +inf``)."""
    v = np.asarray(v, dtype=float)
    phi = np.asarray(phi, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where(v >= 0, np.maximum(phi, -v), np.maximum(v + phi, 0.0))


def _profile_values(profile, grid):
    if callable(profile):
        vals = profile(grid.nodes)
    else:
        vals = np.asarray(profile, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (grid.n_points,):
        raise ValueError(
            f"profile samples have shape {vals.shape}, expected ({grid.n_points},)"
        )
    if np.isnan(vals).any():
        raise ValueError("profile samples contain NaN")
    return vals


def stability_form(profile, perturbation, c, kernel):
    """Evaluate ``Q(phi)`` on the perturbation grid.

    Parameters
    ----------
    profile : WaveProfile, callable or array-like
        The wave, evaluated at the perturbation nodes (values may be ``+inf``
        far to the right; only their sign matters there).
    perturbation : Perturbation
    c : float
    kernel : Kernel
    """
    c = check_positive(c, "c")
    grid = perturbation.grid
    phi = perturbation.phi.values
    v = _profile_values(profile, grid)
    d = positive_part_increment(v, phi)
    heated = convolve(Field(grid, d), kernel, extension="zero").values
    gain = trapezoid(Field(grid, phi * heated), 0, grid.n_points - 1)
    slope = np.gradient(phi, grid.h)
    penalty = trapezoid(Field(grid, slope * slope), 0, grid.n_points - 1)
    return gain - c * penalty


def plateau_bump(x, width):
    """1 on ``[-2W, 2W]``, 0 outside ``(-3W, 3W)``, C1 cubic ramps between.

    The ramp slope is at most ``1.5/W``.
    """
    s = np.clip((3.0 * width - np.abs(np.asarray(x, dtype=float))) / width, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def witness_lower_bound(lower_intensity, mu, eps, c, width):
    """Guaranteed positive value of Q for the plateau witness."""
    return lower_intensity * mu ** 2 * eps ** 2 / 16.0 - 8.0 * c * eps ** 2 / width


def _positive_onset(profile, lower_radius):
    """Largest node-aligned mu <= lower_radius with v > 0 on (0, mu]."""
    g = profile.grid
    x = g.nodes
    a = profile.params.anchor
    ahead = np.flatnonzero((x > 0) & (x <= lower_radius + 1e-12))
    if ahead.size == 0:
        return 0.0
    v = profile.v.values[ahead]
    bad = np.flatnonzero(v <= 0)
    last = ahead[-1] if bad.size == 0 else ahead[bad[0]] - 1
    return float(x[last]) if last > a else 0.0


def instability_witness(profile, kernel, c, eps, width=None, step=None):
    """Plateau perturbation ``eps*psi`` that makes the stability form positive.

    ``mu`` is the node-aligned length of the positivity interval of ``v``
    inside ``(0, lower_radius]``, shrunk by 10%.  The plateau half-width
    defaults to ``2*128*c/(lower_intensity*mu^2)``.  The returned
    perturbation lives on ``[-3W - rho, 3W + rho]`` with spacing ``rho/4``
    (or `step`); ``meta`` records ``mu``, ``width`` and ``eps``.

    Raises
    ------
    WitnessUnavailable
        If the kernel has no lower envelope or ``v`` is not positive right
        of the origin within the lower radius.
    """
    c = check_positive(c, "c")
    eps = check_positive(eps, "eps")
    lam, rho = kernel.lower_intensity, kernel.lower_radius
    if not (lam > 0 and rho > 0):
        raise WitnessUnavailable("the kernel has no positive lower envelope")
    mu = 0.9 * _positive_onset(profile, rho)
    if mu <= 0:
        raise WitnessUnavailable(
            f"the profile is not positive on any interval (0, mu) with mu <= {rho:g}"
        )
    if width is None:
        width = 2.0 * 128.0 * c / (lam * mu * mu)
    width = check_positive(width, "width")
    h = rho / 4.0 if step is None else check_positive(step, "step")
    half = 3.0 * width + rho
    n = 2 * int(math.ceil(half / h)) + 1
    grid = Grid1D(-(n // 2) * h, (n // 2) * h, n)
    return Perturbation.from_function(
        grid, lambda x: eps * plateau_bump(x, width), mu=mu, width=width, eps=eps
    )


def small_support_bound(c, intensity):
    """Largest support length ``(2c/Lambda)^(1/3)`` covered by the stability result."""
    return (2.0 * check_positive(c, "c") / check_positive(intensity, "intensity")) ** (1.0 / 3.0)


@dataclass(frozen=True)
class SmallSupportReport:
    name: str
    sigma: float
    bound: float
    Q: float
    passed: bool
    skipped: bool


def small_support_check(profile, perturbation, c, kernel, name="phi", tol=1e-10):
    """Check ``Q(phi) <= tol`` for a perturbation whose support is short enough.

    If the support length exceeds ``(2c/Lambda)^(1/3)`` the check is skipped
    and the report has ``skipped=True`` and ``passed=False``.
    """
    bound = small_support_bound(c, kernel.intensity)
    sigma = perturbation.sigma
    if sigma > bound * (1 + 1e-12):
        return SmallSupportReport(name, sigma, bound, math.nan, False, True)
    q = stability_form(profile, perturbation, c, kernel)
    return SmallSupportReport(name, sigma, bound, q, q <= tol, False)
