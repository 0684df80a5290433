"""Traveling fire fronts ``u(x, t) = v(x + omega*t) + theta``.

The profile solves ``omega*v' - c*v'' = v_+ * K`` with ``v(0) = 0`` and
``v'(0) = kappa``.  With ``w = v'`` this is the fixed point of

    v(x) = int_0^x w,
    w(x) = exp(omega*x) * (kappa - int_0^x exp(-omega*s) (v_+ * K)(s) ds),

which is iterated on a grid over ``[-2R, X_max]`` starting from the heat
wave ``(0, kappa*exp(omega*x))``.  Left of ``-2R`` the profile is negative,
so the source vanishes and ``v`` continues in closed form.

Inputs with ``c != 1`` are solved in the rescaled variables ``omega/c`` and
``K/c``; the profile ``v`` itself is unchanged by that rescaling.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positions, check_positive
from .exceptions import NumericalFailure
from .kernels import make_step
from .numerics import Field, Grid1D, convolve_plus, cumulative_from_anchor

__all__ = [
    "WaveParams",
    "WaveProfile",
    "IterationReport",
    "picard_map",
    "solve",
    "extend_left",
    "idealized_wave",
    "two_point_reconstruction",
    "check_exponential_bounds",
    "monotonicity_interval",
    "monotonicity_analysis",
    "divergence_probe",
    "TravelingWaveSolver",
]

ROUTES = ("short_range", "mild")
STOPPING = ("weighted", "relative_sup")


@dataclass(frozen=True, eq=False)
class WaveParams:
    """Problem data and iteration controls for one traveling wave.

    The grid starts at ``-2R`` and its spacing is adjusted so that both
    ``-2R`` and ``0`` are nodes; ``n_points`` is kept, so the right end can
    move slightly from the requested `x_max`.
    """

    omega: float
    kappa: float
    kernel: object
    x_max: float = 1.0
    n_points: int = 20001
    c: float = 1.0
    tol: float = 1e-10
    max_iter: int = 100
    route: str = "short_range"
    stopping: str = "weighted"
    grid: Grid1D = field(init=False)

    def __post_init__(self):
        check_positive(self.omega, "omega")
        check_positive(self.kappa, "kappa")
        check_positive(self.c, "c")
        check_positive(self.tol, "tol")
        check_positive(self.x_max, "x_max")
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}, got {self.route!r}")
        if self.stopping not in STOPPING:
            raise ValueError(f"stopping must be one of {STOPPING}, got {self.stopping!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError("n_points must be an integer >= 3")
        left = 2.0 * self.reach
        if left == 0:
            grid = Grid1D(0.0, self.x_max, self.n_points)
        else:
            rough = (self.x_max + left) / (self.n_points - 1)
            m = max(1, int(round(left / rough)))
            if m >= self.n_points - 1:
                raise ValueError("x_max must exceed 0 by at least one grid cell")
            h = left / m
            grid = Grid1D(-left, -left + (self.n_points - 1) * h, self.n_points)
        object.__setattr__(self, "grid", grid)

    @property
    def reach(self):
        """Kernel radius, or 0 for the idealized Dirac kernel."""
        return 0.0 if self.kernel.shape == "dirac_idealized" else self.kernel.radius

    @property
    def anchor(self):
        return int(round(-self.grid.x_min / self.grid.h))

    @property
    def rate(self):
        """Wave speed in the rescaled problem with unit diffusion."""
        return self.omega / self.c

    @property
    def source_scale(self):
        return 1.0 / self.c

    @property
    def norm_weights(self):
        """``(M, L)`` of the weighted norm ``sup|dv|e^{-Mx} + L sup|dw|e^{-Mx}``."""
        om, lam, r = self.rate, self._intensity, self.reach
        if self.route == "short_range":
            return 4.0 + om + lam, 1.0
        m = om + 1.0
        return m, 4.0 * math.exp(3.0 * m * r) / m

    @property
    def _intensity(self):
        k = self.kernel
        lam = 1.0 if k.shape == "dirac_idealized" else k.intensity
        return lam * self.source_scale

    @property
    def contraction_factor(self):
        """Contraction constant guaranteed by the chosen norm route."""
        om, lam, r = self.rate, self._intensity, self.reach
        if self.route == "short_range":
            return math.exp(3.0 * (4.0 + om + lam) * r) / 4.0
        return 0.25 + 4.0 * math.exp(6.0 * (om + 1.0) * r) * lam / (om + 1.0) ** 2

    @property
    def window_nodes(self):
        """Number of nodes polluted by constant extension at the right edge."""
        return int(math.ceil(self.reach / self.grid.h - 1e-9))


@dataclass
class IterationReport:
    iterations_used: int
    weighted_deltas: list
    sup_deltas: list
    converged: bool
    residual_sup: float
    contraction_factor: float
    route: str
    sign_violation: float
    runtime_s: float = 0.0

    @property
    def contraction_guaranteed(self):
        return self.contraction_factor <= 0.5


@dataclass(eq=False)
class WaveProfile:
    """Sampled profile ``v`` and derivative ``w`` on the solver grid."""

    params: WaveParams
    v: Field
    w: Field
    iteration: IterationReport = None

    @property
    def grid(self):
        return self.params.grid

    @property
    def left_coeffs(self):
        return float(self.v.values[0]), float(self.w.values[0])

    @property
    def left_limit(self):
        """``lim_{x -> -inf} v(x)`` of the closed-form extension."""
        v0, w0 = self.left_coeffs
        return v0 - w0 / self.params.rate

    @property
    def reliable_end(self):
        """Index of the last node whose kernel window lies inside the grid."""
        return self.grid.n_points - 1 - self.params.window_nodes

    def source(self):
        """``(v_+ * K)/c`` on the grid (rescaled units)."""
        p = self.params
        return convolve_plus(self.v, p.kernel).values * p.source_scale

    def __call__(self, x):
        return self.evaluate(x)[0]

    def evaluate(self, x):
        """Return ``(v, v')`` at arbitrary positions.

        Inside the grid a cubic Hermite interpolant of ``(v, w)`` is used;
        left of the grid the closed-form extension; right of the last
        reliable node the two-point formula with the source frozen there.
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        v_out = np.empty_like(x)
        w_out = np.empty_like(x)
        g = self.grid
        om = self.params.rate

        left = x <= g.x_min
        if left.any():
            v0, w0 = self.left_coeffs
            e = np.exp(om * (x[left] - g.x_min))
            v_out[left] = w0 * e / om + v0 - w0 / om
            w_out[left] = w0 * e

        j_end = self.reliable_end
        x_end = g.x_min + j_end * g.h
        right = x > x_end
        mid = ~left & ~right
        if mid.any():
            v_out[mid], w_out[mid] = _hermite(g, self.v.values, self.w.values, x[mid])
        if right.any():
            v0, w0 = self.v.values[j_end], self.w.values[j_end]
            g0 = self.source()[j_end]
            s = x[right] - x_end
            with np.errstate(over="ignore", invalid="ignore"):
                e = np.exp(om * s)
                v_out[right] = v0 + (e - 1) * (w0 - g0 / om) / om + g0 * s / om
                w_out[right] = e * (w0 - g0 / om) + g0 / om
        if scalar:
            return v_out[0], w_out[0]
        return v_out, w_out


def _hermite(grid, v, w, x):
    h = grid.h
    pos = (x - grid.x_min) / h
    i = np.clip(np.floor(pos).astype(int), 0, grid.n_points - 2)
    t = pos - i
    v0, v1, w0, w1 = v[i], v[i + 1], w[i] * h, w[i + 1] * h
    t2, t3 = t * t, t * t * t
    val = (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * w0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * w1
    der = ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * w0 + (-6 * t2 + 6 * t) * v1 + (3 * t2 - 2 * t) * w1) / h
    return val, der


# fixed-point map -----------------------------------------------------------

def _check_on_grid(field_, params, name):
    if not isinstance(field_, Field):
        return Field(params.grid, field_)
    if field_.grid != params.grid:
        raise ValueError(f"{name} is sampled on a different grid than the wave parameters")
    return field_


def picard_map(v, w, params):
    """One application of the fixed-point map, returning the new ``(v, w)``.

    ``v_new = int_0^x w`` and
    ``w_new = exp(omega*x) * (kappa - int_0^x exp(-omega*s) (v_+ * K)(s) ds)``,
    with all integrals anchored at the node ``x = 0``.
    """
    v = _check_on_grid(v, params, "v")
    w = _check_on_grid(w, params, "w")
    grid, a = params.grid, params.anchor
    x = grid.nodes
    om = params.rate
    v_new = cumulative_from_anchor(w, a)
    source = convolve_plus(v, params.kernel).values * params.source_scale
    damped = Field(grid, np.exp(-om * x) * source)
    inner = cumulative_from_anchor(damped, a).values
    w_new = np.exp(om * x) * (params.kappa - inner)
    return v_new, Field(grid, w_new)


def _weighted_delta(dv, dw, params):
    m, ell = params.norm_weights
    weight = np.exp(-m * params.grid.nodes)
    return float(np.max(np.abs(dv) * weight)) + ell * float(np.max(np.abs(dw) * weight))


def _residual(profile):
    """sup over interior reliable nodes of ``|omega w - c w' - v_+ * K|`` (original units)."""
    p = profile.params
    h = p.grid.h
    w = profile.w.values
    g = convolve_plus(profile.v, p.kernel).values
    end = profile.reliable_end
    if end < 2:
        return math.nan
    dw = (w[2 : end + 1] - w[: end - 1]) / (2 * h)
    r = p.omega * w[1:end] - p.c * dw - g[1:end]
    return float(np.max(np.abs(r)))


def solve(params):
    """Iterate :func:`picard_map` from ``(0, kappa*exp(omega*x))``.

    Stops when the delta (weighted norm, or relative sup-norm when
    ``params.stopping == "relative_sup"``) drops below ``params.tol`` or
    after ``params.max_iter`` iterations.  A non-converged result is still
    returned with ``converged=False``.

    Raises
    ------
    NumericalFailure
        If an iterate contains NaN.
    """
    start = time.perf_counter()
    grid, a = params.grid, params.anchor
    x = grid.nodes
    v = Field(grid, np.zeros(grid.n_points))
    with np.errstate(over="ignore", invalid="ignore"):
        start_slope = params.kappa * np.exp(params.rate * x)
    if not np.all(np.isfinite(start_slope)):
        raise NumericalFailure("exp(omega*x) overflows on this grid; reduce omega or x_max")
    w = Field(grid, start_slope)
    weighted, sups = [], []
    sign_violation = 0.0
    converged = False
    k = 0
    for k in range(1, params.max_iter + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                v_new, w_new = picard_map(v, w, params)
        except ValueError as exc:
            raise NumericalFailure(f"iteration {k} produced non-finite values") from exc
        dv = v_new.values - v.values
        dw = w_new.values - w.values
        weighted.append(_weighted_delta(dv, dw, params))
        sup = float(max(np.max(np.abs(dv)), np.max(np.abs(dw))))
        scale = float(max(np.max(np.abs(v_new.values)), np.max(np.abs(w_new.values))))
        sups.append(sup / scale if scale > 0 else sup)
        sign_violation = max(
            sign_violation,
            float(np.max(v_new.values[: a + 1], initial=0.0)),
            float(np.max(-w_new.values[: a + 1], initial=0.0)),
        )
        v, w = v_new, w_new
        delta = weighted[-1] if params.stopping == "weighted" else sups[-1]
        if delta < params.tol:
            converged = True
            break
    report = IterationReport(
        iterations_used=k,
        weighted_deltas=weighted,
        sup_deltas=sups,
        converged=converged,
        residual_sup=math.nan,
        contraction_factor=params.contraction_factor,
        route=params.route,
        sign_violation=sign_violation,
    )
    profile = WaveProfile(params, v, w, report)
    report.residual_sup = _residual(profile)
    report.runtime_s = time.perf_counter() - start
    return profile


def extend_left(profile, x):
    """Closed-form continuation of the profile to ``x <= -2R``."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr > profile.grid.x_min + 1e-12):
        raise ValueError(f"extend_left needs x <= {profile.grid.x_min:g}")
    v0, w0 = profile.left_coeffs
    om = profile.params.rate
    out = w0 * np.exp(om * (x_arr - profile.grid.x_min)) / om + v0 - w0 / om
    return float(out) if out.ndim == 0 else out


def idealized_wave(omega, x, kappa=1.0, derivative=False):
    """Solution of ``v'' - omega v' + v = 0`` with ``v(0)=0``, ``v'(0)=kappa``.

    This is the profile obtained when the kernel is a Dirac mass and the
    positive part is dropped.
    """
    omega = check_positive(omega, "omega")
    x = np.asarray(x, dtype=float)
    disc = omega * omega - 4.0
    if abs(disc) < 1e-12:
        val = x * np.exp(x)
        der = (1 + x) * np.exp(x)
    elif disc > 0:
        s = math.sqrt(disc)
        lp, lm = (omega + s) / 2, (omega - s) / 2
        val = (np.exp(lp * x) - np.exp(lm * x)) / s
        der = (lp * np.exp(lp * x) - lm * np.exp(lm * x)) / s
    else:
        s = math.sqrt(-disc)
        e = np.exp(omega * x / 2)
        val = (2 / s) * e * np.sin(s * x / 2)
        der = e * ((omega / s) * np.sin(s * x / 2) + np.cos(s * x / 2))
    out = kappa * (der if derivative else val)
    return float(out) if out.ndim == 0 else out


def two_point_reconstruction(profile, anchor_index):
    """Rebuild ``v`` right of a node from its value and slope there.

    Uses ``v(x) = v(x0) + (e^{a(x-x0)} - 1) w(x0)/a
    - (1/a) int_{x0}^x (e^{a(x-s)} - 1) g(s) ds`` with ``g = (v_+ * K)/c``
    and ``a = omega/c``.  Returns values at nodes ``anchor_index..end``.
    """
    p = profile.params
    g = profile.grid
    i0 = int(anchor_index)
    if not 0 <= i0 < g.n_points:
        raise IndexError(f"anchor_index={anchor_index} out of range")
    a = p.rate
    x = g.nodes[i0:] - g.nodes[i0]
    src = profile.source()[i0:]
    sub = Grid1D(0.0, x[-1], x.size) if x.size > 1 else None
    v0, w0 = profile.v.values[i0], profile.w.values[i0]
    if sub is None:
        return np.array([v0])
    damped = cumulative_from_anchor(Field(sub, np.exp(-a * x) * src), 0).values
    plain = cumulative_from_anchor(Field(sub, src), 0).values
    return v0 + (np.exp(a * x) - 1) * w0 / a - (np.exp(a * x) * damped - plain) / a


# diagnostics -----------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialBoundsReport:
    lower_violation: float
    upper_violation: float
    tolerance: float
    tail_ratio: float
    passed: bool


def check_exponential_bounds(profile, tolerance=None):
    """Compare ``w`` with the heat-wave slope ``kappa*exp(omega*x)``.

    Expected: ``w >= kappa e^{omega x}`` left of 0 and ``w <= kappa
    e^{omega x}`` right of 0, up to ``1e-6 + 10 h^2`` by default.  The last
    kernel window at the right edge is excluded.  ``tail_ratio`` is
    ``w/e^{omega x}`` at the last reliable node.
    """
    p = profile.params
    if tolerance is None:
        tolerance = 1e-6 + 10 * p.grid.h ** 2
    x = p.grid.nodes
    end = profile.reliable_end
    ref = p.kappa * np.exp(p.rate * x)
    w = profile.w.values
    a = p.anchor
    lower = float(np.max(ref[:a] - w[:a], initial=0.0))
    upper = float(np.max(w[a : end + 1] - ref[a : end + 1], initial=0.0))
    tail = float(w[end] / math.exp(p.rate * x[end]))
    passed = lower <= tolerance and upper <= tolerance
    return ExponentialBoundsReport(lower, upper, tolerance, tail, passed)


def monotonicity_interval(intensity, radius):
    """Closed-form length of the interval where the slope stays positive.

    Valid for unit diffusion and unit speed when
    ``intensity*(e^R (e^R - 1) - R) < 1``.  Returns ``(L, precondition_value)``
    with ``L = None`` when the precondition fails.
    """
    lam, r = float(intensity), float(radius)
    pre = lam * (math.exp(r) * (math.exp(r) - 1) - r)
    if not pre < 1:
        return None, pre
    num = 1 + lam * (math.exp(r) + r - 1)
    den = lam * (math.exp(r) - math.exp(-r))
    return math.log(num / den), pre


@dataclass(frozen=True)
class MonotonicityReport:
    first_negative_x: float
    interval_length: float
    precondition_value: float
    positive_up_to_length: bool


def monotonicity_analysis(profile):
    """Scan for the first node where ``w < 0`` and check the closed-form interval.

    The closed form applies when ``c = 1`` and ``omega = 1``; otherwise
    ``interval_length`` is None and only the scan is reported.
    """
    p = profile.params
    w = profile.w.values[: profile.reliable_end + 1]
    x = p.grid.nodes[: profile.reliable_end + 1]
    neg = np.flatnonzero(w < 0)
    first = float(x[neg[0]]) if neg.size else None
    length = pre = None
    ok = None
    k = p.kernel
    if p.c == 1 and p.omega == 1 and k.shape != "dirac_idealized":
        if k.intensity > 0:
            length, pre = monotonicity_interval(k.intensity, k.radius)
        else:
            length, pre = math.inf, 0.0
        if length is not None:
            ok = bool(np.all(w[x <= length] > 0))
    return MonotonicityReport(first, length, pre, ok)


@dataclass(frozen=True)
class DivergenceReport:
    right_value: float
    left_limit: float
    increasing_tail: bool
    degenerate: bool
    passed: bool


def divergence_probe(profile):
    """Check that ``|v|`` grows at the right while the left limit stays finite.

    Passes when ``|v|`` increases over the last tenth of the nodes, the
    right value exceeds ``10*|left limit| + 1``, and the left limit is
    finite and nonpositive.  A constant profile is flagged as degenerate.
    """
    v = profile.v.values
    left = profile.left_limit
    degenerate = bool(np.all(v == v[0]))
    tail = np.abs(v[-max(2, v.size // 10) :])
    increasing = bool(np.all(np.diff(tail) > 0))
    right = float(v[-1])
    passed = (
        not degenerate and increasing and math.isfinite(left) and left <= 0
        and right > 10 * abs(left) + 1
    )
    return DivergenceReport(right, left, increasing, degenerate, passed)


class TravelingWaveSolver(BaseEstimator):
    """Estimator interface to :func:`solve`.

    ``fit()`` computes the profile (no data needed); ``predict(x)`` returns
    ``v`` at arbitrary positions and ``predict_slope(x)`` returns ``v'``.

    Parameters
    ----------
    omega : float
        Wave speed.
    kappa : float
        Slope at the origin.
    diffusion : float
    kernel : Kernel or None
        Defaults to the unit-mass step kernel with intensity 10 and radius 0.05.
    x_max : float
    n_points : int
    tol : float
    max_iter : int
    route : {"short_range", "mild"}
    stopping : {"weighted", "relative_sup"}
    """

    def __init__(self, omega=3.0, kappa=1.0, diffusion=1.0, kernel=None, x_max=1.0,
                 n_points=20001, tol=1e-10, max_iter=100, route="short_range",
                 stopping="weighted"):
        self.omega = omega
        self.kappa = kappa
        self.diffusion = diffusion
        self.kernel = kernel
        self.x_max = x_max
        self.n_points = n_points
        self.tol = tol
        self.max_iter = max_iter
        self.route = route
        self.stopping = stopping

    def fit(self, X=None, y=None):
        kernel = self.kernel if self.kernel is not None else make_step(10.0, 0.05)
        params = WaveParams(
            omega=self.omega, kappa=self.kappa, kernel=kernel, x_max=self.x_max,
            n_points=self.n_points, c=self.diffusion, tol=self.tol,
            max_iter=self.max_iter, route=self.route, stopping=self.stopping,
        )
        self.profile_ = solve(params)
        self.report_ = self.profile_.iteration
        self.grid_ = params.grid
        self.converged_ = self.report_.converged
        self.n_iter_ = self.report_.iterations_used
        return self

    def _check_fitted(self):
        if not hasattr(self, "profile_"):
            raise AttributeError("TravelingWaveSolver is not fitted yet; call fit first")

    def predict(self, X):
        self._check_fitted()
        return self.profile_.evaluate(check_positions(X))[0]

    def predict_slope(self, X):
        self._check_fitted()
        return self.profile_.evaluate(check_positions(X))[1]

    def score(self, X=None, y=None):
        """Negative fixed-point residual of the fitted profile."""
        self._check_fitted()
        return -self.report_.residual_sup
