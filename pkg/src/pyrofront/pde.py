"""Explicit time stepping of the nonlocal bushfire equation on a bounded domain.

The temperature ``u`` obeys ``u_t = c*Lap(u) + int_Omega (u(y)-theta)_+ K(x-y) dy``
with Dirichlet data on the boundary.  Two geometries are supported: an
interval ``[x_min, x_max]`` and radially symmetric data on the unit ball of
dimension 1, 2 or 3 (the grid then samples the radius on ``[0, 1]``).

The update is written in monotone form, so two runs with ordered data stay
ordered at the discrete level.
"""

from dataclasses import dataclass
import math
import numbers

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positions, check_positive, check_samples
from .exceptions import BlowUp, ConfigurationError
from .kernels import make_step
from .numerics import Field, Grid1D, _apply_stencil, convolution_stencil

__all__ = [
    "ProblemSpec",
    "Trajectory",
    "OrderingReport",
    "tabulated_boundary",
    "step",
    "simulate",
    "simulate_frozen",
    "ordering_check",
    "trajectory_rows",
    "nonlocal_term",
    "EvolutionSolver",
]

BLOWUP_LEVEL = 1e12
_ANGULAR_NODES = 4096


def tabulated_boundary(times, values):
    """Boundary data interpolated linearly from ``(time, value)`` samples."""
    times = check_samples(times, "boundary times")
    values = check_samples(values, "boundary values", times.size)
    if np.any(np.diff(times) <= 0):
        raise ValueError("boundary times must be strictly increasing")

    def g(t):
        return float(np.interp(t, times, values))

    return g


def _boundary_pair(boundary, t):
    value = boundary(t) if callable(boundary) else boundary
    if isinstance(value, numbers.Real):
        return float(value), float(value)
    left, right = value
    return float(left), float(right)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Everything needed to run one evolution.

    Parameters
    ----------
    mode : {"interval", "radial"}
    dimension : int
        Ball dimension in radial mode (1, 2 or 3); ignored for intervals.
    c : float
        Diffusion coefficient.
    theta : float
        Ignition temperature.
    kernel : Kernel
    grid : Grid1D
        Spatial grid; in radial mode it must be ``[0, 1]``.
    boundary : float, (float, float) or callable
        Dirichlet value ``g(t)``.  A pair gives separate left/right values
        (interval mode); a callable may return either form.
    initial : Field or array-like
        Initial temperature on the grid.
    dt, t_end : float
    snapshot_every : int
        Record a snapshot every this many steps (the final time is always kept).
    """

    mode: str
    c: float
    theta: float
    kernel: object
    grid: Grid1D
    initial: Field
    dt: float
    t_end: float
    boundary: object = 0.0
    dimension: int = 1
    snapshot_every: int = 1

    def __post_init__(self):
        if self.mode not in ("interval", "radial"):
            raise ValueError(f"mode must be 'interval' or 'radial', got {self.mode!r}")
        check_positive(self.c, "c")
        check_positive(self.dt, "dt")
        check_positive(self.t_end, "t_end")
        if not isinstance(self.theta, numbers.Real) or not math.isfinite(self.theta):
            raise ValueError(f"theta must be a finite real number, got {self.theta!r}")
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 1:
            raise ValueError("snapshot_every must be a positive integer")
        initial = self.initial
        if not isinstance(initial, Field):
            initial = Field(self.grid, initial)
        elif initial.grid != self.grid:
            raise ValueError("initial field lives on a different grid")
        object.__setattr__(self, "initial", initial)
        if self.mode == "radial":
            if self.dimension not in (1, 2, 3):
                raise ValueError(f"radial mode supports dimensions 1, 2, 3, got {self.dimension}")
            if abs(self.grid.x_min) > 1e-12 or abs(self.grid.x_max - 1.0) > 1e-12:
                raise ValueError("radial grids must span [0, 1]")
        limit = self.cfl_limit
        if self.dt > limit * (1 + 1e-12):
            raise ConfigurationError(
                f"dt={self.dt:g} violates the CFL bound {limit:g} for h={self.grid.h:g}"
            )
        left, right = _boundary_pair(self.boundary, 0.0)
        u0 = initial.values
        ends = [(u0[-1], right)] if self.mode == "radial" else [(u0[0], left), (u0[-1], right)]
        for got, want in ends:
            if abs(got - want) > 1e-9:
                raise ValueError(
                    f"initial data {got:g} does not match boundary value {want:g} at t=0"
                )

    @property
    def cfl_limit(self):
        h2 = self.grid.h ** 2
        n = self.dimension if self.mode == "radial" else 1
        return h2 / (2.0 * self.c * n)

    @property
    def n_steps(self):
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))

    def time_at(self, k):
        """Time after `k` steps; the last step is shortened to land on t_end."""
        return self.t_end if k >= self.n_steps else k * self.dt

    def local_mass(self):
        """``sup_x int_Omega K(x-y) dy`` over grid points."""
        return float(np.max(nonlocal_term(np.ones(self.grid.n_points), self)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    spec: ProblemSpec
    times: np.ndarray
    values: np.ndarray
    blowup_time: float = None

    @property
    def blew_up(self):
        return self.blowup_time is not None

    @property
    def snapshots(self):
        return [(t, Field(self.spec.grid, u)) for t, u in zip(self.times, self.values)]

    @property
    def final(self):
        return Field(self.spec.grid, self.values[-1])


# nonlocal term ---------------------------------------------------------------

_weight_cache = {}


def _radial_weights(spec):
    """Matrix ``W`` with ``int_{B_1} f(|y|) K(|x-y|) dy ~= W @ f`` at radii."""
    key = (id(spec.kernel), spec.dimension, spec.grid)
    hit = _weight_cache.get(key)
    if hit is not None and hit[0] is spec.kernel:
        return hit[1]
    r = spec.grid.nodes
    h = spec.grid.h
    # midpoint rule in the polar angle, fixed node count
    theta = (np.arange(_ANGULAR_NODES) + 0.5) * (math.pi / _ANGULAR_NODES)
    cos_t = np.cos(theta)
    if spec.dimension == 2:
        ang_w = np.full(theta.size, 2.0 * math.pi / _ANGULAR_NODES)
        surface = lambda s: s
    else:
        ang_w = 2.0 * math.pi * np.sin(theta) * (math.pi / _ANGULAR_NODES)
        surface = lambda s: s * s
    radial_w = np.full(r.size, h)
    radial_w[0] = radial_w[-1] = 0.5 * h
    W = np.empty((r.size, r.size))
    for i, ri in enumerate(r):
        dist = np.sqrt(np.maximum(ri * ri + r[:, None] ** 2 - 2 * ri * r[:, None] * cos_t, 0.0))
        angular = (spec.kernel(dist) * ang_w).sum(axis=1)
        W[i] = angular * surface(r) * radial_w
    W.setflags(write=False)
    _weight_cache[key] = (spec.kernel, W)
    return W


def nonlocal_term(source, spec):
    """``int_Omega source(y) K(x-y) dy`` at every grid node."""
    kernel = spec.kernel
    if kernel.intensity == 0:
        return np.zeros_like(source)
    if kernel.shape == "dirac_idealized":
        return source.copy()
    coeffs = convolution_stencil(kernel, spec.grid.h)
    if spec.mode == "interval":
        return _apply_stencil(source, coeffs, 0.0, 0.0)
    if spec.dimension == 1:
        # even extension to [-1, 1]
        n = source.size
        mirrored = np.concatenate([source[:0:-1], source])
        return _apply_stencil(mirrored, coeffs, 0.0, 0.0)[n - 1 :]
    W = _radial_weights(spec)
    return (W * source).sum(axis=1)


def _source(u, spec):
    return nonlocal_term(np.maximum(u - spec.theta, 0.0), spec)


# time stepping ---------------------------------------------------------------

def _diffuse(u, spec, dt):
    """Monotone explicit diffusion update of interior (and origin) nodes."""
    h2 = spec.grid.h ** 2
    lam = spec.c * dt / h2
    out = u.copy()
    if spec.mode == "interval" or spec.dimension == 1:
        out[1:-1] = (1 - 2 * lam) * u[1:-1] + lam * (u[:-2] + u[2:])
    else:
        i = np.arange(1, u.size - 1)
        drift = (spec.dimension - 1) / (2.0 * i)
        out[1:-1] = (1 - 2 * lam) * u[1:-1] + lam * (
            (1 - drift) * u[:-2] + (1 + drift) * u[2:]
        )
    if spec.mode == "radial":
        # ghost node u(-h) = u(h); Laplacian at the origin is n*u''(0)
        n = spec.dimension
        out[0] = (1 - 2 * n * lam) * u[0] + 2 * n * lam * u[1]
    return out


def _advance(u, t, spec, dt, heating):
    out = _diffuse(u, spec, dt) + dt * heating
    left, right = _boundary_pair(spec.boundary, t + dt)
    if spec.mode == "interval":
        out[0] = left
    out[-1] = right
    if not np.all(np.isfinite(out)) or np.max(np.abs(out)) > BLOWUP_LEVEL:
        raise BlowUp(t + dt)
    return out


def step(state, t, spec, dt=None):
    """One explicit Euler step of size `dt` (default ``spec.dt``) from time `t`.

    Raises
    ------
    ConfigurationError
        If `dt` exceeds the CFL limit.
    BlowUp
        If the new values are non-finite or exceed 1e12 in magnitude.
    """
    dt = spec.dt if dt is None else dt
    if dt > spec.cfl_limit * (1 + 1e-12):
        raise ConfigurationError(f"dt={dt:g} violates the CFL bound {spec.cfl_limit:g}")
    u = state.values if isinstance(state, Field) else check_samples(state, "state", spec.grid.n_points)
    return Field(spec.grid, _advance(u, t, spec, dt, _source(u, spec)))


def _run(spec, frozen):
    u = spec.initial.values.copy()
    frozen_heat = _source(u, spec) if frozen else None
    times, values = [0.0], [u.copy()]
    blowup = None
    n_steps = spec.n_steps
    for k in range(n_steps):
        t = spec.time_at(k)
        dt = spec.time_at(k + 1) - t
        heating = frozen_heat if frozen else _source(u, spec)
        try:
            u = _advance(u, t, spec, dt, heating)
        except BlowUp as exc:
            blowup = exc.time
            break
        if (k + 1) % spec.snapshot_every == 0 or k + 1 == n_steps:
            times.append(spec.time_at(k + 1))
            values.append(u.copy())
    return Trajectory(spec, np.array(times), np.array(values), blowup)


def simulate(spec):
    """Iterate :func:`step` to ``t_end``, stopping early on blow-up."""
    return _run(spec, frozen=False)


def simulate_frozen(spec):
    """Same scheme with the nonlocal term evaluated once from the initial data."""
    return _run(spec, frozen=True)


@dataclass(frozen=True)
class OrderingReport:
    max_violation: float
    tolerance: float
    passed: bool
    n_snapshots: int


def ordering_check(lower, upper, tolerance=None):
    """Run two problems with ordered data and measure ``max(0, u - v)``.

    `lower` and `upper` must share grid, kernel, coefficients and time
    stepping.  The default tolerance is ``1e-8 + 10*h**2``.
    """
    same = (
        lower.grid == upper.grid and lower.kernel is upper.kernel
        and lower.mode == upper.mode and lower.dimension == upper.dimension
        and lower.c == upper.c and lower.theta == upper.theta
        and lower.dt == upper.dt and lower.t_end == upper.t_end
        and lower.snapshot_every == upper.snapshot_every
    )
    if not same:
        raise ValueError("ordering_check needs two problems differing only in their data")
    if tolerance is None:
        tolerance = 1e-8 + 10 * lower.grid.h ** 2
    u, v = simulate(lower), simulate(upper)
    n = min(len(u.times), len(v.times))
    violation = float(np.max(np.maximum(u.values[:n] - v.values[:n], 0.0)))
    return OrderingReport(violation, tolerance, violation <= tolerance, n)


def trajectory_rows(trajectory):
    """Rows ``(t, x, u)`` for CSV export, one per snapshot and node."""
    x = trajectory.spec.grid.nodes
    for t, u in zip(trajectory.times, trajectory.values):
        for xi, ui in zip(x, u):
            yield (t, xi, ui)


class EvolutionSolver(BaseEstimator):
    """Estimator wrapper around :func:`simulate`.

    ``fit(u0)`` runs the evolution from the initial samples (or a callable of
    position) and stores the trajectory; ``predict(times)`` interpolates the
    stored snapshots linearly in time.

    Parameters
    ----------
    mode : {"interval", "radial"}
    dimension : int
    diffusion : float
    threshold : float
        Ignition temperature.
    kernel : Kernel or None
        Defaults to the unit-mass step kernel with radius 0.5.
    x_min, x_max : float
        Interval ends (radial mode always uses ``[0, 1]``).
    n_points : int
    boundary : float, pair or callable
    dt : float or None
        Defaults to 0.9 times the CFL limit.
    t_end : float
    snapshot_every : int
    frozen : bool
        Use the frozen-convolution variant.
    """

    def __init__(self, mode="interval", dimension=1, diffusion=1.0, threshold=1.0,
                 kernel=None, x_min=0.0, x_max=1.0, n_points=101, boundary=0.0,
                 dt=None, t_end=1.0, snapshot_every=1, frozen=False):
        self.mode = mode
        self.dimension = dimension
        self.diffusion = diffusion
        self.threshold = threshold
        self.kernel = kernel
        self.x_min = x_min
        self.x_max = x_max
        self.n_points = n_points
        self.boundary = boundary
        self.dt = dt
        self.t_end = t_end
        self.snapshot_every = snapshot_every
        self.frozen = frozen

    def _make_grid(self):
        if self.mode == "radial":
            return Grid1D(0.0, 1.0, self.n_points)
        return Grid1D(self.x_min, self.x_max, self.n_points)

    def fit(self, X, y=None):
        grid = self._make_grid()
        u0 = X(grid.nodes) if callable(X) else check_positions(X, "u0")
        kernel = self.kernel if self.kernel is not None else make_step(1.0, 0.5)
        dims = self.dimension if self.mode == "radial" else 1
        dt = self.dt
        if dt is None:
            dt = 0.9 * grid.h ** 2 / (2.0 * self.diffusion * dims)
        spec = ProblemSpec(
            mode=self.mode, c=self.diffusion, theta=self.threshold, kernel=kernel,
            grid=grid, initial=u0, dt=dt, t_end=self.t_end, boundary=self.boundary,
            dimension=self.dimension, snapshot_every=self.snapshot_every,
        )
        self.spec_ = spec
        self.trajectory_ = simulate_frozen(spec) if self.frozen else simulate(spec)
        self.blowup_time_ = self.trajectory_.blowup_time
        return self

    def predict(self, X):
        """Temperature profiles at the requested times, shape ``(len(X), n_points)``."""
        if not hasattr(self, "trajectory_"):
            raise AttributeError("EvolutionSolver is not fitted yet; call fit first")
        times = np.atleast_1d(check_positions(X, "times"))
        traj = self.trajectory_
        if np.any(times < 0) or np.any(times > traj.times[-1] + 1e-12):
            raise ValueError(f"times must lie in [0, {traj.times[-1]:g}]")
        out = np.empty((times.size, traj.values.shape[1]))
        for j in range(traj.values.shape[1]):
            out[:, j] = np.interp(times, traj.times, traj.values[:, j])
        return out

    def score(self, X, y):
        """Negative sup-error of the predicted profiles against `y`."""
        return -float(np.max(np.abs(self.predict(X) - np.asarray(y))))
