"""Named numerical experiments with pass/fail reports.

Each scenario runs one quantitative check with fixed defaults (all of which
may be overridden), returns a :class:`ScenarioReport`, and may attach
detail tables that :func:`write_reports` exports as CSV.
"""

from dataclasses import dataclass, field
import math
import operator
from pathlib import Path
import time

import numpy as np

from .io import emit_csv
from .kernels import make_step, zero_kernel
from .numerics import Field, Grid1D
from .pde import ProblemSpec, nonlocal_term, ordering_check, simulate, simulate_frozen
from .stability import (
    Perturbation,
    instability_witness,
    positive_part_increment,
    small_support_check,
    stability_form,
    witness_lower_bound,
)
from .waves import (
    WaveParams,
    WaveProfile,
    check_exponential_bounds,
    divergence_probe,
    idealized_wave,
    monotonicity_analysis,
    monotonicity_interval,
    solve,
)

__all__ = [
    "Check",
    "ScenarioReport",
    "scenario_ids",
    "scenario_tags",
    "scenario_defaults",
    "run_scenario",
    "run_all",
    "write_reports",
]

SQRT3 = math.sqrt(3.0)

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


@dataclass(frozen=True)
class Check:
    measured: str
    op: str
    threshold: str

    def holds(self, measured, threshold):
        value, limit = measured[self.measured], threshold[self.threshold]
        if isinstance(value, float) and math.isnan(value):
            return False
        return bool(_OPS[self.op](value, limit))

    def describe(self):
        return f"{self.measured} {self.op} {self.threshold}"


@dataclass
class ScenarioReport:
    scenario_id: str
    claim_ref: str
    measured: dict
    threshold: dict
    checks: tuple
    runtime_ms: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.holds(self.measured, self.threshold) for c in self.checks)

    def failed_checks(self):
        return [c.describe() for c in self.checks if not c.holds(self.measured, self.threshold)]

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(
            f"{c.measured}={_short(self.measured[c.measured])} {c.op} "
            f"{_short(self.threshold[c.threshold])}"
            for c in self.checks
        )
        return f"{status} {self.scenario_id}: {parts}"


def _short(x):
    return f"{x:.6g}" if isinstance(x, float) else str(x)


@dataclass(frozen=True)
class _Scenario:
    scenario_id: str
    tags: tuple
    claim: str
    defaults: dict
    func: object


_REGISTRY = {}


def _scenario(scenario_id, tags, claim, **defaults):
    def register(func):
        _REGISTRY[scenario_id] = _Scenario(scenario_id, tuple(tags), claim, defaults, func)
        return func

    return register


def scenario_ids(tag=None):
    return sorted(k for k, s in _REGISTRY.items() if tag is None or tag in s.tags)


def scenario_tags():
    return sorted({t for s in _REGISTRY.values() for t in s.tags})


def scenario_defaults(scenario_id):
    return dict(_lookup(scenario_id).defaults)


def _lookup(scenario_id):
    try:
        return _REGISTRY[scenario_id]
    except KeyError:
        raise ValueError(
            f"unknown scenario {scenario_id!r}; known: {', '.join(scenario_ids())}"
        ) from None


def _coerce(key, value, default):
    if isinstance(value, str) and not isinstance(default, str):
        if isinstance(default, bool):
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
            raise ValueError(f"{key}: expected a boolean, got {value!r}")
        try:
            return type(default)(float(value)) if isinstance(default, int) else float(value)
        except ValueError:
            raise ValueError(f"{key}: expected a number, got {value!r}") from None
    if isinstance(default, int) and not isinstance(default, bool):
        if float(value) != int(value):
            raise ValueError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def _config(sc, overrides):
    cfg = dict(sc.defaults)
    for key, value in (overrides or {}).items():
        if key not in cfg:
            raise ValueError(
                f"scenario {sc.scenario_id!r} has no parameter {key!r}; "
                f"valid: {', '.join(sorted(cfg))}"
            )
        cfg[key] = _coerce(key, value, cfg[key])
    return cfg


def run_scenario(scenario_id, overrides=None):
    """Run one registered scenario with optional parameter overrides."""
    sc = _lookup(scenario_id)
    cfg = _config(sc, overrides)
    start = time.perf_counter()
    measured, threshold, checks, details = sc.func(cfg)
    elapsed = time.perf_counter() - start
    return ScenarioReport(
        scenario_id=sc.scenario_id,
        claim_ref=sc.claim,
        measured=measured,
        threshold=threshold,
        checks=tuple(Check(*c) for c in checks),
        runtime_ms=int(round(elapsed * 1000)),
        details=details,
    )


def run_all(tag=None, overrides=None):
    """Run every scenario (or those carrying `tag`), ordered by id.

    `overrides` maps scenario ids to parameter overrides.
    """
    overrides = overrides or {}
    unknown = set(overrides) - set(_REGISTRY)
    if unknown:
        raise ValueError(f"overrides for unknown scenarios: {sorted(unknown)}")
    return [run_scenario(sid, overrides.get(sid)) for sid in scenario_ids(tag)]


def write_reports(reports, out_dir):
    """Export the ledger and per-scenario CSVs; returns the written paths.

    ``ledger.csv`` lists ``scenario_id,claim_ref,pass,runtime_ms``.  Each
    scenario also gets ``<id>.csv`` with its measured values and thresholds
    (wall-clock entries omitted, so these files are reproducible) and one
    file per attached detail table.
    """
    out = Path(out_dir)
    paths = [
        emit_csv(
            ("scenario_id", "claim_ref", "pass", "runtime_ms"),
            [(r.scenario_id, r.claim_ref, r.passed, r.runtime_ms) for r in reports],
            out / "ledger.csv",
        )
    ]
    for r in reports:
        rows = [("measured", k, v) for k, v in r.measured.items() if not k.startswith("runtime")]
        rows += [("threshold", k, v) for k, v in r.threshold.items() if not k.startswith("runtime")]
        rows += [("check", c.describe(), c.holds(r.measured, r.threshold)) for c in r.checks]
        paths.append(emit_csv(("kind", "name", "value"), rows, out / f"{r.scenario_id}.csv"))
        for name, (header, table) in r.details.items():
            paths.append(emit_csv(header, table, out / f"{r.scenario_id}_{name}.csv"))
    return paths


# helpers ---------------------------------------------------------------------

def _smooth_random(rng, x, modes=4, level=(0.5, 1.5), scale=0.3):
    """Random trigonometric polynomial on [0, 1]."""
    u = np.full(x.shape, rng.uniform(*level))
    for k in range(1, modes + 1):
        a, b = rng.normal(0.0, scale / k, size=2)
        u = u + a * np.sin(k * math.pi * x) + b * np.cos(k * math.pi * x)
    return u


def _interval_spec(u0, c, theta, kernel, grid, t_end, cfl_fraction=0.9, snapshot_every=1):
    dt = cfl_fraction * grid.h ** 2 / (2.0 * c)
    return ProblemSpec(
        mode="interval", c=c, theta=theta, kernel=kernel, grid=grid, initial=u0,
        dt=dt, t_end=t_end, boundary=(float(u0[0]), float(u0[-1])),
        snapshot_every=snapshot_every,
    )


def _radial_spec(u0, c, theta, kernel, grid, t_end, boundary, dimension=1,
                 cfl_fraction=0.9, snapshot_every=1):
    dt = cfl_fraction * grid.h ** 2 / (2.0 * c * dimension)
    return ProblemSpec(
        mode="radial", c=c, theta=theta, kernel=kernel, grid=grid, initial=u0,
        dt=dt, t_end=t_end, boundary=boundary, dimension=dimension,
        snapshot_every=snapshot_every,
    )


def _fit_rate(t, y):
    return float(np.polyfit(np.asarray(t), np.log(np.asarray(y)), 1)[0])


def _wave(omega, lam, radius, x_max, points, **kw):
    return solve(WaveParams(omega, kw.pop("kappa", 1.0), make_step(lam, radius),
                            x_max, points, **kw))


def _profile_table(profile, x, omega, kappa=1.0):
    v, w = profile.evaluate(x)
    ideal = idealized_wave(omega, x, kappa)
    return (("x", "v", "w", "idealized"), list(zip(x, v, w, ideal)))


def extinction_constant(kernel, grid, dimension=1):
    """``sup_x int_{B_1} (1 - |y|^2) K(x - y) dy`` by the solver's own quadrature."""
    probe = ProblemSpec(
        mode="radial", c=1.0, theta=0.0, kernel=kernel, grid=grid,
        initial=1.0 - grid.nodes ** 2, dt=grid.h ** 2 / (2.0 * dimension),
        t_end=1.0, boundary=0.0, dimension=dimension,
    )
    return float(np.max(nonlocal_term(1.0 - grid.nodes ** 2, probe)))


def frozen_horizon(local_mass, theta=1.0):
    """Smaller of ``1/(2 S_theta + 1)`` and ``1/(2 S_{theta+1})``.

    ``S_r = (r - theta)_+ * local_mass``, so ``S_theta = 0``.
    """
    s_theta = 0.0
    s_next = 1.0 * local_mass
    first = 1.0 / (2 * s_theta + 1)
    second = math.inf if s_next == 0 else 1.0 / (2 * s_next)
    return min(first, second)


# evolution scenarios -----------------------------------------------------------

@_scenario(
    "comparison_ordering", ("pde",),
    "comparison principle: ordered initial and boundary data stay ordered",
    pairs=100, seed=0, points=101, c=0.05, theta=1.0, intensity=2.0, radius=0.2,
    t_end=0.5, shift=0.1, violation_limit=1e-12,
)
def _comparison(cfg):
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    rng = np.random.default_rng(cfg["seed"])
    worst, rows = 0.0, []
    for i in range(cfg["pairs"]):
        v0 = _smooth_random(rng, grid.nodes)
        upper = _interval_spec(v0, cfg["c"], cfg["theta"], kernel, grid, cfg["t_end"],
                               snapshot_every=10)
        lower = _interval_spec(v0 - cfg["shift"], cfg["c"], cfg["theta"], kernel, grid,
                               cfg["t_end"], snapshot_every=10)
        rep = ordering_check(lower, upper)
        worst = max(worst, rep.max_violation)
        rows.append((i, rep.max_violation, rep.passed))
    measured = {"max_violation": worst}
    threshold = {"violation_limit": cfg["violation_limit"]}
    details = {"pairs": (("pair", "max_violation", "pass"), rows)}
    return measured, threshold, [("max_violation", "<=", "violation_limit")], details


@_scenario(
    "necessity_of_ignition", ("pde",),
    "necessity of ignition: data at or below the ignition temperature never exceed it",
    cases=20, seed=1, points=101, c=0.05, theta=1.0, intensity=2.0, radius=0.2,
    t_end=0.5, violation_limit=1e-12,
)
def _necessity(cfg):
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    rng = np.random.default_rng(cfg["seed"])
    theta = cfg["theta"]
    worst = -math.inf
    for _ in range(cfg["cases"]):
        u0 = theta - np.abs(_smooth_random(rng, grid.nodes, level=(0.0, 0.5)))
        spec = _interval_spec(u0, cfg["c"], theta, kernel, grid, cfg["t_end"],
                              snapshot_every=10)
        ceiling = _interval_spec(np.full(grid.n_points, theta), cfg["c"], theta, kernel,
                                 grid, cfg["t_end"], snapshot_every=10)
        rep = ordering_check(spec, ceiling)
        worst = max(worst, rep.max_violation)
        traj = simulate(spec)
        worst = max(worst, float(np.max(traj.values)) - theta)
    measured = {"max_excess_over_theta": max(worst, 0.0)}
    threshold = {"violation_limit": cfg["violation_limit"]}
    return measured, threshold, [("max_excess_over_theta", "<=", "violation_limit")], {}


@_scenario(
    "invasion", ("pde",),
    "invasion: a strong initial fire with small diffusion grows exponentially",
    points=101, c=0.005, theta=1.0, lambda0=2.0, intensity=1.0, radius=0.5,
    t_end=5.0, snapshot_every=20,
)
def _invasion(cfg):
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    shape = 1.0 - grid.nodes ** 2
    spec = _radial_spec(cfg["lambda0"] * shape, cfg["c"], cfg["theta"], kernel, grid,
                        cfg["t_end"], 0.0, snapshot_every=cfg["snapshot_every"])
    traj = simulate(spec)
    centre = traj.values[:, 0]
    ratio = np.min(traj.values[:, :-1] / (cfg["lambda0"] * shape[:-1]), axis=1)
    measured = {
        "growth_rate": _fit_rate(traj.times, centre),
        "min_ratio_increment": float(np.min(np.diff(ratio))),
        "final_centre": float(centre[-1]),
    }
    threshold = {"zero": 0.0, "ratio_slack": -1e-12}
    rows = list(zip(traj.times, centre, ratio))
    details = {"centre": (("t", "u_centre", "min_ratio"), rows)}
    checks = [("growth_rate", ">", "zero"), ("min_ratio_increment", ">=", "ratio_slack")]
    return measured, threshold, checks, details


@_scenario(
    "extinction", ("pde",),
    "extinction: strong diffusion drives the temperature below ignition exponentially",
    points=101, theta=1.0, lambda0=2.0, intensity=1.0, radius=0.5, diffusion_factor=1.5,
    t_end=5.0, fit_from=1.0, snapshot_every=20, slack=0.9,
)
def _extinction(cfg):
    n = 1
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    C = extinction_constant(kernel, grid, n)
    c = cfg["diffusion_factor"] * C / (2 * n)
    spec = _radial_spec(cfg["lambda0"] * (1 - grid.nodes ** 2), c, cfg["theta"], kernel,
                        grid, cfg["t_end"], 0.0, snapshot_every=cfg["snapshot_every"])
    traj = simulate(spec)
    sup = np.max(traj.values, axis=1)
    window = traj.times >= cfg["fit_from"]
    measured = {
        "extinction_constant": C,
        "diffusion": c,
        "decay_rate": -_fit_rate(traj.times[window], sup[window]),
        "final_sup": float(sup[-1]),
    }
    threshold = {"min_rate": cfg["slack"] * (2 * n * c - C), "theta": cfg["theta"]}
    details = {"sup": (("t", "sup_u"), list(zip(traj.times, sup)))}
    checks = [("decay_rate", ">=", "min_rate"), ("final_sup", "<", "theta")]
    return measured, threshold, checks, details


@_scenario(
    "boundary_ignition", ("pde",),
    "boundary ignition: a hot boundary ignites the whole ball by a computable time",
    points=101, c=1.0, theta=1.0, boundary_temp=2.0, beta=1.5, intensity=1.0,
    radius=0.5, snapshot_every=10, tol_factor=10.0,
)
def _boundary_ignition(cfg):
    n = 1
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    hot, theta, beta, c = cfg["boundary_temp"], cfg["theta"], cfg["beta"], cfg["c"]
    alpha = 2 * n * c * (hot - theta)
    t_star = (beta - hot + theta) / alpha
    shape = 1 - grid.nodes ** 2
    spec = _radial_spec(hot - beta * shape, c, theta, kernel, grid, t_star, hot,
                        snapshot_every=cfg["snapshot_every"])
    traj = simulate(spec)
    bound = hot - (beta - alpha * traj.times[:, None]) * shape[None, :]
    tol = cfg["tol_factor"] * grid.h ** 2
    measured = {
        "t_star": t_star,
        "final_time": float(traj.times[-1]),
        "min_u_at_t_star": float(np.min(traj.values[-1])),
        "bound_violation": float(np.max(bound - traj.values)),
    }
    threshold = {"ignition_floor": theta - tol, "tolerance": tol}
    details = {"final": (("x", "u"), list(zip(grid.nodes, traj.values[-1])))}
    checks = [("min_u_at_t_star", ">=", "ignition_floor"), ("bound_violation", "<=", "tolerance")]
    return measured, threshold, checks, details


def _frozen_ratio(u0, c, theta, kernel, grid, horizon):
    errors = []
    for t_end in (horizon, horizon / 2):
        spec = _interval_spec(u0, c, theta, kernel, grid, t_end)
        full, frozen = simulate(spec), simulate_frozen(spec)
        errors.append(float(np.max(np.abs(full.values - frozen.values))))
    return errors[0] / errors[1], errors


@_scenario(
    "frozen_convolution_error", ("pde",),
    "frozen convolution: replacing the nonlocal term by its initial value costs O(T)",
    points=101, c=0.05, theta=1.0, intensity=1.0, radius=0.2, amplitude=2.0,
    horizon=0.2, seed_a=0, seed_b=1, ratio_min=1.7, ratio_max=2.3,
)
def _frozen(cfg):
    grid = Grid1D(0.0, 1.0, cfg["points"])
    kernel = make_step(cfg["intensity"], cfg["radius"])
    theta = cfg["theta"]
    mass = _interval_spec(np.full(grid.n_points, theta), cfg["c"], theta, kernel, grid,
                          1.0).local_mass()
    measured = {"admissible_horizon": frozen_horizon(mass, theta)}
    rows = []
    for tag in ("a", "b"):
        rng = np.random.default_rng(cfg[f"seed_{tag}"])
        # rough data oscillating about the ignition temperature
        u0 = theta + cfg["amplitude"] * rng.uniform(-1, 1, grid.n_points) * np.sin(
            math.pi * grid.nodes
        )
        u0[[0, -1]] = theta
        ratio, (e_full, e_half) = _frozen_ratio(u0, cfg["c"], theta, kernel, grid,
                                                cfg["horizon"])
        measured[f"ratio_{tag}"] = ratio
        rows.append((tag, cfg["horizon"], e_full, e_half, ratio))
    measured["horizon"] = cfg["horizon"]
    threshold = {"ratio_min": cfg["ratio_min"], "ratio_max": cfg["ratio_max"]}
    checks = [
        ("ratio_a", ">=", "ratio_min"), ("ratio_a", "<=", "ratio_max"),
        ("ratio_b", ">=", "ratio_min"), ("ratio_b", "<=", "ratio_max"),
        ("horizon", "<=", "admissible_horizon_limit"),
    ]
    threshold["admissible_horizon_limit"] = measured["admissible_horizon"]
    details = {"errors": (("preset", "T", "error_T", "error_half_T", "ratio"), rows)}
    return measured, threshold, checks, details


# wave scenarios ----------------------------------------------------------------

@_scenario(
    "wave_convergence_omega3", ("wave",),
    "traveling-wave fixed-point iteration converges for a short-range kernel",
    omega=3.0, kappa=1.0, intensity=10.0, radius=0.05, x_max=1.0, points=20001,
    tol=1e-10, max_iter=50, delta_limit=1e-8, iteration_budget=15,
    residual_factor=50.0, runtime_limit_s=10.0,
)
def _wave_convergence(cfg):
    start = time.perf_counter()
    prof = _wave(cfg["omega"], cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"],
                 kappa=cfg["kappa"], tol=cfg["tol"], max_iter=cfg["max_iter"])
    runtime = time.perf_counter() - start
    rep = prof.iteration
    h = prof.grid.h
    a = prof.params.anchor
    budget = rep.weighted_deltas[: cfg["iteration_budget"]]
    measured = {
        "best_delta_in_budget": float(min(budget)),
        "iterations_used": rep.iterations_used,
        "residual_sup": rep.residual_sup,
        "origin_value_error": abs(float(prof.v.values[a])),
        "origin_slope_error": abs(float(prof.w.values[a]) - cfg["kappa"]),
        "contraction_factor": rep.contraction_factor,
        "runtime_s": runtime,
    }
    threshold = {
        "delta_limit": cfg["delta_limit"],
        "residual_limit": cfg["residual_factor"] * h,
        "origin_limit": 1e-10,
        "runtime_limit_s": cfg["runtime_limit_s"],
    }
    checks = [
        ("best_delta_in_budget", "<", "delta_limit"),
        ("residual_sup", "<=", "residual_limit"),
        ("origin_value_error", "<=", "origin_limit"),
        ("origin_slope_error", "<=", "origin_limit"),
        ("runtime_s", "<", "runtime_limit_s"),
    ]
    rows = [(i + 1, d, s) for i, (d, s) in enumerate(zip(rep.weighted_deltas, rep.sup_deltas))]
    details = {"deltas": (("iteration", "weighted_delta", "relative_sup_delta"), rows)}
    return measured, threshold, checks, details


def idealized_deviation(profile, omega, x, floor=0.01, kappa=1.0):
    """Relative deviations of a solved wave from the idealized wave on `x`.

    Returns ``(pointwise, positive_region, normwise)``: the sup of
    ``|v - v_ideal|/|v_ideal|`` over points with ``|v_ideal| > floor``; the
    same restricted to ``v > 0``; and ``sup|v - v_ideal| / sup|v_ideal|``.
    """
    v = profile(x)
    ideal = idealized_wave(omega, x, kappa)
    diff = np.abs(v - ideal)
    mask = np.abs(ideal) > floor
    pos = mask & (v > 0)
    pointwise = float(np.max(diff[mask] / np.abs(ideal[mask])))
    positive = float(np.max(diff[pos] / np.abs(ideal[pos]))) if pos.any() else math.nan
    normwise = float(np.max(diff) / np.max(np.abs(ideal)))
    return pointwise, positive, normwise


def _idealized_scenario(omega, label):
    @_scenario(
        f"wave_vs_idealized_{label}", ("wave", "figure"),
        "solved traveling wave is close to the idealized closed-form wave",
        omega=omega, intensity=10.0, radius=0.05, x_max=1.0, points=20001,
        plot_min=-1.0, plot_max=1.0, plot_points=2001, floor=0.01, max_rel_error=0.05,
        **({"long_x_max": 3 * math.pi, "long_points": 100001} if label == "sqrt3" else {}),
    )
    def run(cfg):
        om = cfg["omega"]
        prof = _wave(om, cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"])
        x = np.linspace(cfg["plot_min"], cfg["plot_max"], cfg["plot_points"])
        pointwise, positive, normwise = idealized_deviation(prof, om, x, cfg["floor"])
        measured = {
            "sup_rel_error": pointwise,
            "sup_rel_error_where_positive": positive,
            "norm_rel_error": normwise,
            "converged": int(prof.iteration.converged),
        }
        threshold = {"max_rel_error": cfg["max_rel_error"], "one": 1}
        checks = [("converged", ">=", "one"), ("sup_rel_error", "<=", "max_rel_error")]
        details = {"profile": _profile_table(prof, x, om)}
        if "long_x_max" in cfg:
            long_prof = _wave(om, cfg["intensity"], cfg["radius"], cfg["long_x_max"],
                              cfg["long_points"], max_iter=200, stopping="relative_sup")
            xs = long_prof.grid.nodes
            inside = (xs > 0) & (xs < cfg["long_x_max"]) & (
                np.arange(xs.size) <= long_prof.reliable_end
            )
            measured["sign_change_on_positive_axis"] = int(np.any(long_prof.v.values[inside] < 0))
            measured["long_converged"] = int(long_prof.iteration.converged)
            checks += [("sign_change_on_positive_axis", ">=", "one"), ("long_converged", ">=", "one")]
            xl = np.linspace(-cfg["long_x_max"], cfg["long_x_max"], 4001)
            details["profile_long"] = _profile_table(long_prof, xl, om)
        return measured, threshold, checks, details

    return run


for _om, _label in ((3.0, "3"), (2.0, "2"), (SQRT3, "sqrt3")):
    _idealized_scenario(_om, _label)


@_scenario(
    "exponential_bounds", ("wave",),
    "wave slope lies above the heat-wave slope left of the origin and below it to the right",
    intensity=10.0, radius=0.05, x_max=1.0, points=20001, kappa=1.0, equality_limit=1e-10,
)
def _exponential_bounds(cfg):
    rows = []
    worst_excess = -math.inf
    tail_margin = -math.inf
    for om in (3.0, 2.0, SQRT3):
        prof = _wave(om, cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"],
                     kappa=cfg["kappa"])
        rep = check_exponential_bounds(prof)
        excess = max(rep.lower_violation, rep.upper_violation) - rep.tolerance
        worst_excess = max(worst_excess, excess)
        tail_margin = max(tail_margin, rep.tail_ratio - cfg["kappa"])
        rows.append((om, rep.lower_violation, rep.upper_violation, rep.tolerance,
                     rep.tail_ratio, rep.passed))
    control = solve(WaveParams(3.0, cfg["kappa"], zero_kernel(cfg["radius"]), cfg["x_max"],
                               cfg["points"]))
    x = control.grid.nodes
    equality = float(np.max(np.abs(control.w.values - cfg["kappa"] * np.exp(3.0 * x))))
    measured = {
        "worst_violation_minus_tolerance": worst_excess,
        "zero_kernel_equality_error": equality,
        "worst_tail_ratio_minus_kappa": tail_margin,
    }
    threshold = {"zero": 0.0, "equality_limit": cfg["equality_limit"]}
    checks = [
        ("worst_violation_minus_tolerance", "<=", "zero"),
        ("zero_kernel_equality_error", "<=", "equality_limit"),
        ("worst_tail_ratio_minus_kappa", "<", "zero"),
    ]
    header = ("omega", "lower_violation", "upper_violation", "tolerance", "tail_ratio", "pass")
    return measured, threshold, checks, {"suite": (header, rows)}


@_scenario(
    "monotonicity_L", ("wave",),
    "wave slope stays positive on the closed-form monotonicity interval",
    intensity=0.1, radius=0.5, x_max=4.0, points=5001, expected_length=2.370,
    length_tol=5e-4, runtime_limit_s=10.0,
)
def _monotonicity(cfg):
    start = time.perf_counter()
    prof = _wave(1.0, cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"],
                 max_iter=300, stopping="relative_sup")
    rep = monotonicity_analysis(prof)
    runtime = time.perf_counter() - start
    length, pre = monotonicity_interval(cfg["intensity"], cfg["radius"])
    measured = {
        "precondition_value": pre,
        "interval_length": math.nan if length is None else length,
        "length_error": math.nan if length is None else abs(length - cfg["expected_length"]),
        "positive_up_to_length": int(bool(rep.positive_up_to_length)),
        "converged": int(prof.iteration.converged),
        "runtime_s": runtime,
    }
    threshold = {"one": 1, "length_tol": cfg["length_tol"],
                 "runtime_limit_s": cfg["runtime_limit_s"]}
    checks = [
        ("precondition_value", "<", "one"),
        ("length_error", "<=", "length_tol"),
        ("positive_up_to_length", ">=", "one"),
        ("converged", ">=", "one"),
        ("runtime_s", "<", "runtime_limit_s"),
    ]
    return measured, threshold, checks, {}


@_scenario(
    "nonmonotone_small_omega", ("wave",),
    "slow traveling waves lose monotonicity",
    intensity=1.0, radius=0.5, x_max=8.0, points=8001, halvings=5,
)
def _nonmonotone(cfg):
    rows = []
    largest = 0.0
    for k in range(cfg["halvings"] + 1):
        om = 2.0 ** -k
        prof = _wave(om, cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"],
                     max_iter=500, stopping="relative_sup")
        first = monotonicity_analysis(prof).first_negative_x
        if first is not None:
            largest = max(largest, om)
        rows.append((om, math.nan if first is None else first, prof.iteration.converged))
    measured = {"largest_nonmonotone_omega": largest}
    threshold = {"zero": 0.0}
    header = ("omega", "first_negative_slope_x", "converged")
    return measured, threshold, [("largest_nonmonotone_omega", ">", "zero")], {"scan": (header, rows)}


@_scenario(
    "divergence_sides", ("wave",),
    "traveling waves are unbounded to the right with a finite nonpositive left limit",
    omega=3.0, intensity=10.0, radius=0.05, x_max=2.0, points=20001,
)
def _divergence(cfg):
    om = cfg["omega"]
    prof = _wave(om, cfg["intensity"], cfg["radius"], cfg["x_max"], cfg["points"])
    rep = divergence_probe(prof)
    # heat wave kappa*(e^{omega x} - 1)/omega sampled exactly
    params = WaveParams(om, 1.0, zero_kernel(cfg["radius"]), cfg["x_max"], 2001)
    x = params.grid.nodes
    control = WaveProfile(params, Field(params.grid, np.expm1(om * x) / om),
                          Field(params.grid, np.exp(om * x)))
    measured = {
        "right_value": rep.right_value,
        "left_limit": rep.left_limit,
        "probe_passed": int(rep.passed),
        "zero_kernel_left_limit_error": abs(control.left_limit + 1.0 / om),
        "x_max_times_omega": prof.grid.x_max * om,
    }
    threshold = {"one": 1, "zero": 0.0, "limit_tol": 1e-12, "min_reach": 5.0}
    checks = [
        ("probe_passed", ">=", "one"),
        ("left_limit", "<=", "zero"),
        ("zero_kernel_left_limit_error", "<=", "limit_tol"),
        ("x_max_times_omega", ">=", "min_reach"),
    ]
    return measured, threshold, checks, {}


# stability scenarios -----------------------------------------------------------

@_scenario(
    "instability_witness", ("stability",),
    "a wide plateau perturbation makes the stability form positive",
    omega=3.0, intensity=10.0, radius=0.05, x_max=1.0, points=20001, c=1.0, eps=0.01,
    margin_fraction=0.5,
)
def _witness(cfg):
    kernel = make_step(cfg["intensity"], cfg["radius"])
    prof = solve(WaveParams(cfg["omega"], 1.0, kernel, cfg["x_max"], cfg["points"], c=cfg["c"]))
    pert = instability_witness(prof, kernel, cfg["c"], cfg["eps"])
    q = stability_form(prof, pert, cfg["c"], kernel)
    meta = pert.meta
    bound = witness_lower_bound(kernel.lower_intensity, meta["mu"], cfg["eps"], cfg["c"],
                                meta["width"])
    measured = {"Q": q, "mu": meta["mu"], "plateau_width": meta["width"],
                "theoretical_lower_bound": bound}
    threshold = {"required": cfg["margin_fraction"] * bound, "zero": 0.0}
    checks = [("Q", ">=", "required"), ("theoretical_lower_bound", ">", "zero")]
    return measured, threshold, checks, {}


def random_small_perturbation(rng, start, sigma, step, modes=4):
    """Smooth random perturbation supported on ``[start, start + sigma]``."""
    pad = 4 * step
    n = int(round((sigma + 2 * pad) / step)) + 1
    grid = Grid1D(start - pad, start - pad + (n - 1) * step, n)
    coeffs = rng.normal(size=modes) * rng.uniform(1e-3, 1.0)

    def shape(x):
        t = np.clip((x - start) / sigma, 0.0, 1.0)
        series = sum(c * np.sin((j + 1) * math.pi * t) for j, c in enumerate(coeffs))
        return np.sin(math.pi * t) ** 2 * series

    return Perturbation.from_function(grid, shape)


@_scenario(
    "small_support_stability", ("stability",),
    "perturbations with short support satisfy the stability inequality",
    omega=3.0, intensity=10.0, radius=0.05, x_max=1.0, points=20001, c=1.0,
    samples=100, sigma=0.5, seed=0, pairs=1_000_000, q_limit=1e-10,
)
def _small_support(cfg):
    kernel = make_step(cfg["intensity"], cfg["radius"])
    prof = solve(WaveParams(cfg["omega"], 1.0, kernel, cfg["x_max"], cfg["points"], c=cfg["c"]))
    rng = np.random.default_rng(cfg["seed"])
    rows, worst, skipped = [], -math.inf, 0
    for i in range(cfg["samples"]):
        start = rng.uniform(-1.5, 0.8)
        pert = random_small_perturbation(rng, start, cfg["sigma"], cfg["radius"] / 8)
        rep = small_support_check(prof, pert, cfg["c"], kernel, name=f"phi_{i:03d}")
        skipped += rep.skipped
        if not rep.skipped:
            worst = max(worst, rep.Q)
        rows.append((rep.name, rep.sigma, rep.bound, rep.Q, rep.passed))
    alpha = rng.normal(0.0, 1.0, cfg["pairs"]) * 10.0 ** rng.uniform(-3, 3, cfg["pairs"])
    beta = rng.normal(0.0, 1.0, cfg["pairs"]) * 10.0 ** rng.uniform(-3, 3, cfg["pairs"])
    lhs = np.abs(positive_part_increment(alpha, beta))
    measured = {
        "worst_Q": worst,
        "skipped": skipped,
        "scalar_inequality_excess": float(np.max(lhs - np.abs(beta))),
    }
    threshold = {"q_limit": cfg["q_limit"], "zero": 0.0, "none": 0}
    checks = [
        ("worst_Q", "<=", "q_limit"),
        ("skipped", "<=", "none"),
        ("scalar_inequality_excess", "<=", "zero"),
    ]
    return measured, threshold, checks, {"perturbations": (("name", "sigma", "bound", "Q", "pass"), rows)}


# figure fixture ------------------------------------------------------------------

def self_similar_profile(x, t, amplitude=-1.0, slope=1.0, c=1.0):
    """``amplitude*(exp(slope*lam(t)*x/c) - 1)`` with ``lam(t) = 1/(1 - slope*t)``."""
    lam = 1.0 / (1.0 - slope * np.asarray(t, dtype=float))
    return amplitude * (np.exp(slope * lam * np.asarray(x, dtype=float) / c) - 1.0)


@_scenario(
    "figure_fighss_fixture", ("figure",),
    "self-similar heat profile plot data 1 - exp(x/(1-t))",
    x_min=-1.0, x_max=1.0, points=201,
)
def _fighss(cfg):
    times = (-0.9, -0.5, 0.0, 0.5, 0.9)
    x = np.linspace(cfg["x_min"], cfg["x_max"], cfg["points"])
    rows, worst = [], 0.0
    for t in times:
        u = self_similar_profile(x, t)
        closed = 1.0 - np.exp(x / (1.0 - t))
        worst = max(worst, float(np.max(np.abs(u - closed) / np.maximum(1.0, np.abs(closed)))))
        rows.extend((t, xi, ui) for xi, ui in zip(x, u))
    # every curve is the t=0 curve after rescaling x by (1 - t)
    reference = self_similar_profile(x, 0.0)
    collapse = max(
        float(np.max(np.abs(self_similar_profile(x * (1 - t), t) - reference)
                     / np.maximum(1.0, np.abs(reference))))
        for t in times
    )
    measured = {"closed_form_rel_error": worst, "collapse_rel_error": collapse}
    threshold = {"limit": 1e-12}
    checks = [("closed_form_rel_error", "<=", "limit"), ("collapse_rel_error", "<=", "limit")]
    return measured, threshold, checks, {"curves": (("t", "x", "u"), rows)}
