"""Command-line interface: ``pyrofront <command> [options]``.

Commands: simulate, wave, stability, verify, idealized.  Every option can
also come from a ``key = value`` file given with ``--config``; flags on the
command line win.  ``--dump-config`` prints the resolved configuration in
the same format and exits.

Exit codes: 0 success, 1 scenario failure, 2 usage error, 3 I/O error.
"""

import argparse
from dataclasses import dataclass
import math
import os
from pathlib import Path
import sys

import numpy as np

from .exceptions import ConfigurationError
from .io import emit_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SQRT3 = math.sqrt(3.0)

KERNELS = ("step", "gaussian", "dirac", "zero", "tabulated")


class UsageError(Exception):
    pass


def _omega(text):
    if isinstance(text, str) and text.strip().lower() == "sqrt3":
        return SQRT3
    return float(text)


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text

    parse.options = options
    return parse


# key -> (parser, default); None default means "required"
_KERNEL_KEYS = {
    "kernel": (_choice(*KERNELS), "step"),
    "lambda": (float, 10.0),
    "radius": (float, 0.05),
    "width": (float, 0.05),
    "kernel_file": (str, ""),
}

_WAVE_KEYS = {
    "omega": (_omega, None),
    "kappa": (float, 1.0),
    "c": (float, 1.0),
    **_KERNEL_KEYS,
    "xmax": (float, 1.0),
    "points": (_int, 20001),
    "tol": (float, 1e-10),
    "max_iter": (_int, 100),
    "route": (_choice("short_range", "mild"), "short_range"),
    "stopping": (_choice("weighted", "relative_sup"), "weighted"),
}

SCHEMAS = {
    "simulate": {
        "preset": (_choice("none", "invasion", "extinction", "boundary_ignition"), "none"),
        "mode": (_choice("interval", "radial"), "interval"),
        "dimension": (_int, 1),
        "c": (float, 1.0),
        "theta": (float, 1.0),
        **_KERNEL_KEYS,
        "xmin": (float, 0.0),
        "xmax": (float, 1.0),
        "points": (_int, 101),
        "boundary": (float, 0.0),
        "initial": (_choice("parabola", "sine", "constant", "file"), "parabola"),
        "amplitude": (float, 1.0),
        "offset": (float, 0.0),
        "initial_file": (str, ""),
        "dt": (float, 0.0),
        "t_end": (float, 1.0),
        "snapshot_every": (_int, 100),
        "frozen": (_bool, False),
    },
    "wave": dict(_WAVE_KEYS, idealized=(_bool, True)),
    "stability": dict(
        _WAVE_KEYS, eps=(float, 0.01), samples=(_int, 100), sigma=(float, 0.5), seed=(_int, 0)
    ),
    "idealized": {
        "omega": (_omega, None),
        "kappa": (float, 1.0),
        "xmin": (float, -1.0),
        "xmax": (float, 1.0),
        "points": (_int, 101),
    },
    "verify": {
        "all": (_bool, False),
        "scenario": (str, ""),
        "tag": (str, ""),
        "set": (str, ""),
    },
}

DEFAULT_OUT = {
    "simulate": "trajectory.csv",
    "wave": "wave.csv",
    "stability": "stability.csv",
    "idealized": "idealized.csv",
    "verify": "verify",
}

PRESETS = {
    "invasion": dict(mode="radial", dimension=1, c=0.005, theta=1.0, kernel="step",
                     **{"lambda": 1.0}, radius=0.5, points=101, boundary=0.0,
                     initial="parabola", amplitude=2.0, offset=0.0, t_end=5.0),
    "extinction": dict(mode="radial", dimension=1, c=0.6875, theta=1.0, kernel="step",
                       **{"lambda": 1.0}, radius=0.5, points=101, boundary=0.0,
                       initial="parabola", amplitude=2.0, offset=0.0, t_end=5.0),
    "boundary_ignition": dict(mode="radial", dimension=1, c=1.0, theta=1.0, kernel="step",
                              **{"lambda": 1.0}, radius=0.5, points=101, boundary=2.0,
                              initial="parabola", amplitude=-1.5, offset=2.0, t_end=0.25),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    parameters: dict
    output_path: str


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config):
    lines = [f"{k} = {_format(v)}" for k, v in config.parameters.items()]
    lines.append(f"out = {config.output_path}")
    return "\n".join(lines) + "\n"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pyrofront",
        description="Nonlocal bushfire equation: evolution, traveling waves, stability, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--dump-config", action="store_true",
                       help="print the resolved configuration and exit")
        p.add_argument("--out", help="output file (directory for verify)")
        for key, (kind, _) in schema.items():
            flag = "--" + key.replace("_", "-")
            if kind is _bool:
                p.add_argument(flag, dest=key, nargs="?", const="true", default=None)
            elif key in ("scenario", "set"):
                p.add_argument(flag, dest=key, action="append", default=None)
            else:
                p.add_argument(flag, dest=key, default=None)
    return parser


def parse_args(argv):
    """Turn command-line arguments into a :class:`RunConfig`.

    Raises :class:`UsageError` for unknown config keys, missing required
    keys or values of the wrong type.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    schema = SCHEMAS[command]
    raw = read_config_file(ns.config) if ns.config else {}
    out = raw.pop("out", None)
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise UsageError(f"unknown configuration key(s) for {command}: {', '.join(unknown)}")
    for key in schema:
        value = getattr(ns, key)
        if value is not None:
            raw[key] = ",".join(value) if isinstance(value, list) else value
    if ns.out is not None:
        out = ns.out
    if command == "simulate":
        preset = raw.get("preset", "none")
        for key, value in PRESETS.get(preset, {}).items():
            raw.setdefault(key, value)
    params = {}
    for key, (kind, default) in schema.items():
        if key in raw:
            try:
                params[key] = kind(raw[key])
            except (TypeError, ValueError) as exc:
                raise UsageError(f"invalid value for '{key}': {exc}") from None
        elif default is None:
            raise UsageError(f"missing required key '{key}' for {command}")
        else:
            params[key] = default
    if out is None:
        base = os.environ.get("PYROFRONT_OUT_DIR", ".")
        out = str(Path(base) / DEFAULT_OUT[command])
    return RunConfig(command, params, str(out)), ns.dump_config


# command implementations ---------------------------------------------------------

def _kernel(p):
    from .kernels import (load_tabulated, make_dirac_idealized, make_gaussian, make_step,
                          zero_kernel)

    kind = p["kernel"]
    if kind == "step":
        return make_step(p["lambda"], p["radius"])
    if kind == "gaussian":
        return make_gaussian(p["lambda"], p["width"], p["radius"])
    if kind == "dirac":
        return make_dirac_idealized()
    if kind == "zero":
        return zero_kernel(p["radius"])
    if not p["kernel_file"]:
        raise UsageError("kernel = tabulated needs 'kernel_file'")
    return load_tabulated(p["kernel_file"])


def _wave_params(p):
    from .waves import WaveParams

    return WaveParams(
        omega=p["omega"], kappa=p["kappa"], kernel=_kernel(p), x_max=p["xmax"],
        n_points=p["points"], c=p["c"], tol=p["tol"], max_iter=p["max_iter"],
        route=p["route"], stopping=p["stopping"],
    )


def _initial(p, grid):
    x = grid.nodes
    kind = p["initial"]
    if kind == "file":
        if not p["initial_file"]:
            raise UsageError("initial = file needs 'initial_file'")
        data = np.loadtxt(p["initial_file"], ndmin=2)
        if data.shape[1] == 2:
            return np.interp(x, data[:, 0], data[:, 1])
        if data.size != grid.n_points:
            raise UsageError(f"initial_file has {data.size} values, grid has {grid.n_points}")
        return data.ravel()
    if kind == "constant":
        shape = np.ones_like(x)
    elif kind == "sine":
        shape = np.sin(math.pi * (x - grid.x_min) / (grid.x_max - grid.x_min))
    elif p["mode"] == "radial":
        shape = 1.0 - x ** 2
    else:
        shape = 4.0 * (x - grid.x_min) * (grid.x_max - x) / (grid.x_max - grid.x_min) ** 2
    return p["offset"] + p["amplitude"] * shape


def _cmd_simulate(cfg):
    from .numerics import Grid1D
    from .pde import ProblemSpec, simulate, simulate_frozen, trajectory_rows

    p = cfg.parameters
    grid = Grid1D(0.0, 1.0, p["points"]) if p["mode"] == "radial" else Grid1D(
        p["xmin"], p["xmax"], p["points"])
    dims = p["dimension"] if p["mode"] == "radial" else 1
    dt = p["dt"] or 0.9 * grid.h ** 2 / (2 * p["c"] * dims)
    spec = ProblemSpec(
        mode=p["mode"], c=p["c"], theta=p["theta"], kernel=_kernel(p), grid=grid,
        initial=_initial(p, grid), dt=dt, t_end=p["t_end"], boundary=p["boundary"],
        dimension=p["dimension"], snapshot_every=p["snapshot_every"],
    )
    traj = simulate_frozen(spec) if p["frozen"] else simulate(spec)
    emit_csv(("t", "x", "u"), trajectory_rows(traj), cfg.output_path)
    final = traj.values[-1]
    print(f"simulated to t={traj.times[-1]:.6g} in {spec.n_steps} steps "
          f"(dt={dt:.3g}); final min/max u = {final.min():.6g}/{final.max():.6g}")
    if traj.blew_up:
        print(f"blow-up at t={traj.blowup_time:.6g}")
    print(f"wrote {cfg.output_path}")
    return EXIT_OK


def _cmd_wave(cfg):
    from .waves import idealized_wave, solve

    p = cfg.parameters
    prof = solve(_wave_params(p))
    rep = prof.iteration
    x = prof.grid.nodes
    cols = [x, prof.v.values, prof.w.values]
    header = ["x", "v", "w"]
    if p["idealized"]:
        header.append("idealized")
        cols.append(idealized_wave(p["omega"] / p["c"], x, p["kappa"]))
    emit_csv(header, zip(*cols), cfg.output_path)
    status = "converged" if rep.converged else "NOT converged"
    print(f"{status} after {rep.iterations_used} iterations; "
          f"last weighted delta {rep.weighted_deltas[-1]:.3g}, residual {rep.residual_sup:.3g}; "
          f"contraction factor {rep.contraction_factor:.3g}")
    print(f"wrote {cfg.output_path}")
    return EXIT_OK


def _cmd_stability(cfg):
    from .stability import instability_witness, small_support_check, stability_form
    from .stability import small_support_bound
    from .exceptions import WitnessUnavailable
    from .verify import random_small_perturbation
    from .waves import solve

    p = cfg.parameters
    params = _wave_params(p)
    prof = solve(params)
    kernel = params.kernel
    rows = []
    try:
        pert = instability_witness(prof, kernel, p["c"], p["eps"])
        q = stability_form(prof, pert, p["c"], kernel)
        rows.append(("witness", pert.sigma, math.nan, q, q > 0))
    except WitnessUnavailable as exc:
        print(f"witness unavailable: {exc}")
    rng = np.random.default_rng(p["seed"])
    for i in range(p["samples"]):
        start = rng.uniform(-1.5, max(-1.5, prof.grid.x_max - 0.2 - p["sigma"]))
        pert = random_small_perturbation(rng, start, p["sigma"], kernel.radius / 8)
        rep = small_support_check(prof, pert, p["c"], kernel, name=f"phi_{i:03d}")
        rows.append((rep.name, rep.sigma, rep.bound, rep.Q, rep.passed))
    emit_csv(("name", "sigma", "bound", "Q", "pass"), rows, cfg.output_path)
    n_pass = sum(1 for r in rows if r[4])
    print(f"{n_pass}/{len(rows)} rows pass; small-support bound "
          f"{small_support_bound(p['c'], kernel.intensity):.6g}")
    print(f"wrote {cfg.output_path}")
    return EXIT_OK if n_pass == len(rows) else EXIT_FAIL


def _cmd_idealized(cfg):
    from .waves import idealized_wave

    p = cfg.parameters
    if p["points"] < 2 or not p["xmin"] < p["xmax"]:
        raise UsageError("idealized needs points >= 2 and xmin < xmax")
    x = np.linspace(p["xmin"], p["xmax"], p["points"])
    v = idealized_wave(p["omega"], x, p["kappa"])
    w = idealized_wave(p["omega"], x, p["kappa"], derivative=True)
    emit_csv(("x", "v", "w"), zip(x, v, w), cfg.output_path)
    print(f"wrote {cfg.output_path}")
    return EXIT_OK


def _parse_sets(text):
    overrides = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        target, eq, value = item.partition("=")
        sid, dot, key = target.partition(".")
        if not (eq and dot and sid and key):
            raise UsageError(f"--set expects scenario.key=value, got {item!r}")
        overrides.setdefault(sid, {})[key] = value
    return overrides


def _cmd_verify(cfg):
    from .verify import run_scenario, scenario_ids, write_reports

    p = cfg.parameters
    overrides = _parse_sets(p["set"])
    if p["scenario"]:
        ids = [s.strip() for s in p["scenario"].split(",") if s.strip()]
    elif p["all"] or p["tag"]:
        ids = scenario_ids(p["tag"] or None)
        if not ids:
            raise UsageError(f"no scenarios carry tag {p['tag']!r}")
    else:
        raise UsageError("verify needs --all, --tag or --scenario")
    for sid in list(ids) + list(overrides):
        if sid not in scenario_ids():
            raise UsageError(f"unknown scenario {sid!r}")
    try:
        reports = [run_scenario(sid, overrides.get(sid)) for sid in ids]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for r in reports:
        print(r.summary())
    write_reports(reports, cfg.output_path)
    n_pass = sum(r.passed for r in reports)
    print(f"{n_pass}/{len(reports)} scenarios pass; ledger in {cfg.output_path}")
    return EXIT_OK if n_pass == len(reports) else EXIT_FAIL


COMMANDS = {
    "simulate": _cmd_simulate,
    "wave": _cmd_wave,
    "stability": _cmd_stability,
    "idealized": _cmd_idealized,
    "verify": _cmd_verify,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, dump = parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(f"pyrofront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if dump:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"pyrofront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pyrofront: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigurationError, ValueError) as exc:
        print(f"pyrofront: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
