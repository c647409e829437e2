"""Command line and config-driven batch runs.

A run is described by one TOML file::

    command = "verify"          # solve, shoot, transform, dynamics, path,
                                # spectrum, verify or sweep
    seed = 0

    [profile]                   # or: file = "notch.toml"
    kind = "plateau"
    s0 = 0.5
    a = 1.0
    ramp = 0.25

    [grid]                      # n or h
    L = 16.0
    h = 0.01

    [output]
    dir = "runs/plateau"

    [verify]
    checks = ["monotone", "defect", "decay", "spectrum"]

Every run writes ``report.json`` (with the resolved config embedded), CSV
data files and a ``plot.py`` script that renders them with matplotlib.
The exit status is 0 iff every requested check passes, 1 if some check
fails and 2 if the configuration is rejected.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._toml import loads as toml_loads
from .dynamics import LLGOptions, discrete_steady_state, perturbed_wall, relax
from .energy import centered_derivative, discretize, energy, energy_value, pointwise_defect
from .field import FieldError, load_angle_csv, save_magnetization_csv
from .grid import Grid, GridError, make_grid
from .paths import composite_path, cos_convex_path
from .profile import ProfileError, change_of_variable, classify, load_profile, profile_from_dict
from .solver import SolveOptions, decay_check, default_init, minimize, multi_start_uniqueness, shoot
from .spectral import spectral_audit
from .transforms import TRANSFORMS, apply_chain, first_zero

__all__ = ["ConfigError", "resolve_config", "load_config", "run", "main"]

COMMANDS = ("solve", "shoot", "transform", "dynamics", "path", "spectrum", "verify", "sweep")
CHECKS = ("converged", "monotone", "odd", "defect", "decay", "energy", "spectrum", "uniqueness", "path")

DEFAULTS = {
    "command": "solve",
    "seed": 0,
    "grid": {"L": 16.0},
    "solver": {"method": "newton", "grad_tol": 1e-8, "max_iters": 5000, "transform_every": 10},
    "output": {"dir": "run", "field": "wall.csv", "report": "report.json", "plot": "plot.py"},
    "verify": {"checks": [], "defect_tol": 1e-5, "decay_tol": 1e-8},
    "spectral": {"probes": 50},
    "uniqueness": {"starts": 20, "tol": 1e-4},
    "dynamics": {
        "init": None,
        "amplitude": 0.1,
        "width": 2.0,
        "perturb_seed": None,
        "alpha": 0.5,
        "dt": None,
        "t_end": 100.0,
        "record_every": 200,
        "tol": 0.0,
        "distance_tol": 1e-4,
    },
    "path": {"from": None, "to": None, "samples": 101},
    "transform": {"chain": ["threshold", "reflect", "envelope"], "init": None},
    "sweep": {"command": "solve", "parameter": None, "values": [], "workers": 2},
}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    leaf = key.split(".")[-1]
    for no, line in enumerate(text.splitlines(), 1):
        if line.split("=")[0].strip() == leaf:
            return f" (line {no})"
    return ""


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _fail(key: str, msg: str, text: str | None) -> ConfigError:
    return ConfigError(f"{key}{_line_of(text, key)}: {msg}")


def resolve_config(raw: dict, base_dir: str | Path = ".", text: str | None = None) -> dict:
    """Fill defaults, validate every field and resolve relative paths.

    Raises
    ------
    ConfigError
        With the dotted field name and, when the source text is known, its
        line number.
    """
    known = set(DEFAULTS) | {"profile"}
    for k in raw:
        if k not in known:
            raise _fail(k, "unknown top-level field", text)
    cfg = _merge(DEFAULTS, raw)
    base = Path(base_dir)
    if cfg["command"] not in COMMANDS:
        raise _fail("command", f"expected one of {COMMANDS}", text)
    if not isinstance(cfg["seed"], int):
        raise _fail("seed", "must be an integer", text)

    prof = cfg.get("profile")
    if not isinstance(prof, dict):
        raise _fail("profile", "missing profile section", text)
    try:
        if "file" in prof:
            path = base / prof["file"]
            if not path.exists():
                raise _fail("profile.file", f"{path} does not exist", text)
            profile = load_profile(path)
        else:
            profile = profile_from_dict(prof)
    except ProfileError as exc:
        bad = next((f"profile.{k}" for k in ("s0", "a", "ramp", "nodes", "kind") if k in str(exc)), "profile")
        raise _fail(bad, str(exc), text) from None
    cfg["profile"] = profile.to_dict()

    g = cfg["grid"]
    try:
        L = float(g["L"])
        if "n" in g:
            grid = Grid(L, int(g["n"]))
        elif "h" in g:
            grid = make_grid(L, float(g["h"]))
        else:
            grid = make_grid(L, 0.01)
    except (GridError, ValueError, TypeError) as exc:
        raise _fail("grid", str(exc), text) from None
    if grid.L < profile.a:
        raise _fail("grid.L", f"must cover the notch support a={profile.a}", text)
    cfg["grid"] = {"L": grid.L, "n": grid.n}

    try:
        SolveOptions(**_solver_kwargs(cfg))
    except (TypeError, ValueError) as exc:
        raise _fail("solver", str(exc), text) from None

    checks = cfg["verify"]["checks"]
    for c in checks:
        if c not in CHECKS:
            raise _fail("verify.checks", f"unknown check {c!r}; expected some of {CHECKS}", text)

    for name in cfg["transform"]["chain"]:
        if name not in TRANSFORMS:
            raise _fail("transform.chain", f"unknown transform {name!r}", text)

    for sec, key in (("dynamics", "init"), ("path", "from"), ("path", "to"), ("transform", "init")):
        val = cfg[sec][key]
        if val is not None:
            path = base / val
            if not path.exists():
                raise _fail(f"{sec}.{key}", f"{path} does not exist", text)
            cfg[sec][key] = str(path)
    try:
        _llg_options(cfg)
    except (TypeError, ValueError) as exc:
        raise _fail("dynamics", str(exc), text) from None
    if int(cfg["path"]["samples"]) < 2:
        raise _fail("path.samples", "need at least 2 samples", text)

    if cfg["command"] == "sweep":
        sw = cfg["sweep"]
        if sw["command"] not in COMMANDS or sw["command"] == "sweep":
            raise _fail("sweep.command", "must name a non-sweep command", text)
        if not sw["parameter"] or "." not in sw["parameter"]:
            raise _fail("sweep.parameter", "expected a dotted field such as 'profile.s0'", text)
        if not sw["values"]:
            raise _fail("sweep.values", "empty sweep", text)
        for i, v in enumerate(sw["values"]):
            child = _sweep_child(cfg, i, v)
            resolve_config(child, base, None)
    cfg["output"]["dir"] = str(base / cfg["output"]["dir"])
    return cfg


def load_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    text = path.read_text()
    try:
        raw = toml_loads(text)
    except Exception as exc:  # tomllib reports line and column in its message
        raise ConfigError(f"{path}: {exc}") from None
    return resolve_config(raw, path.parent, text)


# ----------------------------------------------------------------------------
# serialization


def _fixed(obj):
    """Recursively convert to JSON types; floats keep 13 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _fixed(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_fixed(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12e}")
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_fixed(report), indent=2, sort_keys=True) + "\n"


def _write_csv(path: Path, header: list[str], columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{v:.17g}" for v in row])


PLOT_TEMPLATE = '''"""Render the data files of this run (requires matplotlib)."""
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).parent


def read(name):
    with open(HERE / name) as fh:
        rows = list(csv.reader(fh))
    cols = list(zip(*rows[1:]))
    return {{h: [float(v) for v in c] for h, c in zip(rows[0], cols)}}


panels = {panels!r}
fig, axes = plt.subplots(len(panels), 1, figsize=(7, 3 * len(panels)), squeeze=False)
for ax, (fname, xcol, ycols, title) in zip(axes[:, 0], panels):
    data = read(fname)
    for col in ycols:
        ax.plot(data[xcol], data[col], label=col)
    ax.set_xlabel(xcol)
    ax.set_title(title)
    ax.legend()
fig.tight_layout()
fig.savefig(HERE / "plot.png", dpi=120)
'''


def _emit_plot(out: Path, name: str, panels: list) -> None:
    if panels:
        (out / name).write_text(PLOT_TEMPLATE.format(panels=panels))


# ----------------------------------------------------------------------------
# commands


def _solver_kwargs(cfg: dict) -> dict:
    kw = dict(cfg["solver"])
    kw["seed"] = cfg["seed"]
    return kw


def _llg_options(cfg: dict) -> LLGOptions:
    dy = cfg["dynamics"]
    return LLGOptions(
        alpha_gilbert=float(dy["alpha"]),
        dt=None if dy["dt"] is None else float(dy["dt"]),
        t_end=float(dy["t_end"]),
        record_every=int(dy["record_every"]),
        tol=float(dy["tol"]),
    )


class _Context:
    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.profile = profile_from_dict(cfg["profile"])
        self.grid = Grid(cfg["grid"]["L"], cfg["grid"]["n"])
        self.opts = SolveOptions(**_solver_kwargs(cfg))
        self.out = Path(cfg["output"]["dir"])
        self.report: dict = {"config": cfg, "seed": cfg["seed"], "command": cfg["command"]}
        self.checks: dict = {}
        self.panels: list = []
        self._wall = None

    def path(self, name: str) -> Path:
        return self.out / name

    def wall(self):
        if self._wall is None:
            self._wall = minimize(self.profile, self.grid, opts=self.opts)
        return self._wall

    def check(self, name: str, passed: bool, **detail) -> None:
        self.checks[name] = {"passed": bool(passed), **detail}

    def write_wall(self, theta, name: str | None = None) -> None:
        x = self.grid.x
        name = name or self.cfg["output"]["field"]
        dt = centered_derivative(theta, self.grid.h)
        defect = pointwise_defect(theta, self.profile, self.grid)
        decay = decay_check(theta, self.profile, self.grid)
        envelope = decay + np.abs(np.abs(theta) - 0.5 * math.pi)
        _write_csv(self.path(name), ["x", "theta", "dtheta", "defect", "decay_envelope"], [x, theta, dt, defect, envelope])
        self.panels.append((name, "x", ["theta"], "wall"))
        self.panels.append((name, "x", ["defect"], "first-integral defect"))
        self.panels.append((name, "x", ["decay_envelope"], "decay envelope"))

    def write_profile(self) -> None:
        cov = change_of_variable(self.profile, self.grid)
        x = self.grid.x
        _write_csv(self.path("profile.csv"), ["x", "s", "y"], [x, self.profile(x), cov.y])


def _do_solve(ctx: _Context) -> None:
    res = ctx.wall()
    ctx.report["solve"] = res.summary()
    ctx.report["energy"] = res.report.to_dict()
    ctx.write_wall(res.theta)
    ctx.write_profile()


def _do_shoot(ctx: _Context) -> None:
    shot = shoot(ctx.profile, ctx.grid)
    rep = energy(shot.theta, ctx.profile, ctx.grid)
    ctx.report["shoot"] = {
        "x0": shot.x0,
        "slope_right": shot.slope_right,
        "slope_left": shot.slope_left,
        "slope_mismatch": shot.slope_mismatch,
    }
    ctx.report["energy"] = rep.to_dict()
    ctx.write_wall(shot.theta)


def _do_transform(ctx: _Context) -> None:
    tc = ctx.cfg["transform"]
    if tc["init"]:
        x, t = load_angle_csv(tc["init"])
        if x.size != ctx.grid.n or not np.allclose(x, ctx.grid.x):
            raise ConfigError("transform.init: field does not live on the configured grid")
    else:
        rng = np.random.default_rng(ctx.cfg["seed"])
        t = default_init(ctx.profile, ctx.grid) + 0.3 * rng.normal(size=ctx.grid.n) * np.exp(-0.1 * ctx.grid.x**2)
    out, reports = apply_chain(tc["chain"], t, ctx.profile, ctx.grid)
    ctx.report["transforms"] = [r.to_dict() for r in reports]
    x = ctx.grid.x
    _write_csv(ctx.path(ctx.cfg["output"]["field"]), ["x", "theta_in", "theta_out"], [x, t, out])
    ctx.panels.append((ctx.cfg["output"]["field"], "x", ["theta_in", "theta_out"], "transform chain"))
    worst = max((r.energy_after - r.energy_before for r in reports), default=0.0)
    ctx.check("transform_energy", worst <= 1e-12, max_increase=worst)


def _do_dynamics(ctx: _Context) -> None:
    dy = ctx.cfg["dynamics"]
    ref = discrete_steady_state(ctx.profile, ctx.grid, ctx.wall().theta)
    if dy["init"]:
        x, start = load_angle_csv(dy["init"])
        if x.size != ctx.grid.n:
            raise ConfigError("dynamics.init: field does not live on the configured grid")
        start = np.array(start)
        start[0], start[-1] = -0.5 * math.pi, 0.5 * math.pi
    else:
        start = ref
    pseed = ctx.cfg["seed"] if dy["perturb_seed"] is None else int(dy["perturb_seed"])
    m0 = perturbed_wall(start, ctx.grid, float(dy["amplitude"]), float(dy["width"]), pseed)
    traj = relax(m0, _llg_options(ctx.cfg), ctx.profile, ctx.grid, theta_ref=ref)
    inc = float(np.max(np.diff(traj.energies), initial=0.0))
    ctx.report["dynamics"] = {
        "final_time": traj.times[-1],
        "final_energy": traj.energies[-1],
        "final_distance": traj.distances[-1],
        "final_torque": traj.torques[-1],
        "max_energy_increment": inc,
        "halvings": traj.halvings,
        "converged": traj.converged,
    }
    _write_csv(
        ctx.path("trajectory.csv"),
        ["t", "energy", "distance_mod_rotation", "torque"],
        [traj.times, traj.energies, traj.distances, traj.torques],
    )
    save_magnetization_csv(ctx.path("final_m.csv"), ctx.grid.x, traj.final)
    ctx.panels.append(("trajectory.csv", "t", ["energy"], "energy"))
    ctx.panels.append(("trajectory.csv", "t", ["distance_mod_rotation"], "distance to the wall"))
    ctx.check("energy_monotone", inc <= 1e-12, max_increment=inc)
    tol = float(dy["distance_tol"])
    ctx.check("relaxed", traj.distances[-1] <= tol, distance=traj.distances[-1], threshold=tol)


def _load_wall(ctx: _Context, path):
    if path is None:
        return ctx.wall().theta
    x, t = load_angle_csv(path)
    if x.size != ctx.grid.n or not np.allclose(x, ctx.grid.x):
        raise ConfigError(f"{path}: field does not live on the configured grid")
    return t


def _convexity_violation(theta0, ctx: _Context, samples: int) -> float:
    x = ctx.grid.x
    d = discretize(ctx.profile, ctx.grid)
    x0 = first_zero(theta0, x)
    E0 = energy_value(theta0, d)
    E1 = energy_value(cos_convex_path(theta0, x0, 1.0, x), d)
    worst = -math.inf
    for lam in np.linspace(0.0, 1.0, samples):
        e = energy_value(cos_convex_path(theta0, x0, float(lam), x), d)
        worst = max(worst, e - ((1.0 - lam) * E0 + lam * E1))
    return worst


def _do_path(ctx: _Context) -> None:
    pc = ctx.cfg["path"]
    a = _load_wall(ctx, pc["from"])
    b = _load_wall(ctx, pc["to"])
    ps = composite_path(a, b, ctx.profile, ctx.grid, samples=int(pc["samples"]))
    viol = _convexity_violation(a, ctx, int(pc["samples"]))
    ctx.report["path"] = {k: v for k, v in ps.to_dict().items() if k not in ("lambdas", "energies")}
    ctx.report["path"]["convexity_violation"] = viol
    _write_csv(ctx.path("path.csv"), ["lambda", "energy"], [ps.lambdas, ps.energies])
    ctx.panels.append(("path.csv", "lambda", ["energy"], "path energy"))


def _do_spectrum(ctx: _Context) -> None:
    res = ctx.wall()
    rep = spectral_audit(res.theta, ctx.profile, ctx.grid, n_probes=int(ctx.cfg["spectral"]["probes"]), seed=ctx.cfg["seed"])
    ctx.report["spectral"] = rep.to_dict()


def _run_checks(ctx: _Context, checks) -> None:
    p, g = ctx.profile, ctx.grid
    res = ctx.wall()
    vc = ctx.cfg["verify"]
    notchless = p.is_notchless
    for name in checks:
        if name == "converged":
            ctx.check(name, res.converged, grad_norm=res.report.grad_norm, threshold=ctx.opts.grad_tol)
        elif name == "monotone":
            ctx.check(name, res.monotone)
        elif name == "odd":
            if classify(p).symmetric:
                ctx.check(name, res.odd_defect <= 1e-6, odd_defect=res.odd_defect, threshold=1e-6)
            else:
                ctx.check(name, True, skipped="profile is not symmetric")
        elif name == "defect":
            tol = float(vc["defect_tol"])
            dfc = pointwise_defect(res.theta, p, g)
            outside = np.abs(g.x) > p.a
            lo = float(dfc.min())
            out = float(np.max(np.abs(dfc[outside]))) if np.any(outside) else 0.0
            ctx.check(name, lo >= -tol and out <= tol, min_defect=lo, max_abs_outside=out, threshold=tol)
        elif name == "decay":
            tol = float(vc["decay_tol"])
            margin = float(decay_check(res.theta, p, g).min())
            ctx.check(name, margin >= -tol, min_margin=margin, threshold=-tol)
        elif name == "energy":
            E = res.report.total
            if notchless:
                ctx.check(name, abs(E - 2.0) <= 1e-3, total=E, target=2.0, threshold=1e-3)
            else:
                ctx.check(name, E < 2.0, total=E, bound=2.0)
        elif name == "spectrum":
            if "spectral" not in ctx.report:
                _do_spectrum(ctx)
            sp = ctx.report["spectral"]
            ok = sp["kernel_residual"] <= 1e-6 and sp["factorization_gap"] <= 1e-6
            ok = ok and (sp["alpha"] <= 1e-4 if notchless else sp["alpha"] > 0.0)
            ctx.check(name, ok, alpha=sp["alpha"], kernel_residual=sp["kernel_residual"], factorization_gap=sp["factorization_gap"])
        elif name == "uniqueness":
            uc = ctx.cfg["uniqueness"]
            ur = multi_start_uniqueness(p, g, int(uc["starts"]), ctx.cfg["seed"], ctx.opts, float(uc["tol"]))
            ctx.report["uniqueness"] = ur.to_dict()
            ctx.check(name, ur.translation_family if notchless else ur.unique, verdict=_verdict(ur))
        elif name == "path":
            if "path" not in ctx.report:
                _do_path(ctx)
            pr = ctx.report["path"]
            ok = pr["convexity_violation"] <= 1e-10 and (notchless or pr["margin"] > 0.0)
            ctx.check(name, ok, margin=pr["margin"], convexity_violation=pr["convexity_violation"])


def _verdict(ur) -> str:
    if ur.translation_family:
        return "translation family"
    if ur.multiplicity:
        return "multiple limits"
    return "unique" if ur.unique else "not converged"


DEFAULT_CHECKS = {
    "solve": ["converged", "monotone"],
    "verify": ["converged", "monotone", "odd", "defect", "decay", "energy"],
    "spectrum": ["spectrum"],
    "path": ["path"],
}

ACTIONS = {
    "solve": _do_solve,
    "shoot": _do_shoot,
    "transform": _do_transform,
    "dynamics": _do_dynamics,
    "path": _do_path,
    "spectrum": _do_spectrum,
    "verify": _do_solve,
}


def _sweep_child(cfg: dict, index: int, value) -> dict:
    child = copy.deepcopy({k: v for k, v in cfg.items() if k != "sweep"})
    child["command"] = cfg["sweep"]["command"]
    section, key = cfg["sweep"]["parameter"].split(".", 1)
    sec = child.setdefault(section, {})
    if section == "grid":
        # n and h are alternatives; the swept one wins
        sec.pop("h" if key == "n" else "n", None)
    sec[key] = value
    child["output"] = dict(child.get("output", {}))
    child["output"]["dir"] = str(Path(cfg["output"]["dir"]) / f"run_{index:03d}")
    return child


def _run_sweep(cfg: dict) -> int:
    sw = cfg["sweep"]
    children = [resolve_config(_sweep_child(cfg, i, v)) for i, v in enumerate(sw["values"])]
    with ThreadPoolExecutor(max_workers=max(1, int(sw["workers"]))) as pool:
        results = list(pool.map(_run_single, children))
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    summary = {
        "config": cfg,
        "seed": cfg["seed"],
        "command": "sweep",
        "runs": [{"value": v, "dir": c["output"]["dir"], "status": s, **r} for v, c, (s, r) in zip(sw["values"], children, results)],
    }
    (out / cfg["output"]["report"]).write_text(dumps_report(summary))
    return 0 if all(s == 0 for s, _ in results) else 1


def _run_single(cfg: dict) -> tuple[int, dict]:
    ctx = _Context(cfg)
    ctx.out.mkdir(parents=True, exist_ok=True)
    cmd = cfg["command"]
    ACTIONS[cmd](ctx)
    checks = cfg["verify"]["checks"] or DEFAULT_CHECKS.get(cmd, [])
    _run_checks(ctx, checks)
    ctx.report["checks"] = ctx.checks
    ok = all(c["passed"] for c in ctx.checks.values())
    ctx.report["passed"] = ok
    (ctx.path(cfg["output"]["report"])).write_text(dumps_report(ctx.report))
    _emit_plot(ctx.out, cfg["output"]["plot"], ctx.panels)
    brief = {"passed": ok, "failed_checks": sorted(k for k, c in ctx.checks.items() if not c["passed"])}
    return (0 if ok else 1), brief


def run(config: dict) -> int:
    """Execute a resolved config (see :func:`resolve_config`); returns the exit status."""
    if config["command"] == "sweep":
        return _run_sweep(config)
    return _run_single(config)[0]


# ----------------------------------------------------------------------------
# argument parsing


def _pair(text: str, names: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != len(names.split(",")):
        raise argparse.ArgumentTypeError(f"expected {names}")
    return [float(p) for p in parts]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="notchwall", description="Domain walls in notched nanowires.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="TOML run configuration")
        sp.add_argument("--profile", help="profile file (.toml or .json)")
        sp.add_argument("--kind", choices=("plateau", "cosine_dip", "piecewise_linear"))
        sp.add_argument("--s0", type=float)
        sp.add_argument("--a", type=float)
        sp.add_argument("--ramp", type=float)
        sp.add_argument("--grid", help="L,n")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--outdir", help="output directory")
        sp.add_argument("--out", help="field or data CSV name")
        sp.add_argument("--report", help="report JSON name")
        if name == "verify":
            for c in CHECKS:
                sp.add_argument(f"--{c}", action="store_true", help=f"run the {c} check")
        if name == "transform":
            sp.add_argument("--chain", help="comma-separated transform names")
            sp.add_argument("--init", help="input field CSV (x,theta)")
        if name == "dynamics":
            sp.add_argument("--init", help="starting wall CSV (x,theta)")
            sp.add_argument("--perturb", help="amplitude,width,seed")
            sp.add_argument("--alpha", type=float)
            sp.add_argument("--dt", type=float)
            sp.add_argument("--t-end", type=float)
        if name == "path":
            sp.add_argument("--from", dest="path_from")
            sp.add_argument("--to", dest="path_to")
            sp.add_argument("--samples", type=int)
    return ap


def _overrides(ns: argparse.Namespace) -> dict:
    raw: dict = {"command": ns.command}
    if ns.profile:
        raw["profile"] = {"file": str(Path(ns.profile).resolve())}
    elif ns.kind:
        raw["profile"] = {k: getattr(ns, k) for k in ("kind", "s0", "a", "ramp") if getattr(ns, k) is not None}
    if ns.grid:
        L, n = _pair(ns.grid, "L,n")
        raw["grid"] = {"L": L, "n": int(n)}
    if ns.seed is not None:
        raw["seed"] = ns.seed
    out = {}
    if ns.outdir:
        out["dir"] = str(Path(ns.outdir).resolve())
    if ns.out:
        out["field"] = ns.out
    if ns.report:
        out["report"] = ns.report
    if out:
        raw["output"] = out
    if ns.command == "verify":
        chosen = [c for c in CHECKS if getattr(ns, c)]
        if chosen:
            raw["verify"] = {"checks": chosen}
    if ns.command == "transform":
        tr = {}
        if ns.chain:
            tr["chain"] = ns.chain.split(",")
        if ns.init:
            tr["init"] = str(Path(ns.init).resolve())
        if tr:
            raw["transform"] = tr
    if ns.command == "dynamics":
        dy = {}
        if ns.init:
            dy["init"] = str(Path(ns.init).resolve())
        if ns.perturb:
            amp, width, seed = _pair(ns.perturb, "amplitude,width,seed")
            dy.update(amplitude=amp, width=width, perturb_seed=int(seed))
        for key, val in (("alpha", ns.alpha), ("dt", ns.dt), ("t_end", ns.t_end)):
            if val is not None:
                dy[key] = val
        if dy:
            raw["dynamics"] = dy
    if ns.command == "path":
        pa = {}
        if ns.path_from:
            pa["from"] = str(Path(ns.path_from).resolve())
        if ns.path_to:
            pa["to"] = str(Path(ns.path_to).resolve())
        if ns.samples:
            pa["samples"] = ns.samples
        if pa:
            raw["path"] = pa
    return raw


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        if ns.config:
            path = Path(ns.config)
            if not path.exists():
                raise ConfigError(f"{path}: no such config file")
            text = path.read_text()
            try:
                raw = toml_loads(text)
            except Exception as exc:
                raise ConfigError(f"{path}: {exc}") from None
            base = path.parent
        else:
            raw, text, base = {}, None, Path(".")
        over = _overrides(ns)
        if ns.command == "sweep" and raw.get("command") != "sweep" and not ns.config:
            raise ConfigError("sweep needs --config with a [sweep] section")
        cfg = resolve_config(_merge(raw, over), base, text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        status = run(cfg)
    except (ConfigError, FieldError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    report = Path(cfg["output"]["dir"]) / cfg["output"]["report"]
    data = json.loads(report.read_text())
    for name, c in data.get("checks", {}).items():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {name}: " + ", ".join(f"{k}={v}" for k, v in c.items() if k != "passed"))
    for r in data.get("runs", []):
        print(f"{'PASS' if r['status'] == 0 else 'FAIL'} {r['dir']} value={r['value']}")
    print(f"report: {report}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
