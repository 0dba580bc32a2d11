"""impulse-front: command-line runner.

    impulse-front <speed|critical-domain|ray|simulate|oracle|scenario|sweep> --config FILE [--jobs N] [--out DIR]

The config is one JSON document with the blocks ``model``, ``numerics``,
``task`` and ``output``; unknown keys are rejected. Exit codes: 0 ok,
2 configuration, 3 extinction regime, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from impulse_front import analytic, hybrid, oracle
from impulse_front.core import (
    BevertonHoltMap,
    GaussianKernel,
    LinearGrowth,
    LinearMap,
    LogisticGrowth,
    ModelParams,
    PointMass,
    QuadraticGrowth,
    RickerMap,
    SkellamMap,
    require_valid,
)
from impulse_front.exceptions import (
    BoundaryContamination,
    ExtinctionRegime,
    GridExhausted,
    ImpulseFrontError,
    NoPersistenceWindow,
    QuadratureSingularity,
    ValidationError,
)
from impulse_front.season import Box, SeasonConfig

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_NUMERICAL = 0, 2, 3, 4
TASKS = ("speed", "critical-domain", "ray", "simulate", "oracle", "scenario", "sweep")
SEED_ENV = "IMPULSE_FRONT_SEED"


class ConfigError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

GROWTH = {
    "linear": (LinearGrowth, ("fp0",)),
    "quadratic": (QuadraticGrowth, ("fp0", "gamma")),
    "logistic": (LogisticGrowth, ("r",)),
}
MAPS = {
    "linear": (LinearMap, ("alpha",)),
    "ricker": (RickerMap, ("beta",)),
    "beverton_holt": (BevertonHoltMap, ("lam",)),
    "skellam": (SkellamMap, ("alpha", "beta")),
}
MODEL_KEYS = {"A", "d", "n", "q", "growth", "map", "kernel"}
NUMERICS_DEFAULTS = {
    "h": 0.05,
    "generations": 30,
    "half_width": None,
    "substeps": 16,
    "smoothing_steps": 2,
    "dirichlet_h": 0.05,
    "burn_in": 0.4,
    "threshold": None,
    "persistence_generations": 200,
    "jitter": 0.0,
    "oracle": {},
}
ORACLE_KEYS = {"M", "tol", "radius"}
TASK_KEYS = {
    "speed": {"kind", "directions", "oracle", "simulate"},
    "critical-domain": {"kind", "shape", "simulate", "bracket", "boxes"},
    "ray": {"kind", "angles_deg", "step_deg"},
    "simulate": {"kind", "snapshots", "box"},
    "oracle": {"kind", "directions", "mgf_s"},
    "scenario": {"kind", "name", "params"},
    "sweep": {"kind", "axis", "values", "range", "direction"},
}
SCENARIO_KEYS = {
    "climate": ({"d", "log_gain", "gamma", "L1", "L2"}, {"c"}),
    "stream": ({"d", "sigma2", "r", "q", "mu", "lam"}, set()),
    "savannah": ({"r", "s", "a11", "a22"}, {"q", "step_deg"}),
}
OUTPUT_KEYS = {"csv", "plot"}


def _check_keys(block: dict, allowed: set, where: str, required: set = frozenset()):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(block) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    missing = set(required) - set(block)
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {', '.join(sorted(missing))}")


def _typed(spec: dict, table: dict, where: str):
    _check_keys(spec, {"kind"} | {k for _, keys in table.values() for k in keys}, where, {"kind"})
    kind = spec["kind"]
    if kind not in table:
        raise ConfigError(f"{where}.kind must be one of {sorted(table)}")
    cls, keys = table[kind]
    _check_keys(spec, {"kind", *keys}, where, set(keys))
    return cls(*(float(spec[k]) for k in keys))


def build_params(model: dict) -> ModelParams:
    """ModelParams from a model block; raises ConfigError on anything malformed."""
    _check_keys(model, MODEL_KEYS, "model", {"growth", "map"})
    try:
        if "A" in model:
            if "d" in model:
                raise ConfigError("give either model.A or model.d, not both")
            A = np.atleast_2d(np.asarray(model["A"], dtype=float))
        elif "d" in model:
            A = float(model["d"]) * np.eye(int(model.get("n", 1)))
        else:
            raise ConfigError("model needs A or d")
        n = A.shape[0]
        q = np.broadcast_to(np.asarray(model.get("q", 0.0), dtype=float), (n,)).copy()
        growth = _typed(model["growth"], GROWTH, "model.growth")
        g = _typed(model["map"], MAPS, "model.map")
        kernel = None
        k = model.get("kernel")
        if k is not None:
            _check_keys(k, {"kind", "mu", "B"}, "model.kernel", {"kind"})
            if k["kind"] == "point":
                _check_keys(k, {"kind"}, "model.kernel")
                kernel = PointMass()
            elif k["kind"] == "gaussian":
                _check_keys(k, {"kind", "mu", "B"}, "model.kernel", {"mu", "B"})
                kernel = GaussianKernel(np.atleast_1d(np.asarray(k["mu"], float)),
                                        np.atleast_2d(np.asarray(k["B"], float)))
            else:
                raise ConfigError("model.kernel.kind must be 'gaussian' or 'point'")
        params = ModelParams(A, q, growth, g, kernel)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"model: {exc}") from exc
    require_valid(params)
    return params


@dataclass
class RunConfig:
    model: dict | None
    numerics: dict
    task: dict
    output: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.task["kind"]

    def params(self) -> ModelParams:
        if self.model is None:
            raise ConfigError(f"task {self.kind!r} needs a model block")
        return build_params(self.model)

    def season(self) -> SeasonConfig:
        nm = self.numerics
        W = nm["half_width"]
        return SeasonConfig(substeps=int(nm["substeps"]), dirichlet_h=float(nm["dirichlet_h"]),
                            smoothing_steps=int(nm["smoothing_steps"]), half_width=None if W is None else float(W))

    def oracle_config(self) -> oracle.OracleConfig:
        kw = {k: v for k, v in self.numerics["oracle"].items()}
        if "M" in kw:
            kw["M"] = int(kw["M"])
        return oracle.OracleConfig(**kw)


def parse_config(doc: dict, command: str | None = None) -> RunConfig:
    _check_keys(doc, {"model", "numerics", "task", "output"}, "config", {"task"})
    task = doc["task"]
    if not isinstance(task, dict) or task.get("kind") not in TASKS:
        raise ConfigError(f"task.kind must be one of {', '.join(TASKS)}")
    if command is not None and task["kind"] != command:
        raise ConfigError(f"config task is {task['kind']!r} but the command is {command!r}")
    _check_keys(task, TASK_KEYS[task["kind"]], "task")
    numerics = copy.deepcopy(NUMERICS_DEFAULTS)
    given = doc.get("numerics", {})
    _check_keys(given, set(NUMERICS_DEFAULTS), "numerics")
    numerics.update(given)
    _check_keys(numerics["oracle"], ORACLE_KEYS, "numerics.oracle")
    if not 0 <= float(numerics["burn_in"]) < 1:
        raise ConfigError("numerics.burn_in must lie in [0, 1)")
    if int(numerics["generations"]) < 1 or float(numerics["h"]) <= 0:
        raise ConfigError("numerics.generations must be >= 1 and numerics.h > 0")
    output = doc.get("output", {})
    _check_keys(output, OUTPUT_KEYS, "output")
    return RunConfig(doc.get("model"), numerics, task, output)


def load_config(path, command: str | None = None) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(doc, command)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


@dataclass
class Table:
    """Rows under a header of (name, unit) columns."""

    name: str
    columns: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        head = ",".join(f"{n} [{u}]" for n, u in self.columns)
        return "\n".join([head] + [",".join(fmt(v) for v in row) for row in self.rows]) + "\n"


@dataclass
class Result:
    tables: list = field(default_factory=list)
    plots: list = field(default_factory=list)  # (label, x, y)


def plot_text(blocks) -> str:
    out = []
    for label, x, y in blocks:
        lines = [f"# {label}"] + [f"{fmt(a)} {fmt(b)}" for a, b in zip(x, y)]
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n"


def write_result(result: Result, out_dir: Path, kind: str, output: dict) -> list:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory not writable: {out_dir}")
    written = []
    base = output.get("csv", f"{kind}.csv")
    for i, t in enumerate(result.tables):
        name = base if i == 0 else f"{Path(base).stem}_{t.name}.csv"
        p = out_dir / name
        p.write_text(t.to_csv())
        written.append(p)
    if result.plots:
        p = out_dir / output.get("plot", f"{kind}.dat")
        p.write_text(plot_text(result.plots))
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# helpers shared by tasks
# ---------------------------------------------------------------------------


def _directions(spec, n: int) -> list:
    if spec is None:
        spec = [[1.0], [-1.0]] if n == 1 else [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
    out = []
    for d in spec:
        v = np.atleast_1d(np.asarray(d, dtype=float))
        if v.size != n:
            raise ConfigError(f"direction {d} does not have {n} components")
        try:
            out.append(analytic.as_direction(v, n))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return out


def _dir_text(e) -> str:
    return " ".join(fmt(float(x)) for x in np.ravel(e))


def _jittered(field_, jitter: float):
    if jitter <= 0:
        return field_
    rng = np.random.default_rng(int(os.environ.get(SEED_ENV, "0")))
    noise = 1.0 + jitter * rng.uniform(-1.0, 1.0, size=field_.shape)
    return field_.with_values(field_.values * noise)


def _trajectory(cfg: RunConfig, params: ModelParams, box=None):
    nm = cfg.numerics
    M = int(nm["generations"])
    season = cfg.season()
    if box is None:
        init = hybrid.initial_ball(params, float(nm["h"]), M, half_width=season.half_width)
    else:
        init = hybrid.box_initial(params, box, season.dirichlet_h, 0.5 * hybrid.equilibrium_level(params))
    traj = hybrid.run(params, _jittered(init, float(nm["jitter"])), M, season, box)
    if traj.aborted:
        raise BoundaryContamination(traj.reason)
    return traj


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# tasks
# ---------------------------------------------------------------------------


def _oracle_row(args):
    meas, e, conf = args
    return oracle.weinberger_speed(meas, conf, e).c_hat


def _measure(params: ModelParams):
    return analytic.measure_m(params) if params.kernel is None else analytic.measure_l(params)


def cmd_speed(cfg: RunConfig, jobs: int = 1) -> Result:
    """Closed-form, optional oracle and simulated speeds, one row per direction."""
    params = cfg.params()
    dirs = _directions(cfg.task.get("directions"), params.n)
    analytic_c = [analytic.speed(params, e) for e in dirs]
    orc = [math.nan] * len(dirs)
    if cfg.task.get("oracle", False):
        conf = cfg.oracle_config()
        orc = _pmap(_oracle_row, [(_measure(params), e, conf) for e in dirs], jobs)
    table = Table("speed", [("direction", "unit vector"), ("analytic", "length/generation"),
                            ("oracle", "length/generation"), ("simulated", "length/generation"),
                            ("residual", "length"), ("log_corrected", "length/generation"),
                            ("generations", "count"), ("threshold", "density")])
    reports = [None] * len(dirs)
    if cfg.task.get("simulate", True):
        traj = _trajectory(cfg, params)
        thr = cfg.numerics["threshold"]
        reports = [hybrid.estimate_speed(traj, e, thr, float(cfg.numerics["burn_in"])) for e in dirs]
    for e, c, o, r in zip(dirs, analytic_c, orc, reports):
        if r is None:
            table.rows.append([_dir_text(e), c, o, math.nan, math.nan, math.nan, 0, math.nan])
        else:
            table.rows.append([_dir_text(e), c, o, r.slope, r.residual, r.log_corrected,
                               r.generations_used, r.threshold])
    return Result([table])


def _box_row(args):
    params, lengths, season, M, h = args
    res = hybrid.classify_persistence(params, Box((0.0,) * len(lengths), tuple(lengths)), M, None, season, h)
    return res.verdict.value


def cmd_critical_domain(cfg: RunConfig, jobs: int = 1) -> Result:
    params = cfg.params()
    shape = cfg.task.get("shape", "interval" if params.n == 1 else "hypercube")
    rep = analytic.critical_size(params, shape)
    main = Table("critical_domain", [("quantity", "-"), ("value", "length")])
    main.rows.append(["analytic_size", rep.size])
    main.rows.append(["blowup_advection", rep.blowup_advection])
    result = Result([main])
    M = int(cfg.numerics["persistence_generations"])
    season = cfg.season()
    if cfg.task.get("simulate", False):
        bracket = cfg.task.get("bracket")
        if bracket is None:
            if not math.isfinite(rep.size):
                raise ConfigError("task.bracket required when the analytic size is infinite")
            bracket = (0.5 * rep.size, 2.0 * rep.size)
        est = hybrid.critical_length_search(params, tuple(bracket), M, None, season)
        main.rows.append(["simulated_size", est.estimate])
        main.rows.append(["bracket_low", est.bracket[0]])
        main.rows.append(["bracket_high", est.bracket[1]])
    boxes = cfg.task.get("boxes")
    if boxes:
        t = Table("boxes", [("lengths", "length"), ("simulated", "verdict"), ("analytic", "verdict")])
        sizes = [tuple(float(x) for x in np.atleast_1d(b)) for b in boxes]
        verdicts = _pmap(_box_row, [(params, L, season, M, season.dirichlet_h) for L in sizes], jobs)
        for L, v in zip(sizes, verdicts):
            ana = "Persistent" if analytic.box_persists(params, L) else "Extinct"
            t.rows.append([" ".join(fmt(x) for x in L), v, ana])
        result.tables.append(t)
    return result


def cmd_ray(cfg: RunConfig, jobs: int = 1) -> Result:
    params = cfg.params()
    if params.n != 2:
        raise ConfigError("ray speeds need a two-dimensional model")
    if "angles_deg" in cfg.task:
        deg = np.asarray(cfg.task["angles_deg"], dtype=float)
    else:
        step = float(cfg.task.get("step_deg", 1.0))
        deg = np.arange(0.0, 90.0 + 0.5 * step, step)
    if deg.size == 0:
        raise ConfigError("no angles requested")
    A = params.A
    diagonal = abs(A[0, 1]) < 1e-15 and not np.any(params.q)
    rho = analytic.net_growth(params).rho
    t = Table("ray", [("theta", "degree"), ("c_star", "length/generation"), ("ray_speed", "length/generation"),
                      ("ray_closed_form", "length/generation")])
    cs, Cs = [], []
    for d in deg:
        e = analytic.direction_from_angle(math.radians(d))
        c = analytic.speed(params, e)
        C = analytic.ray_speed(params, e)
        closed = (analytic.ray_speed_diagonal(math.sqrt(A[0, 0]), math.sqrt(A[1, 1]), rho, math.radians(d))
                  if diagonal and rho > 0 else math.nan)
        t.rows.append([d, c, C, closed])
        cs.append(c)
        Cs.append(C)
    return Result([t], [("c_star(theta)", deg, cs), ("C(theta)", deg, Cs)])


def cmd_simulate(cfg: RunConfig, jobs: int = 1) -> Result:
    params = cfg.params()
    box = None
    if cfg.task.get("box") is not None:
        lo, hi = cfg.task["box"]
        box = Box(tuple(np.atleast_1d(lo).astype(float)), tuple(np.atleast_1d(hi).astype(float)))
    traj = _trajectory(cfg, params, box)
    level = hybrid.equilibrium_level(params)
    thr = cfg.numerics["threshold"] or 0.5 * level
    cols = [("generation", "count"), ("max", "density"), ("mass", "density*volume")]
    if params.n == 1 and box is None:
        cols += [("front_right", "length"), ("front_left", "length")]
    t = Table("simulate", cols)
    for m, f in enumerate(traj.fields):
        row = [m, float(f.values.max()), f.mass()]
        if len(cols) > 3:
            for e in (1.0, -1.0):
                try:
                    row.append(hybrid.front_position(f, thr, e))
                except ImpulseFrontError:
                    row.append(math.nan)
        t.rows.append(row)
    snaps = cfg.task.get("snapshots", [0, len(traj) - 1])
    plots = []
    for m in snaps:
        if not 0 <= int(m) < len(traj):
            raise ConfigError(f"snapshot {m} outside 0..{len(traj) - 1}")
        f = traj[int(m)]
        x = f.axes()[0]
        v = f.values if f.ndim == 1 else f.values[(slice(None),) + tuple(s // 2 for s in f.shape[1:])]
        plots.append((f"generation {int(m)}", x, v))
    return Result([t], plots)


def cmd_oracle(cfg: RunConfig, jobs: int = 1) -> Result:
    params = cfg.params()
    meas = _measure(params)
    dirs = _directions(cfg.task.get("directions"), params.n)
    s_list = cfg.task.get("mgf_s", [0.0, 0.5, 1.0, 2.0, 3.0])
    conf = cfg.oracle_config()
    chat = _pmap(_oracle_row, [(meas, e, conf) for e in dirs], jobs)
    t = Table("oracle", [("direction", "unit vector"), ("closed_form", "length/generation"),
                         ("oracle", "length/generation"), ("relative_error", "-"), ("mgf_error", "-")])
    for e, c in zip(dirs, chat):
        ref = analytic.speed(params, e)
        t.rows.append([_dir_text(e), ref, c, abs(c - ref) / abs(ref) if ref else math.nan,
                       oracle.crosscheck_mgf(meas, e, s_list)])
    return Result([t])


def cmd_scenario(cfg: RunConfig, jobs: int = 1) -> Result:
    name = cfg.task.get("name")
    if name not in SCENARIO_KEYS:
        raise ConfigError(f"task.name must be one of {sorted(SCENARIO_KEYS)}")
    req, opt = SCENARIO_KEYS[name]
    p = cfg.task.get("params", {})
    _check_keys(p, req | opt, "task.params", req)
    t = Table(name, [("quantity", "-"), ("value", "see quantity")])
    if name == "climate":
        rep = analytic.climate_bounds(float(p["d"]), float(p["log_gain"]), float(p["gamma"]),
                                      float(p["L1"]), float(p["L2"]), p.get("c"))
        t.rows += [["c_max", rep.c_max], ["c_max_squared", rep.speed_bound_sq]]
        if rep.c is not None:
            t.rows += [["c", rep.c], ["persists", rep.persists],
                       ["speed_plus", rep.speeds[0]], ["speed_minus", rep.speeds[1]],
                       ["speeds_positive", rep.speeds_positive],
                       ["consistent", (not rep.persists) or rep.speeds_positive]]
        return Result([t])
    if name == "stream":
        rep = analytic.stream_bounds(*(float(p[k]) for k in ("d", "sigma2", "r", "q", "mu", "lam")))
        t.rows += [["persists", rep.persists], ["spreads_both_ways", rep.spreads_both],
                   ["lambda_plus_one_threshold", rep.threshold]]
        if rep.speeds is not None:
            t.rows += [["speed_downstream", rep.speeds[0]], ["speed_upstream", rep.speeds[1]]]
        else:
            t.rows += [["verdict", "extinction"]]
        return Result([t])
    rep = analytic.savannah_bounds(float(p["r"]), float(p["s"]), float(p["a11"]), float(p["a22"]),
                                   p.get("q", (0.0, 0.0)), float(p.get("step_deg", 1.0)))
    t.rows += [["persists", rep.persists], ["N_star", rep.N_star if rep.N_star is not None else math.nan]]
    result = Result([t])
    if rep.persists:
        deg = np.rad2deg(rep.theta)
        tab = Table("directions", [("theta", "degree"), ("c_star", "length/generation"),
                                   ("ray_speed", "length/generation")])
        tab.rows = [[d, c, C] for d, c, C in zip(deg, rep.c_star, rep.C)]
        result.tables.append(tab)
        result.plots = [("c_star(theta)", deg, rep.c_star), ("C(theta)", deg, rep.C)]
    return result


def _set_path(model: dict, path: str, value: float) -> dict:
    parts = path.split(".")
    if parts[0] == "model":
        parts = parts[1:]
    doc = copy.deepcopy(model)
    node = doc
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"sweep axis {path!r} does not exist in the model")
        node = node[p]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise ConfigError(f"sweep axis {path!r} does not exist in the model")
    node[parts[-1]] = value
    return doc


def _sweep_row(args):
    axis, value, model, numerics, direction = args
    if axis == "q":
        params = build_params(model)
        q = np.zeros(params.n)
        q[0] = value
        params = params.replace(q=q)
        e = np.zeros(params.n)
        e[0] = -1.0 if value >= 0 else 1.0
        return [value, _dir_text(e), analytic.speed(params, e), analytic.critical_size(params).size]
    if axis == "L":
        params = build_params(model)
        cfg = RunConfig(model, numerics, {"kind": "sweep"})
        res = hybrid.classify_persistence(params, Box.cube(value, params.n),
                                          int(numerics["persistence_generations"]), None, cfg.season())
        ana = "Persistent" if analytic.box_persists(params, [value] * params.n) else "Extinct"
        return [value, res.verdict.value, ana, analytic.critical_size(params).size]
    params = build_params(_set_path(model, axis, value))
    e = np.asarray(direction, dtype=float)
    rho = analytic.net_growth(params).rho
    try:
        plus, minus = analytic.speed(params, e), analytic.speed(params, -e)
    except ExtinctionRegime:
        plus = minus = math.nan
    try:
        lam = analytic.critical_size(params).size
    except ImpulseFrontError:
        lam = math.nan
    return [value, rho, plus, minus, lam]


def cmd_sweep(cfg: RunConfig, jobs: int = 1) -> Result:
    if cfg.model is None:
        raise ConfigError("sweep needs a model block")
    axis = cfg.task.get("axis")
    if not isinstance(axis, str) or not axis:
        raise ConfigError("task.axis is required")
    if "values" in cfg.task:
        values = [float(v) for v in cfg.task["values"]]
    elif "range" in cfg.task:
        r = cfg.task["range"]
        _check_keys(r, {"start", "stop", "num"}, "task.range", {"start", "stop", "num"})
        values = [float(v) for v in np.linspace(float(r["start"]), float(r["stop"]), int(r["num"]))]
    else:
        raise ConfigError("task needs values or range")
    if not values:
        raise ConfigError("sweep range is empty")
    params = build_params(cfg.model)
    direction = cfg.task.get("direction", [1.0] + [0.0] * (params.n - 1))
    _directions([direction], params.n)
    if axis == "q":
        cols = [("q", "length/generation"), ("direction", "unit vector"), ("c_star", "length/generation"),
                ("critical_size", "length")]
    elif axis == "L":
        cols = [("L", "length"), ("simulated", "verdict"), ("analytic", "verdict"), ("critical_size", "length")]
    else:
        _set_path(cfg.model, axis, values[0])
        cols = [(axis, "model units"), ("rho", "1/generation"), ("c_star_plus", "length/generation"),
                ("c_star_minus", "length/generation"), ("critical_size", "length")]
    rows = _pmap(_sweep_row, [(axis, v, cfg.model, cfg.numerics, direction) for v in values], jobs)
    return Result([Table("sweep", cols, rows)])


COMMANDS = {
    "speed": cmd_speed,
    "critical-domain": cmd_critical_domain,
    "ray": cmd_ray,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "scenario": cmd_scenario,
    "sweep": cmd_sweep,
}


def execute(cfg: RunConfig, jobs: int = 1) -> Result:
    return COMMANDS[cfg.kind](cfg, jobs)


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ExtinctionRegime, NoPersistenceWindow)):
        return EXIT_REGIME
    if isinstance(exc, (ValidationError, ValueError, KeyError, TypeError)):
        return EXIT_CONFIG
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="impulse-front", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=TASKS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps and per-direction work")
    ap.add_argument("--out", default=".", help="output directory")
    args = ap.parse_args(argv)
    if args.jobs < 1:
        ap.error("--jobs must be >= 1")
    try:
        cfg = load_config(args.config, args.command)
        result = execute(cfg, args.jobs)
        paths = write_result(result, Path(args.out), cfg.kind, cfg.output)
    except (ExtinctionRegime, NoPersistenceWindow) as exc:
        print(f"impulse-front: extinction regime: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (BoundaryContamination, GridExhausted, QuadratureSingularity, FloatingPointError) as exc:
        print(f"impulse-front: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError, KeyError, TypeError) as exc:
        print(f"impulse-front: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ImpulseFrontError as exc:
        print(f"impulse-front: {exc}", file=sys.stderr)
        return exit_code(exc)
    sys.stdout.write(result.tables[0].to_csv() if result.tables else "")
    for p in paths:
        print(f"# wrote {p}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
