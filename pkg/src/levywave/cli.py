"""Command-line experiment driver.

Every run reads one JSON config, writes CSV tables plus a ``summary.json``
that echoes the resolved config, and is reproducible from (config, seed):
replica batches draw from ``RngStream(seed, batch_index)`` and are merged in
batch order, so the worker count never changes the output bytes.

Exit codes: 0 success, 1 config error, 2 numeric non-convergence (or a
failed invariant under ``validate``), 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .exponents import (GaugeFunction, IndexUnresolved, LevyExponent, QuadratureError,
                        dimension_formula, exponent_from_json, gauge_eval, upper_index,
                        zero_criterion)
from .fields import (RotatedLattice, dump_solution, simulate_noise, simulate_wave, solve_wave,
                     u_by_rotation)
from .levelset import (EPS_FACTOR, DichotomyCase, EmptyZeroSet, box_counting_dimension,
                       detect_zeros, dichotomy_sweep, lattice_epsilon)
from .potential import (FW_MAX_ITER, FW_TOL, GridSet, capacity_from_kernel,
                        dimension_by_capacity, exhaustive_simplex_min, kernel_matrix,
                        sym_diff_area, sym_diff_bounds)
from .sampling import Box, IsoLevyNoise, RngStream, simple_function

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

WHITE_NOISE = {"family": "isotropic_stable", "d": 1, "alpha": 2.0, "chi": 0.5}


class ConfigError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


# --- config handling --------------------------------------------------------------

DEFAULTS = {
    "gauge": {"exponent": None, "lambdas": None, "mode": "closed", "N": 2},
    "simulate": {"exponent": WHITE_NOISE, "lattice": {"h": 0.25, "T_max": 2.0, "x_max": 1.0},
                 "replicas": 1000, "seed": None, "apexes": None, "xi": [0.5, 1.0, 2.0],
                 "batch": 100, "dump": False},
    "zeros": {"exponent": WHITE_NOISE, "window": {"L": 2.0, "M": 512, "a0": 0.0, "b0": 0.0},
              "lattice": None, "seed": None, "epsilon": "auto", "eps_factor": EPS_FACTOR,
              "t_min": 0.0},
    "dimension": {"exponent": WHITE_NOISE,
                  "window": {"L": 2.0, "M": 2048, "a0": 0.0, "b0": 0.0}, "lattice": None,
                  "replicas": 4, "seed": None, "t_min": None, "eps_factor": EPS_FACTOR,
                  "scales": None, "tolerance": 0.15},
    "dichotomy": {"cases": None, "window": {"L": 2.0, "M": 64, "a0": 0.0, "b0": 0.0},
                  "epsilons": [0.2 / 2**k for k in range(6)], "t_min": 0.25,
                  "replicas": 400, "batch": 50, "seed": None},
    "capacity": {"exponent": WHITE_NOISE, "grid": None, "kernel": None, "q": 0.0,
                 "tol": FW_TOL, "max_iter": FW_MAX_ITER, "dimension": False,
                 "dimension_tol": 0.02},
    "validate": {"seed": 0},
}

DEFAULT_DICHOTOMY_CASES = [
    {"name": "white d=1", "exponent": WHITE_NOISE},
    {"name": "white d=5", "exponent": {**WHITE_NOISE, "d": 5}},
]

NEEDS_SEED = {"simulate", "zeros", "dimension", "dichotomy", "validate"}


def load_config(path) -> dict:
    """Parse a JSON config; errors carry the line and column."""
    if path is None:
        return {}
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return obj


def resolve_config(command: str, raw: dict, seed=None) -> dict:
    """Merge user settings over the command defaults and validate them."""
    defaults = DEFAULTS[command]
    unknown = sorted(set(raw) - set(defaults) - {"command"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown field for '{command}'")
    cfg = {k: raw.get(k, v) for k, v in defaults.items()}
    if seed is not None:
        cfg["seed"] = seed
    if command in NEEDS_SEED:
        s = cfg.get("seed")
        if s is None:
            raise ConfigError("seed: required (set it in the config or pass --seed)")
        if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < 2**64:
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {s!r}")
    for key in ("replicas", "batch", "M"):
        if key in cfg:
            v = cfg[key]
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{key}: must be a positive integer, got {v!r}")
    if "exponent" in cfg:
        if cfg["exponent"] is None and command != "capacity":
            raise ConfigError("exponent: missing required field")
        if cfg["exponent"] is not None:
            cfg["exponent"] = _exponent(cfg["exponent"]).to_json()
    for key in ("window", "lattice"):
        if isinstance(cfg.get(key), dict) and isinstance(defaults.get(key), dict):
            cfg[key] = {**defaults[key], **cfg[key]}
    return cfg


def _exponent(obj, field="exponent") -> LevyExponent:
    try:
        return exponent_from_json(obj)
    except (ValueError, TypeError, KeyError) as err:
        raise ConfigError(f"{field}.{err}") from None


def _number(cfg, key, positive=False) -> float:
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{key}: must be a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{key}: must be positive, got {v!r}")
    return float(v)


def make_lattice(cfg: dict) -> RotatedLattice:
    """From ``lattice`` {h, T_max, x_max} if given, else ``window`` {L, M, a0, b0}."""
    spec = cfg.get("lattice")
    try:
        if spec:
            for k in ("h", "T_max", "x_max"):
                if k not in spec:
                    raise ConfigError(f"lattice.{k}: missing required field")
            return RotatedLattice.covering(_number(spec, "h", True), _number(spec, "T_max", True),
                                           _number(spec, "x_max"))
        w = cfg["window"]
        m = w["M"]
        if not isinstance(m, int) or m < 1:
            raise ConfigError(f"window.M: must be a positive integer, got {m!r}")
        return RotatedLattice.window(_number(w, "L", True) / m, _number(w, "a0"),
                                     _number(w, "b0"), m)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as err:
        raise ConfigError(f"lattice: {err}") from None


# --- output ------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return v


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_summary(out: Path, command: str, cfg: dict, results: dict) -> dict:
    summary = _jsonable({"command": command, "config": cfg, **results})
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


@contextmanager
def _mapper(workers: int):
    if workers <= 1:
        yield map
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield pool.map


# --- commands ----------------------------------------------------------------------

def cmd_gauge(cfg: dict, out: Path, workers: int = 1) -> dict:
    exp = _exponent(cfg["exponent"])
    if cfg["mode"] not in ("closed", "quadrature"):
        raise ConfigError(f"mode: must be 'closed' or 'quadrature', got {cfg['mode']!r}")
    lams = cfg["lambdas"]
    lams = np.logspace(-3, 3, 61) if lams is None else np.asarray(lams, dtype=float)
    if lams.ndim != 1 or np.any(~(lams > 0)):
        raise ConfigError("lambdas: must be a list of positive numbers")
    g = GaugeFunction(exp, mode=cfg["mode"])
    phi = gauge_eval(g, lams)
    write_csv(out / "gauge.csv", ["lambda", "phi"], zip(lams, phi))
    idx = upper_index(g)
    return {"upper_index": idx, "verdict": zero_criterion(g).value,
            "predicted_dimension": dimension_formula(g, cfg["N"])}


def _apex_rows(exp_json, lattice, apexes, seed, k, n):
    """Batch k: values of u at the requested apexes, shape (n, n_apex, d)."""
    exp = exponent_from_json(exp_json)
    sol = simulate_wave(exp, lattice, RngStream(seed, k), n)
    return np.stack([sol.at(t, x) for t, x in apexes], axis=1)


def cmd_simulate(cfg: dict, out: Path, workers: int = 1) -> dict:
    exp = _exponent(cfg["exponent"])
    lat = make_lattice(cfg)
    t_max = cfg["lattice"]["T_max"]
    apexes = cfg["apexes"] if cfg["apexes"] is not None else [[t_max, 0.0]]
    try:
        apexes = [(float(t), float(x)) for t, x in apexes]
        for t, x in apexes:
            lat.node_of(t, x)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"apexes: {err}") from None
    cfg["apexes"] = [list(a) for a in apexes]
    xis = []
    for v in cfg["xi"]:
        xi = np.zeros(exp.d)
        if np.ndim(v) == 0:
            xi[0] = float(v)
        elif len(v) == exp.d:
            xi[:] = v
        else:
            raise ConfigError(f"xi: entries must be scalars or length-{exp.d} vectors")
        xis.append(xi)
    R, B = cfg["replicas"], cfg["batch"]
    starts = list(range(0, R, B))
    sizes = [min(B, R - s) for s in starts]
    with _mapper(workers) as m:
        parts = list(m(_apex_rows, [exp.to_json()] * len(starts), [lat] * len(starts),
                       [apexes] * len(starts), [cfg["seed"]] * len(starts),
                       range(len(starts)), sizes))
    u = np.concatenate(parts)  # (R, n_apex, d)
    comps = [f"u_{j + 1}" for j in range(exp.d)]
    write_csv(out / "replicas.csv", ["replica", "t", "x"] + comps,
              ([r, t, x, *u[r, a]] for r in range(R) for a, (t, x) in enumerate(apexes)))
    rows, worst = [], 0.0
    for a, (t, x) in enumerate(apexes):
        for xi in xis:
            c = np.cos(u[:, a] @ xi)
            mean = c.mean()
            se = c.std(ddof=1) / math.sqrt(R) if R > 1 else math.nan
            pred = math.exp(-t * t * float(exp(xi / 2)))
            z = abs(mean - pred) / se if se > 0 else math.nan
            worst = max(worst, z) if math.isfinite(z) else worst
            rows.append([t, x, *xi, mean, se, pred, z])
    write_csv(out / "charfn.csv",
              ["t", "x"] + [f"xi_{j + 1}" for j in range(exp.d)]
              + ["empirical", "stderr", "predicted", "z"], rows)
    files = ["replicas.csv", "charfn.csv"]
    if cfg["dump"]:
        sol = simulate_wave(exp, lat, RngStream(cfg["seed"], 0))
        dump_solution(sol, out / "field.lwsf", seed=cfg["seed"])
        files.append("field.lwsf")
    return {"replicas": R, "max_abs_z": worst, "files": files}


def _epsilon(cfg, exp, lat):
    eps = cfg["epsilon"]
    if eps == "auto":
        return lattice_epsilon(exp, lat, _number(cfg, "eps_factor", True))
    if isinstance(eps, bool) or not isinstance(eps, (int, float)) or eps < 0:
        raise ConfigError(f"epsilon: must be 'auto' or a nonnegative number, got {eps!r}")
    return float(eps)


def cmd_zeros(cfg: dict, out: Path, workers: int = 1) -> dict:
    exp = _exponent(cfg["exponent"])
    lat = make_lattice(cfg)
    sol = simulate_wave(exp, lat, RngStream(cfg["seed"], 0))
    sample = detect_zeros(sol, _epsilon(cfg, exp, lat), t_min=_number(cfg, "t_min"))
    write_csv(out / "zeros.csv", ["t", "x", "m", "n"],
              ([*p, *i] for p, i in zip(sample.points, sample.indices)))
    return {"count": len(sample), "h": lat.h, "window": list(sample.window)}


def _dimension_replica(exp_json, lattice, seed, k, eps_factor, t_min, scales):
    exp = exponent_from_json(exp_json)
    sol = simulate_wave(exp, lattice, RngStream(seed, k))
    sample = detect_zeros(sol, lattice_epsilon(exp, lattice, eps_factor), t_min=t_min)
    try:
        est = box_counting_dimension(sample, scales)
    except (EmptyZeroSet, ValueError) as err:
        return {"replica": k, "points": len(sample), "error": str(err)}
    return {"replica": k, "points": len(sample), "slope": est.slope, "stderr": est.stderr,
            "r_squared": est.r_squared, "deltas": est.scales.tolist(),
            "counts": est.counts.tolist()}


def cmd_dimension(cfg: dict, out: Path, workers: int = 1) -> dict:
    exp = _exponent(cfg["exponent"])
    lat = make_lattice(cfg)
    t, _ = lat.apex_grid()
    if cfg["t_min"] is None:
        cfg["t_min"] = float(t.max()) / 8
    t_min = _number(cfg, "t_min")
    eps_factor = _number(cfg, "eps_factor", True)
    R = cfg["replicas"]
    with _mapper(workers) as m:
        reps = list(m(_dimension_replica, [exp.to_json()] * R, [lat] * R, [cfg["seed"]] * R,
                      range(R), [eps_factor] * R, [t_min] * R, [cfg["scales"]] * R))
    write_csv(out / "boxcount.csv", ["replica", "delta", "count"],
              ([r["replica"], d, c] for r in reps if "slope" in r
               for d, c in zip(r["deltas"], r["counts"])))
    write_csv(out / "slopes.csv", ["replica", "points", "slope", "stderr", "r_squared"],
              ([r["replica"], r["points"], r.get("slope", math.nan), r.get("stderr", math.nan),
                r.get("r_squared", math.nan)] for r in reps))
    slopes = np.array([r["slope"] for r in reps if "slope" in r])
    if len(slopes) == 0:
        raise NonConvergence("no replica produced a usable zero set")
    predicted = dimension_formula(GaugeFunction(exp), 2)
    estimate = float(slopes.mean())
    se = float(slopes.std(ddof=1) / math.sqrt(len(slopes))) if len(slopes) > 1 else math.nan
    tol = _number(cfg, "tolerance", True)
    return {"predicted": predicted, "estimate": estimate, "stderr": se,
            "usable_replicas": len(slopes), "within_tolerance": abs(estimate - predicted) <= tol,
            "replica_slopes": slopes}


def cmd_dichotomy(cfg: dict, out: Path, workers: int = 1) -> dict:
    cases_cfg = cfg["cases"] if cfg["cases"] is not None else DEFAULT_DICHOTOMY_CASES
    if not isinstance(cases_cfg, list) or not cases_cfg:
        raise ConfigError("cases: must be a non-empty list")
    cases, resolved = [], []
    for i, c in enumerate(cases_cfg):
        if not isinstance(c, dict) or "exponent" not in c:
            raise ConfigError(f"cases[{i}].exponent: missing required field")
        exp = _exponent(c["exponent"], f"cases[{i}].exponent")
        local = {"window": {**cfg["window"], **c.get("window", {})}, "lattice": None}
        lat = make_lattice(local)
        t_min = float(c.get("t_min", cfg["t_min"]))
        eps = c.get("epsilons", cfg["epsilons"])
        try:
            case = DichotomyCase(exp, lat, tuple(eps), t_min, c.get("name", ""))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"cases[{i}].epsilons: {err}") from None
        cases.append(case)
        resolved.append({"name": case.name, "exponent": exp.to_json(), "window": local["window"],
                         "t_min": t_min, "epsilons": list(case.epsilons)})
    cfg["cases"] = resolved
    R, B = cfg["replicas"], cfg["batch"]
    with _mapper(workers) as m:
        rows = dichotomy_sweep(cases, R, cfg["seed"], batch=B, mapper=m)
    table = []
    for row in rows:
        hits = row.min_norms[:, None] <= np.array(row.epsilons)[None, :]
        for k, start in enumerate(range(0, R, B)):
            blk = hits[start:start + B]
            for j, e in enumerate(row.epsilons):
                f = blk[:, j].mean()
                table.append([row.name, e, k, len(blk), f, math.sqrt(f * (1 - f) / len(blk))])
        for j, e in enumerate(row.epsilons):
            table.append([row.name, e, "all", R, row.hit_freq[j], row.stderr[j]])
    write_csv(out / "dichotomy.csv",
              ["case", "epsilon", "batch", "replicas", "hit_freq", "stderr"], table)
    return {"cases": [{"name": r.name, "verdict": r.verdict.value, "profile": r.profile,
                       "agree": r.agree, "hit_freq": r.hit_freq} for r in rows],
            "all_agree": all(r.agree for r in rows)}


def cmd_capacity(cfg: dict, out: Path, workers: int = 1) -> dict:
    tol = _number(cfg, "tol", True)
    max_iter = cfg["max_iter"]
    if cfg["kernel"] is not None:
        K = np.asarray(cfg["kernel"], dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1] or not np.allclose(K, K.T):
            raise ConfigError("kernel: must be a symmetric square matrix")
        res = capacity_from_kernel(K, tol=tol, max_iter=max_iter)
        support = res.measure.support
        dim_result = None
    else:
        if cfg["grid"] is None:
            raise ConfigError("grid: set either 'grid' or 'kernel'")
        try:
            G = GridSet.from_json(cfg["grid"])
        except (ValueError, TypeError) as err:
            raise ConfigError(f"grid.{err}") from None
        exp = _exponent(cfg["exponent"])
        g = GaugeFunction(exp)
        pts = G.points()
        K = kernel_matrix(pts, g, G.spacing, _number(cfg, "q"))
        res = capacity_from_kernel(K, pts, G.spacing, tol, max_iter)
        support = pts
        dim_result = None
        if cfg["dimension"]:
            cd = dimension_by_capacity(G, g, tol=_number(cfg, "dimension_tol", True))
            dim_result = {"value": cd.value, "bracketed": cd.bracketed,
                          "predicted": dimension_formula(g, G.dim)}
    if not res.converged:
        raise NonConvergence(f"Frank-Wolfe stopped with gap {res.gap:.3g} after "
                             f"{res.iterations} iterations")
    cols = [f"s_{j + 1}" for j in range(support.shape[1])]
    write_csv(out / "measure.csv", cols + ["weight"],
              ([*p, w] for p, w in zip(support, res.measure.weights)))
    summary = {"capacity": res.capacity, "energy": res.energy, "iterations": res.iterations,
               "gap": res.gap}
    if dim_result is not None:
        summary["dimension_by_capacity"] = dim_result
    return summary


# --- invariant suite ----------------------------------------------------------------

def invariant_checks(seed: int) -> list[tuple[str, bool, str]]:
    """Fast structural checks; each returns (name, passed, detail)."""
    out = []
    exp = LevyExponent.isotropic(1, 1.5, 0.5)

    lat = RotatedLattice.covering(0.25, 2.0, 1.0, full=True)
    areas = lat.prefix_areas()
    t, _ = lat.apex_grid()
    ok = lat.apex_valid()
    err = float(np.abs(areas[ok] - t[ok] ** 2).max())
    out.append(("cone_area", err <= 1e-12, f"max error {err:.3g}"))

    rng = RngStream(seed, 0)
    noise = simulate_noise(exp, lat, rng)
    sol = solve_wave(noise)
    errs = [float(np.abs(u_by_rotation(noise, tt, xx) - 0.5 * noise.brute_cone_sum(tt, xx)).max())
            for tt, xx in [(1.0, 0.0), (2.0, 1.0), (1.5, -0.5)]]
    out.append(("rotation_identity", max(errs) <= 1e-12, f"max error {max(errs):.3g}"))

    again = solve_wave(simulate_noise(exp, lat, RngStream(seed, 0)))
    same = again.values.tobytes() == sol.values.tobytes()
    out.append(("determinism", same, "identical bytes" if same else "outputs differ"))

    boxes = [Box((0, 0), (1, 1)), Box((1, 0), (2, 1)), Box((0, 1), (2, 3))]
    noise2 = IsoLevyNoise(exp, RngStream(seed, 1))
    f1 = simple_function(boxes, [1.0, -2.0, 0.5])
    f2 = simple_function(boxes, [0.25, 3.0, -1.0])
    combo = simple_function(boxes, [2 * 1.0 - 3 * 0.25, 2 * -2.0 - 3 * 3.0, 2 * 0.5 + 3 * 1.0])
    lhs = noise2.integrate(combo)
    rhs = 2 * noise2.integrate(f1) - 3 * noise2.integrate(f2)
    err = float(np.abs(lhs - rhs).max())
    out.append(("linearity", err <= 1e-12 * max(1.0, float(np.abs(lhs).max())),
                f"max error {err:.3g}"))

    worst = 0.0
    for e in (LevyExponent.isotropic(2, 1.2, 0.7), LevyExponent.components([1.0, 1.7], 1.0),
              LevyExponent.quadratic([[2.0, 0.3], [0.3, 1.0]])):
        for lam in (0.1, 1.0, 10.0):
            a = gauge_eval(GaugeFunction(e), lam)
            b = gauge_eval(GaugeFunction(e, mode="quadrature"), lam)
            worst = max(worst, abs(a - b) / a)
    out.append(("gauge_quadrature", worst <= 1e-4, f"max relative error {worst:.3g}"))

    a, b = sym_diff_bounds([1, 1], [2, 2], 20000, RngStream(seed, 2).generator())
    out.append(("sym_diff_bounds", a > 0 and b < math.inf, f"a={a:.4g}, b={b:.4g}"))

    gen = RngStream(seed, 3).generator()
    s, tt = gen.uniform(0.5, 2, 2), gen.uniform(0.5, 2, 2)
    pts = gen.uniform(0, 2, (200000, 2))
    inside = lambda p: np.all(pts <= p, axis=1)
    mc = 4.0 * np.mean(inside(s) ^ inside(tt))
    exact = float(sym_diff_area(s, tt))
    rel = abs(mc - exact) / exact
    out.append(("sym_diff_monte_carlo", rel <= 0.05, f"relative error {rel:.3g}"))

    gen = RngStream(seed, 4).generator()
    A = gen.normal(size=(4, 4))
    K = A @ A.T + 0.1 * np.eye(4)
    fw = capacity_from_kernel(K).energy
    ex, _ = exhaustive_simplex_min(K, 0.01)
    rel = abs(fw - ex) / ex
    out.append(("frank_wolfe_oracle", rel <= 1e-3, f"relative gap {rel:.3g}"))

    G = GridSet([[1, 2, 1, 2]], 1 / 8)
    K = kernel_matrix(G.points(), GaugeFunction(exp), G.spacing)
    lo = float(np.linalg.eigvalsh(K).min())
    out.append(("kernel_psd", lo >= -1e-8, f"min eigenvalue {lo:.3g}"))
    return out


def cmd_validate(cfg: dict, out: Path, workers: int = 1) -> dict:
    checks = invariant_checks(cfg["seed"])
    write_csv(out / "validate.csv", ["check", "passed", "detail"], checks)
    failed = [name for name, ok, _ in checks if not ok]
    return {"checks": len(checks), "failed": failed}


COMMANDS = {
    "gauge": cmd_gauge,
    "simulate": cmd_simulate,
    "zeros": cmd_zeros,
    "dimension": cmd_dimension,
    "dichotomy": cmd_dichotomy,
    "capacity": cmd_capacity,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levywave", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", default="levywave-out", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=int, help="seed (overrides the config)")
    return p


def run(command: str, config: dict, out, workers: int = 1, seed=None) -> dict:
    """Resolve the config, run the command, write outputs; returns the summary."""
    cfg = resolve_config(command, config, seed)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    results = COMMANDS[command](cfg, out, max(1, int(workers)))
    return write_summary(out, command, cfg, results)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = run(args.command, load_config(args.config), args.out, args.workers, args.seed)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergence, QuadratureError, IndexUnresolved, EmptyZeroSet) as err:
        print(f"{args.command}: numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(f"{args.command}: I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    if args.command == "validate" and summary["failed"]:
        print(f"validate: failed checks: {', '.join(summary['failed'])}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps({k: v for k, v in summary.items() if k != "config"}, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
