"""Command line front end: single experiments, sweeps, acceptance suites and reports.

Every command writes a JSON result record (keys sorted) plus CSV tables into
``--out``; files are written to a temporary name and renamed into place.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__, damping, sobolev, spectral1d, stability, steady, suites
from .errors import NumericalError, ValidationError
from .profiles import ShearProfile

log = logging.getLogger("couette")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


# ---------------------------------------------------------------------------
# parameter handling
# ---------------------------------------------------------------------------

def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class Param:
    name: str
    kind: object = float
    required: bool = False
    default: object = None
    help: str = ""

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


SPECS: dict[str, list[Param]] = {
    "eigen": [Param("gamma", required=True), Param("a", required=True),
              Param("n", int, help="fixed interior grid size (default: converged)"),
              Param("cells_per_width", default=8.0, help="grid cells per profile width"),
              Param("write_phi", _bool, default=False)],
    "beta": [Param("a", _floats, True, help="comma separated list")],
    "gaussian-scaling": [Param("s", required=True),
                         Param("gammas", _floats, default=[0.1, 0.05, 0.025])],
    "bifurcate": [Param("gamma", required=True), Param("a"), Param("steps", int, default=8),
                  Param("step", default=1e-4), Param("match_period"), Param("amplitude", default=1e-5),
                  Param("bracket", _floats, default=[0.6, 1.0]), Param("s", _floats, default=[1.0]),
                  Param("cells_per_width", default=16.0), Param("modes", int, default=16),
                  Param("write_fields", _bool, default=True)],
    "damp": [Param("modes", str, help="JSON file [{k, profile}]"), Param("k", int, default=1),
             Param("profile", str, default="cos", help="cos, jump or a CSV of samples"),
             Param("times", str, default="10:100:12", help="t0:t1:n, log spaced"),
             Param("fit", str, default="both", help="u, v or both"),
             Param("rough", _bool, default=False), Param("rough_kmax", int, default=8),
             Param("rho", default=0.6)],
    "classify": [Param("profile", str, default="erf", help="erf, couette, h or a CSV of (y, U)"),
                 Param("gamma"), Param("a"), Param("h_table", str), Param("period", required=True)],
    "window": [Param("gamma", required=True), Param("a", required=True)],
    "hs-norm": [Param("field", str, True, help="CSV"), Param("s"), Param("sx"), Param("sy"),
                Param("period", default=2 * math.pi)],
}


@dataclass
class RunConfig:
    experiment: str
    params: dict
    out: str = "results"
    seed: int = 0
    threads: int = 1
    base_dir: str = "."

    def validate(self) -> "RunConfig":
        if self.experiment not in SPECS:
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        clean = {}
        for p in SPECS[self.experiment]:
            val = self.params.get(p.name, self.params.get(p.name.replace("_", "-")))
            if val is None:
                if p.required:
                    raise ValidationError(f"missing required parameter {p.flag}")
                val = p.default
            elif p.kind is not None:
                try:
                    val = p.kind(val)
                except (TypeError, ValueError) as exc:
                    raise ValidationError(f"bad value for {p.flag}: {val!r}") from exc
            clean[p.name] = val
        known = {p.name for p in SPECS[self.experiment]} | {p.name.replace("_", "-") for p in SPECS[self.experiment]}
        extra = set(self.params) - known
        if extra:
            raise ValidationError(f"unknown parameters for {self.experiment}: {sorted(extra)}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if int(self.threads) < 1:
            raise ValidationError("threads must be >= 1")
        self.params = clean
        return self


@dataclass
class Outcome:
    outputs: dict
    tables: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _exp_eigen(p, rng, base_dir):
    prof = ShearProfile(p["gamma"], p["a"])
    if p["n"] is not None:
        pair = spectral1d.lowest_eigenpair(prof, spectral1d.DirichletGrid(p["n"]))
        lam, change, n = pair.lam, None, p["n"]
    else:
        lam, change, n = spectral1d.converged_eigenvalue(prof, p["cells_per_width"])
        pair = spectral1d.lowest_eigenpair(prof, spectral1d.DirichletGrid(n))
    out = {"gamma": p["gamma"], "a": p["a"], "lambda": lam, "error": change, "n": n,
           "residual": pair.residual, "beta_limit": None}
    if p["a"] > 0.5:
        out["beta_limit"] = spectral1d.limit_beta(p["a"]).beta
    tables = {}
    if p["write_phi"]:
        tables["eigenfunction.csv"] = (["y", "phi"], [[y, v] for y, v in zip(pair.y, pair.phi)])
    return Outcome(out, tables, {"-16a^2 <= lambda": lam >= -16 * p["a"] ** 2})


def _exp_beta(p, rng, base_dir):
    rows = []
    for a in p["a"]:
        b = spectral1d.limit_beta(a).beta
        rows.append({"a": a, "beta": b, "residual": abs(2 * a - spectral1d.beta_coth_beta(b))})
    return Outcome({"roots": rows}, {"beta.csv": (["a", "beta", "residual"],
                                                  [[r["a"], r["beta"], r["residual"]] for r in rows])},
                   {"residual <= 1e-12": all(r["residual"] <= 1e-12 for r in rows)})


def _exp_gaussian(p, rng, base_dir):
    fit = sobolev.gaussian_hs_scaling(p["s"], p["gammas"])
    out = {"s": fit.s, "exponent": fit.exponent, "expected": 1.5 - fit.s, "prefactor": fit.prefactor,
           "c_s": fit.c_s, "gammas": fit.gammas, "norms": fit.norms, "fit_gammas": fit.fit_gammas}
    table = (["gamma", "norm"], [[g, n] for g, n in zip(fit.gammas, fit.norms)])
    return Outcome(out, {"gaussian_scaling.csv": table},
                   {"exponent within 0.05": abs(fit.exponent - (1.5 - fit.s)) <= 0.05})


def _state_fields(state: steady.SteadyState):
    psi = state.phi.values + state.profile.psi0(state.phi.y)[None, :]
    omega = steady.vorticity_field(state).values
    xi = state.phi.x
    rows = [[xi[i], y, psi[i, j], omega[i, j]] for i in range(len(xi)) for j, y in enumerate(state.phi.y)]
    return ["xi", "y", "psi", "omega"], rows


def _exp_bifurcate(p, rng, base_dir):
    s_list = p["s"]
    tables = {}
    if p["match_period"] is not None:
        state, samples = steady.match_period(p["gamma"], p["match_period"], p["amplitude"],
                                             tuple(p["bracket"]), cells_per_width=p["cells_per_width"],
                                             modes=p["modes"])
        states = [state]
        extra = {"a_T": state.profile.a,
                 "bisection": [[s.a, s.period] for s in samples]}
    else:
        if p["a"] is None:
            raise ValidationError("--a is required unless --match-period is given")
        prof = ShearProfile(p["gamma"], p["a"])
        f = steady.build_nonlinearity(prof)
        grid = steady.SteadyGrid.for_profile(prof, p["cells_per_width"], p["modes"])
        k0_sq, _ = steady.bifurcation_point(prof, f, grid)
        if k0_sq <= 0:
            raise ValidationError("lambda >= 0: no bifurcation from this shear")
        states = steady.continue_branch(f, prof, k0_sq, p["step"], p["steps"], grid)
        extra = {"k0_sq": k0_sq}
    header = ["beta", "alpha_sq", "T", "residual"] + [f"hs_{s:g}" for s in s_list]
    rows = []
    for i, st in enumerate(states):
        norms = [steady.vorticity_distance(st, st.profile, s) for s in s_list]
        rows.append([st.amplitude, st.alpha_sq, st.period, st.residual] + norms)
        if p["write_fields"]:
            tables[f"fields/state_{i:03d}.csv"] = _state_fields(st)
    tables["branch.csv"] = (header, rows)
    rep = steady.classify_streamlines(states[-1])
    out = dict(extra, gamma=p["gamma"], n_states=len(states),
               branch=[dict(zip(header, r)) for r in rows],
               streamlines={"cats_eye": rep.cats_eye, "eye_half_height": rep.eye_half_height,
                            "points": [vars(c) for c in rep.points]})
    flags = {"residual <= 1e-9": all(r[3] <= steady.RESIDUAL_TOL for r in rows),
             "cats_eye": rep.cats_eye}
    return Outcome(out, tables, flags)


def _parse_times(text: str) -> np.ndarray:
    try:
        t0, t1, n = text.split(":")
        return damping.log_times(float(t0), float(t1), int(n))
    except ValueError as exc:
        raise ValidationError(f"times must look like t0:t1:n, got {text!r}") from exc


def _read_columns(path: Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise ValidationError(f"non-numeric row in {path}: {row}") from None
    if not rows:
        raise ValidationError(f"no numeric data in {path}")
    return np.array(rows)


def _mode_from(k, profile, base_dir):
    if profile in damping.NAMED_PROFILES:
        return damping.NAMED_PROFILES[profile](k)
    data = _read_columns(Path(base_dir) / profile)
    vals = data[:, 0] + (1j * data[:, 1] if data.shape[1] > 1 else 0)
    return damping.ModalVorticity(k, vals)


def _exp_damp(p, rng, base_dir):
    times = _parse_times(p["times"])
    if p["rough"]:
        modes = damping.rough_modes(rng, p["rough_kmax"], p["rho"])
    elif p["modes"]:
        spec = json.loads((Path(base_dir) / p["modes"]).read_text())
        modes = [_mode_from(int(m["k"]), m.get("profile", "cos"), base_dir) for m in spec]
    else:
        modes = [_mode_from(p["k"], p["profile"], base_dir)]
    rows = [[t, *damping.velocity_norms(modes, t)] for t in times]
    out = {"times": times.tolist(), "u": [r[1] for r in rows], "v": [r[2] for r in rows]}
    kinds = {"u": ["u_L2"], "v": ["v_L2"], "both": ["u_L2", "v_L2"]}.get(p["fit"])
    if kinds is None:
        raise ValidationError("--fit must be u, v or both")
    fits = {}
    if not p["rough"]:
        for kind in kinds:
            col = 1 if kind == "u_L2" else 2
            fit = damping.fit_series(times, [r[col] for r in rows], kind)
            fits[kind] = {"exponent": fit.exponent, "residual": fit.residual, "constant": fit.constant,
                          "window": list(fit.window)}
    out["fits"] = fits
    return Outcome(out, {"norms.csv": (["t", "u_L2", "v_L2"], rows)})


def _shear_from(p, base_dir):
    kind = p["profile"]
    if kind == "couette":
        return ShearProfile.couette()
    if kind in ("erf", "h"):
        if p["gamma"] is None or p["a"] is None:
            raise ValidationError("--gamma and --a are required for this profile")
        if kind == "h":
            if not p["h_table"]:
                raise ValidationError("--h-table is required for profile h")
            return ShearProfile.from_config({"kind": "h", "gamma": p["gamma"], "a": p["a"],
                                             "h_table_path": p["h_table"]}, base_dir)
        return ShearProfile(p["gamma"], p["a"])
    data = _read_columns(Path(base_dir) / kind)
    if data.shape[1] < 2:
        raise ValidationError("profile CSV needs columns y, U")
    return stability.ShearFunction.from_samples(data[:, 0], data[:, 1])


def _exp_classify(p, rng, base_dir):
    v = stability.classify(_shear_from(p, base_dir), p["period"])
    out = {"verdict": v.verdict, "eigenvalues": v.eigenvalues, "error_estimates": v.errors,
           "threshold": v.threshold, "period": v.period,
           "inflections": [[q.y, q.value] for q in v.inflections]}
    if v.window is not None:
        out["window"] = {"t_min": None if v.window.empty else v.window.t_min, "lambda": v.window.lam}
    return Outcome(out)


def _exp_window(p, rng, base_dir):
    w = stability.unstable_period_window(ShearProfile(p["gamma"], p["a"]))
    out = {"gamma": p["gamma"], "a": p["a"], "lambda": w.lam, "empty": w.empty,
           "t_min": None if w.empty else w.t_min}
    return Outcome(out)


def _exp_hs_norm(p, rng, base_dir):
    data = _read_columns(Path(base_dir) / p["field"])
    if p["sx"] is not None or p["sy"] is not None:
        sx = 0.0 if p["sx"] is None else p["sx"]
        sy = (p["s"] or 0.0) if p["sy"] is None else p["sy"]
        h = sobolev.Field2D(data, p["period"])
        return Outcome({"s_x": sx, "s_y": sy, "norm": sobolev.hs_norm_2d(h, sx, sy)})
    if p["s"] is None:
        raise ValidationError("--s is required for a 1-D field")
    u = sobolev.Field1D(data[:, -1])
    return Outcome({"s": p["s"], "norm": sobolev.hs_norm_1d(u, p["s"]), "samples": len(data)})


EXPERIMENTS = {"eigen": _exp_eigen, "beta": _exp_beta, "gaussian-scaling": _exp_gaussian,
               "bifurcate": _exp_bifurcate, "damp": _exp_damp, "classify": _exp_classify,
               "window": _exp_window, "hs-norm": _exp_hs_norm}


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _version() -> str:
    try:
        res = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).parent, capture_output=True, text=True, timeout=5)
        if res.returncode == 0 and res.stdout.strip():
            return f"{__version__}+g{res.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def run(config: RunConfig) -> dict:
    """Validate, dispatch and persist one experiment; returns the result record."""
    config.validate()
    rng = np.random.default_rng(int(config.seed))
    t0 = time.perf_counter()
    outcome = EXPERIMENTS[config.experiment](config.params, rng, config.base_dir)
    wall = time.perf_counter() - t0
    out = Path(config.out)
    files = []
    for name, (header, rows) in sorted(outcome.tables.items()):
        atomic_write(out / name, csv_text(header, rows))
        files.append(name)
    record = {"config": {"experiment": config.experiment, "params": config.params,
                         "seed": int(config.seed)},
              "version": _version(), "wall_time": wall, "outputs": outcome.outputs,
              "files": files, "flags": outcome.flags}
    atomic_write(out / f"{config.experiment}.json", dump_json(record))
    return record


# ---------------------------------------------------------------------------
# sweep, suite, report
# ---------------------------------------------------------------------------

def _grid_points(grid: list[str]) -> tuple[list[str], list[tuple]]:
    names, values = [], []
    for item in grid:
        if "=" not in item:
            raise ValidationError(f"grid entries look like name=v1,v2; got {item!r}")
        name, vals = item.split("=", 1)
        names.append(name.strip().replace("-", "_"))
        values.append([_num(v) for v in vals.split(",") if v.strip()])
    points = sorted(itertools.product(*values), key=lambda pt: [(isinstance(v, str), v) for v in pt])
    return names, points


def _num(text: str):
    try:
        v = float(text)
        return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v
    except ValueError:
        return text.strip()


def _flatten(outputs: dict) -> dict:
    flat = {}
    for k, v in outputs.items():
        if isinstance(v, (int, float, str, bool, np.floating, np.integer)) or v is None:
            flat[k] = v
    return flat


def sweep(experiment: str, grid: list[str], base: dict, parallelism: int = 1,
          seed: int = 0, base_dir: str = ".") -> tuple[list[str], list[list]]:
    """Run every grid point; rows in lexicographic order of the point values."""
    if experiment not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {experiment!r}")
    names, points = _grid_points(grid)

    def one(point):
        params = dict(base, **dict(zip(names, point)))
        try:
            cfg = RunConfig(experiment, params, seed=seed, base_dir=base_dir).validate()
            res = EXPERIMENTS[experiment](cfg.params, np.random.default_rng(seed), base_dir)
            return point, _flatten(res.outputs), ""
        except (ValidationError, NumericalError, ValueError, RuntimeError) as exc:
            return point, {}, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(pool.map(one, points))
    keys = sorted({k for _, out, _ in results for k in out} - set(names))
    header = names + keys + ["status", "failure"]
    rows = []
    for point, out, err in results:
        rows.append(list(point) + [out.get(k, "") for k in keys] + ["error" if err else "ok", err])
    return header, rows


def run_suite(ids=None) -> list[suites.CriterionResult]:
    ids = sorted(ids or suites.ALL)
    return [suites.ALL[i]() for i in ids]


def render_report(dirs) -> str:
    found: dict[int, dict] = {}
    for d in dirs:
        for path in sorted(Path(d).glob("*.json")):
            try:
                rec = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError):
                continue
            for crit in rec.get("outputs", {}).get("criteria", []) if isinstance(rec, dict) else []:
                found[int(crit["id"])] = crit
    lines = ["# Acceptance report", "", "| # | criterion | status | measured |", "|---|---|---|---|"]
    for i, title in suites.TITLES.items():
        crit = found.get(i)
        if crit is None:
            lines.append(f"| {i} | {_esc(title)} | MissingSuite | |")
            continue
        status = "pass" if crit["passed"] else "FAIL"
        measured = "; ".join(
            f"{c['name']}={_short(c['measured'])}{'' if c['ok'] else ' (x)'}" for c in crit["checks"])
        measured = _esc(measured)
        lines.append(f"| {i} | {_esc(title)} | {status} | {measured} |")
    csvs = sorted({str(p) for d in dirs for p in Path(d).rglob("*.csv")})
    if csvs:
        lines += ["", "Data files:", ""] + [f"- `{c}`" for c in csvs]
    n_pass = sum(1 for c in found.values() if c["passed"])
    lines += ["", f"{n_pass} of {len(suites.TITLES)} criteria pass; "
              f"{len(suites.TITLES) - len(found)} missing."]
    return "\n".join(lines) + "\n"


def _esc(text: str) -> str:
    return text.replace("|", "\\|")


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _global_options(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=d, help="output directory (default: results)")
    parser.add_argument("--seed", type=int, default=d, help="random seed (default: 0)")
    parser.add_argument("--threads", type=int, default=d, help="worker threads (default: 1)")
    parser.add_argument("--config", default=d, help="YAML file; flags override its values")
    parser.add_argument("-v", "--verbose", action="store_true", default=d if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="couette", description=__doc__.splitlines()[0])
    _global_options(parser, False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, spec in SPECS.items():
        sp = sub.add_parser(name)
        _global_options(sp, True)
        for p in spec:
            sp.add_argument(p.flag, dest=p.name, default=None, help=p.help or None)
    sp = sub.add_parser("sweep", help="run an experiment over a parameter grid")
    _global_options(sp, True)
    sp.add_argument("--experiment", required=True, choices=sorted(EXPERIMENTS))
    sp.add_argument("--grid", action="append", required=True, help="name=v1,v2 (repeatable)")
    sp.add_argument("--set", action="append", default=[], help="fixed name=value (repeatable)")
    sp.add_argument("--parallel", type=int, default=None, help="defaults to --threads")
    sp = sub.add_parser("suite", help="run acceptance criteria")
    _global_options(sp, True)
    sp.add_argument("--ids", default=None, help="comma separated criterion numbers")
    sp = sub.add_parser("report", help="render the acceptance table from result directories")
    _global_options(sp, True)
    sp.add_argument("dirs", nargs="*")
    sp = sub.add_parser("run", help="run the experiment named in --config")
    _global_options(sp, True)
    return parser


def _load_config(path) -> dict:
    if not path:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config must be a mapping")
    return data


def _pick(*values):
    return next(v for v in values if v is not None)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _load_config(args.config)
        base_dir = str(Path(args.config).parent) if args.config else "."
        out = str(_pick(args.out, cfg.get("out"), "results"))
        seed = int(_pick(args.seed, cfg.get("seed"), 0))
        threads = int(_pick(args.threads, cfg.get("threads"), 1))
        command = args.command
        if command == "run":
            command = cfg.get("experiment")
            if command not in SPECS:
                parser.error("--config must name an experiment")
        if command in SPECS:
            params = dict(cfg.get("params", {}))
            params.update({p.name: getattr(args, p.name) for p in SPECS[command]
                           if getattr(args, p.name, None) is not None})
            missing = [p.flag for p in SPECS[command] if p.required and params.get(p.name) is None]
            if missing:
                parser.error(f"{command}: missing required {', '.join(missing)}")
            record = run(RunConfig(command, params, out, seed, threads, base_dir))
            sys.stdout.write(dump_json({k: v for k, v in record.items() if k != "wall_time"}))
        elif command == "sweep":
            base = dict(cfg.get("params", {}))
            for item in args.set:
                k, _, v = item.partition("=")
                base[k.strip().replace("-", "_")] = _num(v)
            par = args.parallel or threads
            header, rows = sweep(args.experiment, args.grid, base, par, seed, base_dir)
            atomic_write(Path(out) / f"sweep_{args.experiment}.csv", csv_text(header, rows))
            sys.stdout.write(csv_text(header, rows))
        elif command == "suite":
            ids = [int(i) for i in args.ids.split(",")] if args.ids else None
            results = run_suite(ids)
            for r in results:
                print(r.line())
            record = {"config": {"experiment": "suite", "ids": ids, "seed": seed},
                      "version": _version(), "outputs": {"criteria": [r.to_dict() for r in results]}}
            atomic_write(Path(out) / "suite.json", dump_json(record))
        elif command == "report":
            text = render_report(args.dirs or [out])
            atomic_write(Path(out) / "report.md", text)
            sys.stdout.write(text)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
