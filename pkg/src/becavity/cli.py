"""Command-line entry point: config-driven experiment runs with CSV/JSON output.

Config files are flat ``key = value`` lines with dotted namespaces, e.g.::

    experiment = esd
    model.delta = -1
    model.g_over_gc = 1.05
    aux.gamma = 0.0025
    run.t_end = 2500

Grids are given either as comma lists (``grid.kappa = 0.01, 0.02, 0.05``) or
as ``start:stop:count`` linspace specs (``grid.g_over_gc = 1.01:1.10:10``).
All frequencies are in units of omega_R.  Every run writes one CSV per result
table (17-significant-digit floats, ``#``-commented header) plus a JSON
metadata sidecar; CSV contents are deterministic, timestamps live only in the
sidecar.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 flagged
non-convergence under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gaussian
from .experiments import (
    esd_trace,
    inference_scan,
    stroboscopic_map,
    time_averaged_sweep,
)
from .meanfield import bifurcation_scan
from .model import (
    AuxParams,
    DomainError,
    ModelParams,
    build_aux_hamiltonian,
    critical_coupling,
    phase_of,
    Phase,
    build_normal_hamiltonian,
    build_sr_hamiltonian,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "run", "main"]

EXPERIMENTS = (
    "bifurcation",
    "stroboscopic",
    "time_averaged",
    "esd",
    "inference",
    "single_trajectory",
)

_MODEL_KEYS = {
    "model.delta",
    "model.g",
    "model.g_over_gc",
    "model.omega_R",
    "model.kappa",
    "model.n_atoms",
    "model.U",
}
_AUX_KEYS = {"aux.gamma", "aux.psi", "aux.omega_w"}
_RUN_KEYS = {
    "run.t_end",
    "run.dt",
    "run.T",
    "run.t_skip",
    "run.partition",
    "run.partitions",
    "run.k_lo",
    "run.k_hi",
    "run.strict",
}
_GRID_AXES = {"g", "g_over_gc", "kappa", "delta"}


class ConfigError(ValueError):
    """Malformed, unknown, or out-of-range configuration input."""


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run description: experiment, physics, grids, options."""

    experiment: str
    params: ModelParams
    aux: AuxParams | None = None
    grid: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    strict: bool = False


def _parse_number(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"value for {key!r} is not a number: {raw!r}") from None


def _parse_grid(key: str, raw: str) -> np.ndarray:
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid spec for {key!r} must be start:stop:count")
        start, stop = (_parse_number(key, s) for s in parts[:2])
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid count for {key!r} must be an integer") from None
        if count < 1:
            raise ConfigError(f"grid for {key!r} is empty")
        return np.linspace(start, stop, count)
    vals = [s for s in (s.strip() for s in raw.split(",")) if s]
    if not vals:
        raise ConfigError(f"grid for {key!r} is empty")
    return np.array([_parse_number(key, v) for v in vals])


def parse_config(text: str) -> RunConfig:
    """Parse and validate the flat key-value config format.

    Unknown keys are hard errors; numeric fields are validated by the
    ModelParams/AuxParams constructors before dispatch.
    """
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not key or not raw:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = raw

    experiment = entries.pop("experiment", None)
    if experiment is None:
        raise ConfigError("missing required key 'experiment'")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}"
        )

    grid: dict[str, np.ndarray] = {}
    model_kw: dict[str, float] = {}
    aux_kw: dict[str, float] = {}
    options: dict = {}
    strict = False
    for key, raw in entries.items():
        if key in _MODEL_KEYS:
            model_kw[key.split(".", 1)[1]] = _parse_number(key, raw)
        elif key in _AUX_KEYS:
            aux_kw[key.split(".", 1)[1]] = _parse_number(key, raw)
        elif key.startswith("grid."):
            axis = key.split(".", 1)[1]
            if axis not in _GRID_AXES:
                raise ConfigError(f"unknown grid axis {axis!r}")
            grid[axis] = _parse_grid(key, raw)
        elif key in _RUN_KEYS:
            name = key.split(".", 1)[1]
            if name in ("partition", "partitions"):
                options["partitions"] = tuple(
                    s.strip() for s in raw.split(",") if s.strip()
                )
            elif name == "strict":
                if raw not in ("true", "false"):
                    raise ConfigError("run.strict must be true or false")
                strict = raw == "true"
            elif name in ("k_lo", "k_hi"):
                options[name] = int(_parse_number(key, raw))
            else:
                options[name] = _parse_number(key, raw)
        else:
            raise ConfigError(f"unknown key {key!r}")

    if model_kw.get("U", 0.0) != 0.0:
        raise ConfigError(
            "model.U must be 0: contact interactions are outside the scope "
            "of this model (U = 0 throughout)"
        )
    ratio = model_kw.pop("g_over_gc", None)
    if ratio is not None and "g" in model_kw:
        raise ConfigError("give model.g or model.g_over_gc, not both")
    if ratio is None and "g" not in model_kw:
        if experiment == "bifurcation" and ("g" in grid or "g_over_gc" in grid):
            model_kw["g"] = 1.0  # placeholder; the scan supplies g itself
        else:
            raise ConfigError("missing required key model.g (or model.g_over_gc)")
    if "delta" not in model_kw:
        raise ConfigError("missing required key model.delta")
    try:
        if ratio is not None:
            probe = ModelParams(g=1.0, **model_kw)
            model_kw["g"] = ratio * critical_coupling(probe)
        params = ModelParams(**model_kw)
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    aux = None
    if aux_kw:
        if "gamma" not in aux_kw:
            raise ConfigError("aux.* given without aux.gamma")
        try:
            aux = AuxParams(**aux_kw)
        except (DomainError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    _validate_for_experiment(experiment, grid, options)
    return RunConfig(
        experiment=experiment, params=params, aux=aux, grid=grid,
        options=options, strict=strict,
    )


def _validate_for_experiment(experiment: str, grid: dict, options: dict) -> None:
    if experiment == "bifurcation":
        if not ("g" in grid or "g_over_gc" in grid):
            raise ConfigError("bifurcation requires grid.g or grid.g_over_gc")
    elif experiment in ("stroboscopic", "time_averaged"):
        axes = set(grid)
        if "g" in axes:
            raise ConfigError(f"{experiment} grids use g_over_gc, not g")
        if not 1 <= len(axes) <= 2:
            raise ConfigError(f"{experiment} requires one or two grid axes")
    elif experiment == "inference":
        extra = set(grid) - {"g_over_gc"}
        if extra:
            raise ConfigError("inference accepts only grid.g_over_gc")
    elif grid:
        raise ConfigError(f"{experiment} takes no grid")


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _write_csv(path: Path, columns: list[str], rows, units: str) -> None:
    with open(path, "w") as f:
        f.write(f"# columns: {','.join(columns)}\n")
        f.write(f"# units: {units}\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _sidecar(path: Path, payload: dict) -> None:
    with open(path, "w") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")


def _config_dict(cfg: RunConfig) -> dict:
    p = cfg.params
    out = {
        "experiment": cfg.experiment,
        "model": {
            "delta": p.delta, "g": p.g, "omega_R": p.omega_R,
            "kappa": p.kappa, "n_atoms": p.n_atoms, "U": p.U,
        },
        "grid": {k: v for k, v in cfg.grid.items()},
        "options": dict(cfg.options),
        "strict": cfg.strict,
    }
    if cfg.aux is not None:
        out["aux"] = {
            "gamma": cfg.aux.gamma, "psi": cfg.aux.psi,
            "omega_w": cfg.aux.omega_w,
        }
    return out


def _sweep_rows(res) -> tuple[list[str], list[list]]:
    names = list(res.axis_names)
    parts = sorted(res.tables)
    flags = sorted(res.flags)
    columns = names + [f"N_{s.replace('|', '_')}" for s in parts] + flags
    rows = []
    shape = tuple(len(v) for v in res.axis_values)
    for flat in range(int(np.prod(shape))):
        ij = np.unravel_index(flat, shape)
        row = [res.axis_values[d][ij[d]] for d in range(len(names))]
        row += [res.tables[s][ij] for s in parts]
        row += [res.flags[f][ij] for f in flags]
        rows.append(row)
    return columns, rows


# ---------------------------------------------------------------------------
# experiment dispatch


def _run_bifurcation(cfg: RunConfig, out: Path) -> tuple[dict, list[Path]]:
    if "g" in cfg.grid:
        g_grid = cfg.grid["g"]
    else:
        gc = critical_coupling(cfg.params)
        g_grid = cfg.grid["g_over_gc"] * gc
    rows = bifurcation_scan(cfg.params, g_grid)
    path = out / "bifurcation.csv"
    _write_csv(
        path,
        ["g", "g_over_gc", "abs_a", "wS", "branch", "stable"],
        [[r.g, r.g_over_gc, r.abs_a, r.wS, r.branch, r.stable] for r in rows],
        "frequencies in omega_R; amplitudes scaled by sqrt(N) (cavity) or N (spins)",
    )
    return {"n_rows": len(rows)}, [path]


def _run_sweep(cfg: RunConfig, out: Path) -> tuple[dict, list[Path]]:
    kw = {}
    if "partitions" in cfg.options:
        kw["partitions"] = cfg.options["partitions"]
    if cfg.experiment == "stroboscopic":
        if "k_lo" in cfg.options or "k_hi" in cfg.options:
            kw["k_range"] = (
                cfg.options.get("k_lo", 50), cfg.options.get("k_hi", 60)
            )
        res = stroboscopic_map(cfg.params, cfg.grid, **kw)
    else:
        for name in ("T", "t_skip", "dt"):
            if name in cfg.options:
                kw[name] = cfg.options[name]
        res = time_averaged_sweep(cfg.params, cfg.grid, aux=cfg.aux, **kw)
    columns, rows = _sweep_rows(res)
    path = out / f"{cfg.experiment}.csv"
    _write_csv(path, columns, rows, "frequencies in omega_R; N dimensionless")
    flags = {k: bool(v.any()) for k, v in res.flags.items()}
    return {"metadata": res.metadata, "flags_raised": flags,
            "nonconverged": flags.get("unstable", False)
            or (cfg.experiment == "time_averaged"
                and not bool(res.flags["converged"].all()))}, [path]


def _run_esd(cfg: RunConfig, out: Path) -> tuple[dict, list[Path]]:
    kw = {}
    if "t_end" in cfg.options:
        kw["t_end"] = cfg.options["t_end"]
    if "dt" in cfg.options:
        kw["dt_sample"] = cfg.options["dt"]
    if "partitions" in cfg.options:
        kw["partition"] = cfg.options["partitions"][0]
    trace = esd_trace(cfg.params, aux=cfg.aux, **kw)
    path = out / "esd.csv"
    _write_csv(
        path, ["t", "N"], zip(trace.times, trace.values),
        "t in 1/omega_R; N dimensionless",
    )
    return {
        "partition": trace.partition,
        "events": [list(ev) for ev in trace.events],
        "n_events": len(trace.events),
    }, [path]


def _run_inference(cfg: RunConfig, out: Path) -> tuple[dict, list[Path]]:
    kw = {}
    if "g_over_gc" in cfg.grid:
        kw["g_ratio_grid"] = cfg.grid["g_over_gc"]
    for name in ("T", "t_skip", "dt"):
        if name in cfg.options:
            kw[name] = cfg.options[name]
    res = inference_scan(cfg.params, aux=cfg.aux, **kw)
    path = out / "inference.csv"
    _write_csv(
        path,
        ["g_over_gc", "N_without", "N_with", "S_w"],
        zip(res.g_over_gc, res.n_without, res.n_with, res.squeezing_w),
        "dimensionless",
    )
    return {
        "fit_n": {"slope": res.fit_n[0], "intercept": res.fit_n[1],
                  "r2": res.fit_n[2]},
        "fit_s": {"slope": res.fit_s[0], "intercept": res.fit_s[1],
                  "r2": res.fit_s[2]},
        "metadata": res.metadata,
    }, [path]


def _run_trajectory(cfg: RunConfig, out: Path) -> tuple[dict, list[Path]]:
    p = cfg.params
    if cfg.aux is not None:
        model = build_aux_hamiltonian(p, cfg.aux)
    elif phase_of(p) is Phase.NORMAL:
        model = build_normal_hamiltonian(p)
    else:
        model = build_sr_hamiltonian(p)
    t_end = cfg.options.get("t_end", 100.0)
    dt = cfg.options.get("dt", 0.05)
    dd = gaussian.drift_diffusion(model)
    n = model.n_modes
    times, means, covs = gaussian.propagate_uniform(
        gaussian.GaussianState.vacuum(n), dd, dt, int(round(t_end / dt))
    )
    quad = [f"{w}{lab}" for lab in model.labels for w in ("x", "p")]
    columns = ["t"] + [
        f"cov_{quad[i]}_{quad[j]}" for i in range(2 * n) for j in range(i, 2 * n)
    ]
    iu = np.triu_indices(2 * n)
    rows = ([t] + list(c[iu]) for t, c in zip(times, covs))
    path = out / "single_trajectory.csv"
    _write_csv(path, columns, rows, "t in 1/omega_R; symmetrized covariances")
    return {"modes": list(model.labels), "t_end": t_end, "dt": dt}, [path]


_DISPATCH = {
    "bifurcation": _run_bifurcation,
    "stroboscopic": _run_sweep,
    "time_averaged": _run_sweep,
    "esd": _run_esd,
    "inference": _run_inference,
    "single_trajectory": _run_trajectory,
}


def run(cfg: RunConfig, out_dir: str | Path, threads: int = 1) -> int:
    """Execute one configured experiment; returns the process exit code.

    Grid points are embarrassingly parallel but results are aggregated and
    written single-threaded, so CSV bytes do not depend on ``threads``.
    """
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    summary, paths = _DISPATCH[cfg.experiment](cfg, out)
    wall = time.perf_counter() - t0
    payload = {
        "config": _config_dict(cfg),
        "result": summary,
        "artifacts": [p.name for p in paths],
        "wall_time_s": wall,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    sidecar = out / f"{cfg.experiment}.json"
    _sidecar(sidecar, payload)
    if cfg.strict and summary.get("nonconverged", False):
        return 4
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="becavity",
        description="Run cavity-BEC entanglement experiments from a config file.",
    )
    parser.add_argument("--config", required=True, help="path to the config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--strict", action="store_true",
        help="exit 4 if any convergence flag is raised",
    )
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
        if args.strict:
            cfg = RunConfig(
                experiment=cfg.experiment, params=cfg.params, aux=cfg.aux,
                grid=cfg.grid, options=cfg.options, strict=True,
            )
        return run(cfg, args.out, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (gaussian.MarginalStabilityError, np.linalg.LinAlgError,
            FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # domain violations surfacing from experiment preconditions
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
