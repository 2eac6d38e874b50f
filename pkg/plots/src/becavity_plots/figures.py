"""Figure renderers over the CSV/JSON artifacts written by the becavity CLI.

Rendering is a pure function of the artifact files: no physics is recomputed
here.  Each figure writes both a PNG and an SVG next to the requested output
path.

fig1  stroboscopic negativity maps       (stroboscopic.csv)
fig2  time-averaged negativity / sharing (time_averaged.csv)
fig3  ESD/ESB trace with transient inset (esd.csv + esd.json)
fig4  inference scatter with linear fits (inference.csv + inference.json)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["FigureSpec", "SchemaError", "render"]

FIGURES = ("fig1", "fig2", "fig3", "fig4")

_INPUTS = {
    "fig1": ("stroboscopic.csv",),
    "fig2": ("time_averaged.csv",),
    "fig3": ("esd.csv", "esd.json"),
    "fig4": ("inference.csv", "inference.json"),
}

_SCHEMAS = {
    "esd.csv": ["t", "N"],
    "inference.csv": ["g_over_gc", "N_without", "N_with", "S_w"],
}


class SchemaError(ValueError):
    """Artifact file missing or its commented header does not match."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: id, artifact directory, output path, labels."""

    figure: str
    in_dir: Path
    out_path: Path
    axis_labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise SchemaError(f"unknown figure {self.figure!r}; choose from {FIGURES}")
        object.__setattr__(self, "in_dir", Path(self.in_dir))
        object.__setattr__(self, "out_path", Path(self.out_path))
        for name in _INPUTS[self.figure]:
            path = self.in_dir / name
            if not path.exists():
                raise SchemaError(f"missing input artifact: {path}")


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# columns: "):
        raise SchemaError(f"{path}: missing '# columns:' header")
    columns = lines[0][len("# columns: "):].split(",")
    expected = _SCHEMAS.get(path.name)
    if expected is not None and columns != expected:
        raise SchemaError(
            f"{path}: header {columns} does not match expected {expected}"
        )
    rows = []
    for line in lines[1:]:
        if line.startswith("#") or not line.strip():
            continue
        rows.append([_cell(v) for v in line.split(",")])
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return columns, np.array(rows, dtype=float)


def _cell(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        return math.nan  # non-numeric columns (branch labels) are not plotted


def _split_sweep(columns: list[str], data: np.ndarray):
    """Separate a sweep CSV into axis columns and N_* value columns."""
    n_cols = [k for k, c in enumerate(columns) if c.startswith("N_")]
    if not n_cols:
        raise SchemaError(f"no negativity columns among {columns}")
    axis_cols = [k for k in range(min(n_cols))]
    return axis_cols, n_cols


def _save(fig, out_path: Path) -> list[Path]:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    stem = out_path.with_suffix("")
    paths = [stem.with_suffix(".png"), stem.with_suffix(".svg")]
    for p in paths:
        fig.savefig(p, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return paths


def _render_sweep(spec: FigureSpec, filename: str, title: str) -> dict:
    columns, data = _read_csv(spec.in_dir / filename)
    axis_cols, n_cols = _split_sweep(columns, data)
    fig, axes = plt.subplots(1, len(n_cols), figsize=(4.2 * len(n_cols), 3.4))
    axes = np.atleast_1d(axes)
    x_name = columns[axis_cols[0]]
    x = data[:, axis_cols[0]]
    two_axes = len(axis_cols) >= 2 and np.unique(data[:, axis_cols[1]]).size > 1
    for ax, k in zip(axes, n_cols):
        label = columns[k]
        if two_axes:
            y_name = columns[axis_cols[1]]
            xs, ys = np.unique(x), np.unique(data[:, axis_cols[1]])
            grid = np.full((xs.size, ys.size), np.nan)
            for row in data:
                i = np.searchsorted(xs, row[axis_cols[0]])
                j = np.searchsorted(ys, row[axis_cols[1]])
                grid[i, j] = row[k]
            pcm = ax.pcolormesh(ys, xs, grid, shading="nearest", cmap="magma")
            fig.colorbar(pcm, ax=ax, label=label)
            ax.set_xlabel(spec.axis_labels.get(y_name, y_name))
            ax.set_ylabel(spec.axis_labels.get(x_name, x_name))
        else:
            ax.plot(x, data[:, k], "o-", ms=3)
            ax.set_xlabel(spec.axis_labels.get(x_name, x_name))
            ax.set_ylabel(label)
        ax.set_title(f"{title}: {label}")
    fig.tight_layout()
    return {"outputs": _save(fig, spec.out_path)}


def _render_fig3(spec: FigureSpec) -> dict:
    _, data = _read_csv(spec.in_dir / "esd.csv")
    meta = json.loads((spec.in_dir / "esd.json").read_text())
    events = meta.get("result", {}).get("events", [])
    t, n = data[:, 0], data[:, 1]
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.plot(t, n, lw=0.8, color="C0")
    ax.set_xlabel("t")
    ax.set_ylabel("N(b|c)")
    ax.set_title("atom-atom negativity: sudden death and birth")
    # transient inset with the death intervals shaded
    t_inset = min(50.0, float(t[-1]))
    ins = ax.inset_axes([0.45, 0.45, 0.5, 0.5])
    sel = t <= t_inset
    ins.plot(t[sel], n[sel], lw=0.8, color="C0")
    for ev in events:
        start = ev[0]
        stop = ev[1] if ev[1] is not None and not math.isnan(ev[1]) else t[-1]
        if start <= t_inset:
            ins.axvspan(start, min(stop, t_inset), color="C3", alpha=0.25, lw=0)
    ins.set_xlim(0, t_inset)
    ins.tick_params(labelsize=7)
    return {"outputs": _save(fig, spec.out_path), "n_events": len(events)}


def _render_fig4(spec: FigureSpec) -> dict:
    _, data = _read_csv(spec.in_dir / "inference.csv")
    meta = json.loads((spec.in_dir / "inference.json").read_text())
    fits = meta["result"]
    n0, nw, sw = data[:, 1], data[:, 2], data[:, 3]
    fig, axes = plt.subplots(1, 2, figsize=(8.4, 3.6))
    annotations = {}
    for ax, x, key, xlabel in (
        (axes[0], n0, "fit_n", "N without auxiliary mode"),
        (axes[1], sw, "fit_s", "squeezing S of the auxiliary mode"),
    ):
        fit = fits[key]
        ax.plot(x, nw, "o", ms=4, color="C0")
        xs = np.linspace(float(x.min()), float(x.max()), 50)
        ax.plot(xs, fit["slope"] * xs + fit["intercept"], "-", color="C1")
        text = f"slope = {fit['slope']:.6f}\nR$^2$ = {fit['r2']:.8f}"
        annotations[key] = text
        ax.annotate(text, xy=(0.05, 0.78), xycoords="axes fraction", fontsize=8)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("N with auxiliary mode")
    fig.suptitle("squeezing-based entanglement inference", fontsize=11)
    fig.tight_layout()
    return {"outputs": _save(fig, spec.out_path), "annotations": annotations}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns output paths plus renderer details."""
    if spec.figure == "fig1":
        return _render_sweep(spec, "stroboscopic.csv", "stroboscopic N")
    if spec.figure == "fig2":
        return _render_sweep(spec, "time_averaged.csv", "time-averaged N")
    if spec.figure == "fig3":
        return _render_fig3(spec)
    return _render_fig4(spec)
