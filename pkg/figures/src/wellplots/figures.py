"""The eight standard figures, rendered from solver output files."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_grid_csv, read_roots_csv, read_shallow_json, read_spectrum_json

FIGURE_IDS = ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8")

# deterministic rendering: fixed style, reproducible SVG ids, no timestamps
_RC = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.linestyle": ":",
    "grid.linewidth": 0.6,
    "grid.alpha": 0.6,
    "svg.hashsalt": "wellplots",
}


@dataclass
class FigureSpec:
    """What to draw: figure id, input files, windows, output path base."""

    figure_id: str
    inputs: dict[str, list[Path]] = field(default_factory=dict)
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    clim: tuple[float, float] | None = None
    output: Path | None = None

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; use one of {FIGURE_IDS}")

    def single(self, kind: str) -> Path:
        paths = self.inputs.get(kind, [])
        if len(paths) != 1:
            raise SchemaError(f"{self.figure_id} needs exactly one {kind!r} input, got {len(paths)}")
        return paths[0]


def _draw_grid(ax, spec: FigureSpec, title: str) -> int:
    sig, tau, grid = read_grid_csv(spec.single("grid"))
    if np.all(np.isnan(grid)):
        raise SchemaError("grid holds no finite samples inside the clip window")
    mesh = ax.pcolormesh(sig, tau, grid.T, shading="nearest", cmap="viridis")
    if spec.clim is not None:
        mesh.set_clim(*spec.clim)
    ax.set_xlabel("sigma")
    ax.set_ylabel("tau")
    ax.set_title(title)
    plt.colorbar(mesh, ax=ax, label="clipped value")
    return int(np.sum(~np.isnan(grid)))


def _figure_grid_slice(spec: FigureSpec, title: str):
    fig, ax = plt.subplots()
    _draw_grid(ax, spec, title)
    _apply_windows(ax, spec)
    return fig


def _figure_f6(spec: FigureSpec):
    """Nodal-curve grid with the coupling hyperbola and root circles."""
    fig, ax = plt.subplots()
    _draw_grid(ax, spec, "nodal curves and coupling hyperbola")
    tau_lo, tau_hi = ax.get_ylim()
    for path in spec.inputs.get("roots", []):
        rows = read_roots_csv(path)
        if not rows:
            raise SchemaError(f"{path}: spectrum file holds no roots to mark")
        z_values = [r["sigma"] * r["tau"] for r in rows]
        z = float(np.median(z_values))
        taus = np.linspace(max(tau_lo, 1e-3), tau_hi, 200)
        # the hyperbola sigma = Z/tau; at Z = 0 it degenerates to the tau axis
        ax.plot(z / taus if z > 0 else np.zeros_like(taus), taus, lw=1.2, label=f"sigma tau = {z:.3g}")
        ax.plot(
            [r["sigma"] for r in rows],
            [r["tau"] for r in rows],
            "o",
            ms=8,
            mfc="none",
            mew=1.4,
            label=f"{len(rows)} intersections",
        )
    ax.legend(loc="upper right", fontsize=8)
    _apply_windows(ax, spec)
    return fig


def _figure_f7(spec: FigureSpec):
    """Stacked root-locus panels in the rescaled-determinant style."""
    paths = spec.inputs.get("spectrum", [])
    if not (1 <= len(paths) <= 4):
        raise SchemaError(f"F7 needs one to four spectrum inputs, got {len(paths)}")
    fig, axes = plt.subplots(len(paths), 1, sharex=True, squeeze=False)
    for ax, path in zip(axes[:, 0], paths):
        doc = read_spectrum_json(path)
        rs = [root["R"] for root in doc["roots"]]
        if not rs:
            raise SchemaError(f"{path}: no roots to draw")
        ax.axhline(0.0, color="0.4", lw=0.8)
        # near-vertical strokes at the roots mimic the magnified zero crossings
        ax.vlines(rs, -1.0, 1.0, colors="C0", lw=1.6)
        ax.plot(rs, np.zeros_like(rs), "o", ms=3.5, color="C3")
        lam = doc["header"]["parameters"].get("lambda")
        ax.set_ylabel(f"lam={lam:g}" if lam is not None else "")
        ax.set_yticks([])
    axes[-1, 0].set_xlabel("R")
    axes[0, 0].set_title("rescaled determinant sign structure")
    if spec.xlim is not None:
        axes[0, 0].set_xlim(*spec.xlim)
    return fig


def _figure_f8(spec: FigureSpec):
    """Graphical solution of the shallow-well level equation."""
    doc = read_shallow_json(spec.single("shallow"))
    fig, ax = plt.subplots()
    omega = np.asarray(doc["curve"]["omega"], dtype=float)
    y = np.asarray(doc["curve"]["y"], dtype=float)
    finite = np.isfinite(y)
    if not np.any(finite):
        raise SchemaError("solution curve holds no finite samples")
    ax.plot(omega[finite], y[finite], lw=1.6, label="matching curve")
    for line in doc["lines"]:
        ax.plot(
            omega,
            line["intercept"] + line["slope"] * omega,
            lw=0.9,
            color="0.45",
        )
    levels = doc["levels"]
    if levels:
        om = [lv["omega"] for lv in levels]
        heights = np.interp(om, omega[finite], y[finite])
        ax.plot(om, heights, "o", ms=6, mfc="none", mew=1.4, color="C3", label="levels")
    top = float(np.nanmax([ln["intercept"] for ln in doc["lines"]])) + 0.5
    ax.set_ylim(0.0, top)
    ax.set_xlabel("omega")
    ax.set_ylabel("both sides of the level equation")
    ax.set_title("graphical solution, one intersection per line")
    ax.legend(loc="upper left", fontsize=8)
    _apply_windows(ax, spec)
    return fig


def _apply_windows(ax, spec: FigureSpec) -> None:
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)


_BUILDERS = {
    "F1": lambda spec: _figure_grid_slice(spec, "numerator/denominator ratio, thin slice"),
    "F2": lambda spec: _figure_grid_slice(spec, "secular determinant, thin slice"),
    "F3": lambda spec: _figure_grid_slice(spec, "secular determinant, thin slice"),
    "F4": lambda spec: _figure_grid_slice(spec, "secular determinant, thin slice"),
    "F5": lambda spec: _figure_grid_slice(spec, "secular determinant, thin slice"),
    "F6": _figure_f6,
    "F7": _figure_f7,
    "F8": _figure_f8,
}


def build_figure(spec: FigureSpec):
    """Build the matplotlib Figure for a spec (no files written)."""
    with plt.rc_context(_RC):
        return _BUILDERS[spec.figure_id](spec)


def render(spec: FigureSpec) -> list[Path]:
    """Render the figure to <output>.png and <output>.svg; returns the paths."""
    if spec.output is None:
        raise ValueError("FigureSpec.output is required for rendering")
    fig = build_figure(spec)
    out_png = Path(str(spec.output) + ".png")
    out_svg = Path(str(spec.output) + ".svg")
    try:
        with plt.rc_context(_RC):
            fig.savefig(out_png)
            fig.savefig(out_svg, metadata={"Date": None})
    finally:
        plt.close(fig)
    return [out_png, out_svg]
