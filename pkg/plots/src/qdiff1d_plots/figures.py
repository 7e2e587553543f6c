"""Deterministic figure rendering from qdiff1d CSV outputs.

Four figure kinds, one per CSV schema produced by the solver CLI:

  heatmap   density.csv   (t,x,rho,theta)        space-time + snapshots
  collapse  collapse.csv  (lambda,h,w,tau_sing,z,y)  log-log collapse + z^-2 guide
  overlay   overlay.csv   (t,x,rho_gp,rho_kpz)   GP/KPZ panels (+ soliton file)
  scan      scan.csv      (kappa_rb, Re/Im of -1/ma x2, kappa_rb_star)

Inputs whose header does not match the expected schema are rejected.
Rendering is pinned (backend, size, fonts, colormap, no date metadata) so
identical inputs give byte-identical image files.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("heatmap", "collapse", "overlay", "scan")

SCHEMAS = {
    "heatmap": ["t", "x", "rho", "theta"],
    "collapse": ["lambda", "h", "w", "tau_sing", "z", "y"],
    "overlay": ["t", "x", "rho_gp", "rho_kpz"],
    "scan": ["kappa_rb", "re_inv_ma_sq", "im_inv_ma_sq",
             "re_inv_ma_num", "im_inv_ma_num", "kappa_rb_star"],
}
SOLITON_SCHEMA = ["x", "rho_gp", "rho_soliton"]

_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "qdiff1d-plots",
}


class SchemaError(ValueError):
    """CSV header does not match the expected schema for this figure kind."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    output: str
    snapshot_times: list[float] | None = None  # heatmap panels

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def read_csv_columns(path: str, schema: list[str]) -> dict[str, np.ndarray]:
    """Columns as float arrays (NaN for empty cells). Refuses files whose
    header differs from `schema`."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header")
        if header != schema:
            raise SchemaError(f"{path}: header {header} does not match expected {schema}")
        rows = [[float(v) if v != "" else np.nan for v in row] for row in reader]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=float)
    return {name: arr[:, i] for i, name in enumerate(schema)}


def _save(fig, output: str):
    meta = {"Date": None} if output.endswith(".svg") else {}
    fig.savefig(output, metadata=meta)
    plt.close(fig)


def _render_heatmap(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0], SCHEMAS["heatmap"])
    times = np.unique(cols["t"])
    xs = np.unique(cols["x"])
    if times.size < 2:
        raise SchemaError("heatmap needs at least two snapshot times")
    rho = cols["rho"].reshape(times.size, xs.size)

    panel_times = spec.snapshot_times
    if panel_times is None:
        panel_times = [times[times.size // 4], times[times.size // 2], times[-1]]
    picked = [times[np.argmin(np.abs(times - t))] for t in panel_times]

    fig = plt.figure(figsize=(6.4, 6.8))
    gs = fig.add_gridspec(2, len(picked), height_ratios=[2.2, 1.0], hspace=0.35)
    ax = fig.add_subplot(gs[0, :])
    mesh = ax.pcolormesh(xs, times, rho, cmap="viridis", vmin=0.0, shading="auto",
                         rasterized=True)
    for t in picked:
        ax.axhline(t, color="w", ls="--", lw=0.7)
    ax.set_xlabel(r"$x/\xi$")
    ax.set_ylabel(r"$t/\tau$")
    fig.colorbar(mesh, ax=ax, label=r"$\rho/\rho_0$")
    for i, t in enumerate(picked):
        axs = fig.add_subplot(gs[1, i])
        axs.plot(xs, rho[np.searchsorted(times, t)], color="C3", lw=0.9)
        axs.set_ylim(-0.05, None)
        axs.set_title(rf"$t = {t:g}\,\tau$")
        axs.set_xlabel(r"$x/\xi$")
        if i == 0:
            axs.set_ylabel(r"$\rho/\rho_0$")
    _save(fig, spec.output)


def _render_collapse(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0], SCHEMAS["collapse"])
    ok = ~np.isnan(cols["y"])
    if not ok.any():
        raise SchemaError("collapse input has no completed runs to plot")
    lam, z, y = cols["lambda"][ok], cols["z"][ok], cols["y"][ok]

    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for i, la in enumerate(np.unique(lam)):
        sel = lam == la
        ax.loglog(z[sel], y[sel], "o", ms=5, mfc="none", color=f"C{i}",
                  label=rf"$\lambda = {la:g}$")
    z_line = np.geomspace(z.min(), z.max(), 64)
    anchor = np.median(y * z**2)
    ax.loglog(z_line, anchor / z_line**2, "k-", lw=1, label=r"$z^{-2}$")
    ax.set_xlabel(r"$z = \lambda w h / \xi$")
    ax.set_ylabel(r"$\tau_{\mathrm{sing}}\,\xi / (\tau w)$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, spec.output)


def _render_overlay(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0], SCHEMAS["overlay"])
    soliton = None
    if len(spec.inputs) > 1:
        soliton = read_csv_columns(spec.inputs[1], SOLITON_SCHEMA)

    times = np.unique(cols["t"])
    shown = times if times.size <= 5 else times[np.linspace(0, times.size - 1, 5).astype(int)]
    n_panels = shown.size + (1 if soliton is not None else 0)
    fig, axes = plt.subplots(n_panels, 1, figsize=(6.0, 1.9 * n_panels),
                             sharex=False, squeeze=False)
    for i, t in enumerate(shown):
        axp = axes[i, 0]
        sel = cols["t"] == t
        axp.plot(cols["x"][sel], cols["rho_gp"][sel], "-", color="C3", lw=1.0,
                 label="condensate")
        if not np.isnan(cols["rho_kpz"][sel]).all():
            axp.plot(cols["x"][sel], cols["rho_kpz"][sel], "--", color="C0", lw=1.0,
                     label="phase equation")
        axp.set_title(rf"$t = {t:g}\,\tau$", fontsize=8)
        axp.set_ylabel(r"$\rho/\rho_0$")
        if i == 0:
            axp.legend(fontsize=7, loc="lower right")
    if soliton is not None:
        axp = axes[-1, 0]
        axp.plot(soliton["x"], soliton["rho_gp"], "-", color="C3", lw=1.0,
                 label="condensate")
        axp.plot(soliton["x"], soliton["rho_soliton"], "-", color="C2", lw=1.2,
                 label="sonic front")
        axp.set_ylabel(r"$\rho/\rho_0$")
        axp.legend(fontsize=7, loc="lower right")
    axes[-1, 0].set_xlabel(r"$x/\xi$")
    fig.tight_layout()
    _save(fig, spec.output)


def _render_scan(spec: FigureSpec):
    cols = read_csv_columns(spec.inputs[0], SCHEMAS["scan"])
    k = cols["kappa_rb"]
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.plot(k, cols["re_inv_ma_sq"], "-", color="C0", label=r"Re, square well")
    ax.plot(k, cols["im_inv_ma_sq"], "--", color="C1", label=r"Im, square well")
    ax.plot(k, cols["re_inv_ma_num"], ":", color="C3", label=r"Re, numeric")
    ax.plot(k, cols["im_inv_ma_num"], "-.", color="C2", label=r"Im, numeric")
    star = cols["kappa_rb_star"]
    star = star[~np.isnan(star)]
    if star.size:
        ax.axvline(star[0], color="k", lw=1.0, ls="--",
                   label=rf"$\mathrm{{Im}} = 0$ at $\kappa r_b = {star[0]:.2f}$")
    ax.axhline(0.0, color="k", lw=0.5, alpha=0.5)
    ax.set_xlabel(r"$\kappa r_b$")
    ax.set_ylabel(r"$-1/(m a)$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, spec.output)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "collapse": _render_collapse,
    "overlay": _render_overlay,
    "scan": _render_scan,
}


def render(spec: FigureSpec) -> str:
    """Render the figure described by `spec`; returns the output path."""
    for path in spec.inputs:
        if not os.path.exists(path):
            raise FileNotFoundError(path)
    with plt.rc_context(_RC):
        _RENDERERS[spec.kind](spec)
    return spec.output
