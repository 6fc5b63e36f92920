"""Renderers for the six figure kinds.

Each render_* takes input path(s) plus styling keywords, writes one image,
and returns a small summary dict (including the plotted segment count where
that is meaningful). Pure functions of their input files; timestamps are off
unless requested.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schemas import SchemaError, floats, read_meta, read_table  # noqa: E402

FIGURE_IDS = ("regions", "boundary", "staircase", "timeseries", "phaseplane",
              "comparison")


@dataclass
class FigureSpec:
    figure_id: str
    inputs: list
    out: str
    style: dict = field(default_factory=dict)


def _new_fig(style):
    fig, ax = plt.subplots(figsize=style.get("figsize", (7.0, 4.5)),
                           dpi=style.get("dpi", 130))
    return fig, ax


def _finish(fig, ax, out, style, summary):
    if style.get("title"):
        ax.set_title(style["title"])
    if style.get("timestamp"):
        fig.text(0.99, 0.01, time.strftime("%Y-%m-%d %H:%M:%S"),
                 ha="right", fontsize=6, color="0.5")
    fig.tight_layout()
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    summary["out"] = str(out)
    return summary


def _split_runs(tau: np.ndarray, gap: float, split_at=()) -> list:
    """Contiguous runs, split at tau gaps and at the given join locations."""
    if len(tau) == 0:
        return []
    runs, start = [], 0
    for i in range(1, len(tau)):
        crosses = any(tau[i - 1] < s <= tau[i] for s in split_at)
        if tau[i] - tau[i - 1] > gap or crosses:
            runs.append(slice(start, i))
            start = i
    runs.append(slice(start, len(tau)))
    return runs


# ---------------------------------------------------------------------------

def render_regions(region_csv, out, **style):
    cols = read_table(region_csv, "region")
    th = floats(cols, "theta")
    c = floats(cols, "c")
    in_r = floats(cols, "in_R").astype(bool)
    in_s = floats(cols, "in_S").astype(bool)
    sub = np.array(cols["subregion"])
    fig, ax = _new_fig(style)
    ax.scatter(th[in_r], c[in_r], s=4, c="#9ecfe8", marker="s", label="orbit exists (low phase)")
    ax.scatter(th[in_s], c[in_s], s=4, c="none", edgecolors="#e8a23d",
               linewidths=0.4, marker="o", label="high-phase orbit coexists")
    shades = {"II": "#7b5cc4", "I": "#4b2991", "III": "#c23b3b"}
    n_sub = 0
    for name, color in shades.items():
        m = sub == name
        if m.any():
            n_sub += 1
            ax.scatter(th[m], c[m], s=5, c=color, marker="s", label=f"subregion {name}")
    ax.set_xlabel("fractional delay")
    ax.set_ylabel("forcing amplitude c")
    ax.legend(loc="upper right", fontsize=7, markerscale=2)
    return _finish(fig, ax, out, style,
                   {"n_points": len(th), "subregions": n_sub})


def render_boundary(curve_csv, out, **style):
    cols = read_table(curve_csv, "curve")
    cid = np.array(cols["curve_id"])
    tau = floats(cols, "tau")
    c = floats(cols, "c")
    fig, ax = _new_fig(style)
    palette = {"SN": "#2a7de1", "BC_minus": "#d64fa8", "BC_plus": "#d64fa8",
               "T": "#d62728", "B_vertical": "#555555"}
    mv = cid == "B_vertical"
    joins = np.unique(tau[mv])    # the CSV documents the vertical joins
    n_segments = 0
    labeled = set()
    for name in ("SN", "BC_minus", "BC_plus", "T"):
        m = cid == name
        if not m.any():
            continue
        t_sel, c_sel = tau[m], c[m]
        order = np.argsort(t_sel)
        t_sel, c_sel = t_sel[order], c_sel[order]
        step = np.median(np.diff(t_sel)) if len(t_sel) > 1 else 1.0
        for run in _split_runs(t_sel, max(4.0 * step, 1e-4), split_at=joins):
            ax.plot(t_sel[run], c_sel[run], color=palette[name], lw=1.6,
                    label=None if name in labeled else name)
            labeled.add(name)
            n_segments += 1
    for tj in joins:
        pair = c[mv & (tau == tj)]
        ax.plot([tj, tj], [pair.min(), pair.max()], color=palette["B_vertical"],
                lw=1.2, ls="-")
        n_segments += 1
    ax.set_xlabel("delay")
    ax.set_ylabel("forcing amplitude c")
    ax.legend(fontsize=7)
    return _finish(fig, ax, out, style, {"segments": n_segments})


def render_staircase(curve_csv, out, **style):
    cols = read_table(curve_csv, "curve")
    tau = floats(cols, "tau")
    rho = floats(cols, "rho")
    keep = ~np.isnan(rho)
    if not keep.any():
        raise SchemaError(f"{curve_csv}: no rotation numbers to plot")
    tau, rho = tau[keep], rho[keep]
    order = np.argsort(tau)
    tau, rho = tau[order], rho[order]
    fig, ax = _new_fig(style)
    # plateaus: split wherever the rotation number jumps
    jumps = np.nonzero(np.abs(np.diff(rho)) > 1e-12)[0]
    edges = np.concatenate([[0], jumps + 1, [len(rho)]])
    n_steps = 0
    for a, b in zip(edges, edges[1:]):
        if b > a:
            ax.plot(tau[a:b], rho[a:b], color="#d62728", lw=1.8)
            n_steps += 1
    ax.set_yscale("log")
    ax.set_xlabel("delay")
    ax.set_ylabel("rotation number")
    return _finish(fig, ax, out, style, {"segments": n_steps})


def render_timeseries(traj_csv, out, **style):
    cols = read_table(traj_csv, "trajectory")
    t = floats(cols, "t")
    h = floats(cols, "h")
    fig, ax = _new_fig(style)
    ax.plot(t, h, lw=0.9, color="#2a7de1")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel("time")
    ax.set_ylabel("h(t)")
    return _finish(fig, ax, out, style, {"n_points": len(t)})


def render_phaseplane(traj_csv, out, tau=None, meta=None, **style):
    cols = read_table(traj_csv, "trajectory")
    t = floats(cols, "t")
    h = floats(cols, "h")
    if tau is None:
        if meta is None:
            raise SchemaError("phaseplane needs --tau or the run's meta JSON")
        tau = float(read_meta(meta)["config"]["tau"])
    keep = t >= t[0] + tau
    h_del = np.interp(t[keep] - tau, t, h)
    fig, ax = _new_fig(style)
    ax.plot(h[keep], h_del, lw=0.8, color="#2a7de1")
    ax.set_xlabel("h(t)")
    ax.set_ylabel("h(t - tau)")
    ax.set_aspect("equal", adjustable="datalim")
    return _finish(fig, ax, out, style, {"tau": tau, "n_points": int(keep.sum())})


def render_comparison(comparison_csv, out, boundary_csv=None, **style):
    cols = read_table(comparison_csv, "comparison")
    tau = floats(cols, "tau")
    c_smooth = floats(cols, "c_smooth")
    c_ps = floats(cols, "c_psgzt")
    kappa = floats(cols, "kappa")
    fig, ax = _new_fig(style)
    n_segments = 0
    if boundary_csv is not None:
        bcols = read_table(boundary_csv, "curve")
        btau = floats(bcols, "tau")
        bc = floats(bcols, "c")
        order = np.argsort(btau)
        ax.plot(btau[order], bc[order], color="0.8", lw=1.0,
                label="relay-limit boundary")
        n_segments += 1
    for kap in np.unique(kappa):
        m = kappa == kap
        ax.plot(tau[m], c_smooth[m], "o", ms=5, label=f"smooth model, kappa={kap:g}")
        n_segments += 1
    ax.plot(tau, c_ps, "x", ms=7, color="#d62728", label="closed form")
    ax.set_xlabel("delay")
    ax.set_ylabel("boundary forcing amplitude")
    ax.legend(fontsize=7)
    return _finish(fig, ax, out, style,
                   {"n_points": len(tau), "series": n_segments})


RENDERERS = {
    "regions": render_regions,
    "boundary": render_boundary,
    "staircase": render_staircase,
    "timeseries": render_timeseries,
    "phaseplane": render_phaseplane,
    "comparison": render_comparison,
}


def render(spec: FigureSpec) -> dict:
    if spec.figure_id not in RENDERERS:
        raise SchemaError(f"unknown figure_id {spec.figure_id}; "
                          f"valid: {FIGURE_IDS}")
    return RENDERERS[spec.figure_id](*spec.inputs, out=spec.out, **spec.style)
