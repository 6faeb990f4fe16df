"""Figure emission for runs: curve overlays and invariant panels.

Figures are rendered with matplotlib straight to SVG files next to the
delimited output.  The SVG hashsalt and date metadata are pinned so that
re-running a configuration reproduces identical files.
"""

from __future__ import annotations

import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "lagflow"

import matplotlib.pyplot as plt  # noqa: E402

from .geometry import TWO_PI  # noqa: E402

_SAVEKW = {"metadata": {"Date": None}, "format": "svg"}


def emit_curve_overlay(snapshots, path):
    """Snapshot curves color-graded by time, origin marked."""
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    if snapshots:
        tmin = snapshots[0][0]
        tmax = max(snapshots[-1][0], tmin + 1e-300)
        cmap = plt.get_cmap("viridis")
        for t, curve in snapshots:
            pts = np.vstack([curve.points, curve.points[:1]])
            ax.plot(pts[:, 0], pts[:, 1], lw=0.9,
                    color=cmap((t - tmin) / (tmax - tmin)))
    ax.plot([0.0], [0.0], marker="+", ms=10, color="crimson")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("profile curves (light = late)")
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
    return path


def emit_invariant_panels(record, topo0, report, path):
    """Area law panel (data vs predicted line) and the m(t) panel."""
    t = record.asarray("times")
    area = record.asarray("area")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(t, area, lw=1.4, label="A(z_t)")
    P = topo0.class_sum(record.n)
    if P is not None and len(t):
        ax1.plot(t, area[0] - TWO_PI * P * t, "--", lw=1.0, label="linear law")
    ax1.set_xlabel("t")
    ax1.set_ylabel("symplectic area")
    ax1.legend(loc="best", fontsize=8)
    if report is not None and len(t):
        a2 = record.asarray("a_proxy_sq")
        sel = t < report.T_est
        m = a2[sel] * (report.T_est - t[sel])
        ax2.plot(t[sel], m, lw=1.2)
        ax2.set_yscale("log")
        verdict = "type-1" if report.type1 else "type-2"
        ax2.set_title(f"m(t), verdict {verdict}", fontsize=9)
    ax2.set_xlabel("t")
    ax2.set_ylabel("sup|A|^2 (T-t) proxy")
    fig.tight_layout()
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
    return path


def emit_svg(record, topo0, report, snapshot_indices, outdir):
    """Write the standard pair of run figures; returns the file list."""
    snaps = [(record.times[i], record.snapshots[i][1]) for i in snapshot_indices]
    files = [
        emit_curve_overlay(snaps, os.path.join(outdir, "curves.svg")),
        emit_invariant_panels(record, topo0, report, os.path.join(outdir, "invariants.svg")),
    ]
    return files
