"""Headless figure rendering for experiment reports.

One PNG per report, written next to the CSV.  Exponent experiments get
log-log scatter plots with the fitted power law; time-series experiments
get the recorded diagnostics against time; iteration experiments get a
semilog residual plot.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import ExperimentReport


def _groups(rows, keys):
    seen = {}
    for row in rows:
        seen.setdefault(tuple(row.get(k) for k in keys), []).append(row)
    return seen


def _plot_loglog(ax, rows, xkey, ykey, label):
    x = np.array([r[xkey] for r in rows], dtype=float)
    y = np.array([r[ykey] for r in rows], dtype=float)
    ax.loglog(x, y, "o", label=label)
    slope = rows[0].get("fitted_slope")
    if slope is not None and np.all(x > 0) and np.all(y > 0):
        anchor = y[0] / x[0] ** slope
        xs = np.geomspace(x.min(), x.max(), 50)
        ax.loglog(xs, anchor * xs**slope, "--", lw=1,
                  label=f"{label} fit: {slope:+.3f}")


def render_report(report: ExperimentReport, path) -> Path:
    """Render ``report`` to a PNG at ``path``; returns the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    rows = report.rows
    kind = report.experiment
    if not rows:
        ax.text(0.5, 0.5, "no rows", ha="center", va="center")
    elif kind in ("l4-cone", "l4-embedding", "ball-l4", "bilinear"):
        for (pair, pname), grp in _groups(rows, ("sign_pair", "param_name")).items():
            _plot_loglog(ax, grp, "param_value", "trial_max_ratio",
                         f"{pname} [{pair}]")
        ax.set_xlabel("parameter value")
        ax.set_ylabel("max ratio over trials")
        ax.legend(fontsize=8)
    elif kind == "illposed-sweep":
        for (s,), grp in _groups(rows, ("s",)).items():
            _plot_loglog(ax, grp, "lambda", "ratio", f"s={s:g}")
        ax.set_xlabel("lambda")
        ax.set_ylabel("||L||_{H^s} / ||phi||_{H^s}^3")
        ax.legend(fontsize=8)
    elif kind == "convergence":
        _plot_loglog(ax, rows, "dt", "error", "final-state error")
        ax.set_xlabel("dt")
        ax.set_ylabel("error vs reference")
        ax.legend(fontsize=8)
    elif kind == "picard":
        its = [r["iteration"] for r in rows]
        res = [r["residual"] for r in rows]
        ax.semilogy(its, res, "o-")
        ax.set_xlabel("iteration")
        ax.set_ylabel("sup-in-time residual")
    elif kind == "simulate":
        times = np.array([r["time"] for r in rows], dtype=float)
        charge = np.array([r["charge"] for r in rows], dtype=float)
        drift = np.abs(charge - charge[0]) / max(charge[0], 1e-300)
        ax.semilogy(times, np.maximum(drift, 1e-18), label="relative charge drift")
        for key in rows[0]:
            if key.startswith("hs_"):
                vals = np.array([r[key] for r in rows], dtype=float)
                ax.semilogy(times, vals, label=f"H^{key[3:]} norm")
        ax.set_xlabel("time")
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, f"no renderer for {kind!r}", ha="center", va="center")
    ax.set_title(kind)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
