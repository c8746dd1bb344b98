"""Figure rendering for experiment curves.

Every CSV curve a report emits gets a PNG next to it: sweeps as log-log
ratio plots, search trajectories as step plots, case scatters for the
sandwich and polar corpora.  Rendering is headless (Agg) and strips the
PNG timestamp so repeated runs produce comparable artifacts.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .reports import Curve, Report  # noqa: E402
from .weights import is_divergent  # noqa: E402

__all__ = ["render_curves"]

_FIGSIZE = (6.0, 4.0)
_META = {"Software": "hardycone"}


def _finite_cols(rows, idx):
    xs, ys = [], []
    for row in rows:
        x, y = row[idx[0]], row[idx[1]]
        if x == "" or y == "" or y is None or is_divergent(y):
            continue
        x, y = float(x), float(y)
        if math.isfinite(x) and math.isfinite(y) and x > 0 and y > 0:
            xs.append(x)
            ys.append(y)
    return xs, ys


def _save(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)


def _plot_sweep(curve: Curve, path: Path):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    si = curve.header.index("s")
    ri = curve.header.index("ratio")
    xs, ys = _finite_cols(curve.rows, (si, ri))
    if xs:
        ax.loglog(xs, ys, ".", ms=3, color="tab:blue")
    ax.set_xlabel("s")
    ax.set_ylabel("lhs / rhs")
    ax.set_title("condition sweep ratio")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def _plot_trajectory(curve: Curve, path: Path):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if curve.rows:
        ev = [r[0] for r in curve.rows]
        best = [r[1] for r in curve.rows]
        ax.step(ev, best, where="post", color="tab:green")
        ax.set_xscale("log")
        if max(best) / max(min(best), 1e-300) > 50:
            ax.set_yscale("log")
    ax.set_xlabel("evaluations")
    ax.set_ylabel("best ratio")
    ax.set_title("search trajectory")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def _plot_descent(curve: Curve, path: Path):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    xs, ys = _finite_cols(curve.rows, (0, 1))
    if xs:
        ax.loglog(xs, ys, "o-", ms=3, color="tab:red")
    ax.set_xlabel("s")
    ax.set_ylabel("condition ratio")
    ax.set_title("violation descent")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def _plot_cases(curve: Curve, path: Path):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if "min_ratio" in curve.header:
        cases = [r[0] for r in curve.rows]
        lo = [r[curve.header.index("min_ratio")] for r in curve.rows]
        hi = [r[curve.header.index("max_ratio")] for r in curve.rows]
        ax.vlines(cases, lo, hi, color="tab:blue", alpha=0.7)
        ax.set_ylabel("pointwise ratio range")
        ax.set_title("fractional / average ratio per case")
    else:
        cases = [r[0] for r in curve.rows]
        gaps = [max(r[curve.header.index("relative_gap")], 1e-18) for r in curve.rows]
        ax.semilogy(cases, gaps, "o", color="tab:purple")
        ax.set_ylabel("relative gap")
        ax.set_title("polar reduction agreement")
    ax.set_xlabel("case")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_curves(report: Report, out_dir) -> list:
    """One PNG per curve, named after the curve, in out_dir."""
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    out = []
    for curve in report.curves:
        path = base / f"{curve.name}.png"
        if curve.name == "sweep":
            _plot_sweep(curve, path)
        elif curve.name == "trajectory":
            _plot_trajectory(curve, path)
        elif curve.name == "descent":
            _plot_descent(curve, path)
        else:
            _plot_cases(curve, path)
        out.append(path)
    return out
