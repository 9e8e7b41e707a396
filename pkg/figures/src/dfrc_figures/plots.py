"""Render simulator CSV outputs into publication-style figures.

Two figure kinds are supported: convergence traces (one line per optimization
mode, worst-case radar SINR against the outer iteration) and parameter sweeps
(per-mode mean line with a one-standard-deviation band).  Inputs are the CSV
files the simulator CLI writes; this package never imports the simulator.

Every plotting call returns the numeric series it drew, so callers and tests
can verify the rendered data against the CSV without parsing image files.
Rendering is deterministic for a fixed input (fixed style sheet, fixed SVG
hash salt, no timestamps).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

STYLE_FILE = Path(__file__).with_name("dfrc.mplstyle")

MODE_STYLES = {
    "optimal_rhs_optimal_ris": {"color": "#c1272d", "marker": "o"},
    "optimal_rhs_random_ris": {"color": "#0000a7", "marker": "s"},
    "optimal_rhs_no_ris": {"color": "#008176", "marker": "^"},
    "random_rhs_optimal_ris": {"color": "#eecc16", "marker": "v"},
    "random_rhs_random_ris": {"color": "#b3b3b3", "marker": "d"},
    "random_rhs_no_ris": {"color": "#595959", "marker": "x"},
}
_FALLBACK_STYLE = {"color": "#7f7f7f", "marker": "."}


@dataclass
class FigureSpec:
    csv_path: Path
    kind: str  # "convergence" | "sweep"
    out_path: Path
    x_label: str = ""
    y_label: str = "Minimum radar SINR (dB)"
    mode_styles: dict = field(default_factory=lambda: dict(MODE_STYLES))

    def __post_init__(self):
        if self.kind not in ("convergence", "sweep"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def read_csv(path) -> tuple[list, list]:
    """Header row plus data rows; numeric cells become floats."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file, expected a CSV header")
    header, data = rows[0], rows[1:]

    def convert(cell):
        try:
            return float(cell)
        except ValueError:
            return cell

    return header, [[convert(c) for c in row] for row in data]


def _column(header, rows, name, path):
    if name not in header:
        raise ValueError(
            f"{path}: column {name!r} not found; header is {header}")
    idx = header.index(name)
    return [row[idx] for row in rows]


def _style_for(mode: str) -> dict:
    return MODE_STYLES.get(mode, _FALLBACK_STYLE)


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    # strip volatile metadata so identical inputs give identical bytes
    meta = {"Date": None} if out_path.suffix == ".svg" else {}
    fig.savefig(out_path, metadata=meta)
    plt.close(fig)


def plot_convergence(csv_path, out_path) -> dict:
    """One worst-case-SINR line per mode versus the outer iteration.

    Returns {mode: (iterations, sinr_db)} with the exact values drawn.
    """
    header, rows = read_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows to plot")
    modes = _column(header, rows, "mode", csv_path)
    iters = _column(header, rows, "outer_iter", csv_path)
    sinr = _column(header, rows, "min_radar_sinr_db", csv_path)

    series = {}
    for mode, it, val in zip(modes, iters, sinr):
        series.setdefault(mode, ([], []))
        series[mode][0].append(it)
        series[mode][1].append(val)

    with plt.style.context(str(STYLE_FILE)):
        fig, ax = plt.subplots()
        for mode, (xs, ys) in series.items():
            ax.plot(xs, ys, label=mode, **_style_for(mode))
        ax.set_xlabel("Outer iteration")
        ax.set_ylabel("Minimum radar SINR (dB)")
        ax.legend(loc="lower right", fontsize=7)
        _save(fig, out_path)
    return {mode: (np.asarray(xs), np.asarray(ys))
            for mode, (xs, ys) in series.items()}


def plot_sweep(csv_path, out_path, parameter: str | None = None) -> dict:
    """Mean line plus one-standard-deviation band per mode over the sweep.

    Returns {mode: (values, means, stddevs)} with the exact values drawn.
    """
    header, rows = read_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows to plot")
    params = _column(header, rows, "parameter", csv_path)
    if parameter is None:
        parameter = params[0]
    values = _column(header, rows, "value", csv_path)
    modes = _column(header, rows, "mode", csv_path)
    aggs = _column(header, rows, "aggregate", csv_path)
    sinr = _column(header, rows, "min_radar_sinr_db", csv_path)

    table: dict = {}
    for p, v, mode, agg, y in zip(params, values, modes, aggs, sinr):
        if p != parameter:
            continue
        table.setdefault(mode, {}).setdefault(v, {})[agg] = y
    if not table:
        raise ValueError(f"{csv_path}: no rows for parameter {parameter!r}")

    series = {}
    for mode, per_value in table.items():
        vals = sorted(per_value)
        means = [per_value[v].get("mean") for v in vals]
        stds = [per_value[v].get("stddev", 0.0) for v in vals]
        if any(m is None for m in means):
            raise ValueError(f"{csv_path}: missing mean aggregate for {mode!r}")
        series[mode] = (np.asarray(vals), np.asarray(means), np.asarray(stds))

    with plt.style.context(str(STYLE_FILE)):
        fig, ax = plt.subplots()
        for mode, (vals, means, stds) in series.items():
            style = _style_for(mode)
            ax.plot(vals, means, label=mode, **style)
            ax.fill_between(vals, means - stds, means + stds,
                            color=style["color"], alpha=0.15, linewidth=0)
        ax.set_xlabel(parameter)
        ax.set_ylabel("Minimum radar SINR (dB)")
        ax.legend(loc="best", fontsize=7)
        _save(fig, out_path)
    return series


def render(spec: FigureSpec) -> dict:
    if spec.kind == "convergence":
        return plot_convergence(spec.csv_path, spec.out_path)
    return plot_sweep(spec.csv_path, spec.out_path)
