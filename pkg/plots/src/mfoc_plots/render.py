"""Offline figures from experiment CSV outputs.

Three figure kinds, one per experiment artifact:

- trajectory: angle-vs-time rollouts under the three gains (trajectory.csv)
- cost_curve: per-episode training cost, one curve per input file (costs.csv)
- sweep_bars: success/improvement percentages grouped by mode (sweep.csv)

Inputs are never modified, and nothing is written until every input has been
read and validated, so a schema failure leaves no partial output file.
"""

import csv
import os
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = ("trajectory", "cost_curve", "sweep_bars")


class PlotError(ValueError):
    """Bad job description or input CSV."""


@dataclass(frozen=True)
class PlotJob:
    """One figure to render.

    window is the moving-average length for cost curves (1 disables
    smoothing); the other kinds ignore it.
    """

    kind: str
    inputs: Tuple[str, ...]
    out: str
    window: int = 50

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind '{self.kind}' (choose from {KINDS})")
        if not self.inputs:
            raise PlotError("no input CSV given")
        if not isinstance(self.window, int) or self.window < 1:
            raise PlotError(f"smoothing window must be an integer >= 1, got {self.window!r}")
        for path in self.inputs:
            if not os.path.isfile(path):
                raise PlotError(f"input file not found: {path}")


def read_columns(path, numeric: Sequence[str], text: Sequence[str] = ()):
    """Load named columns from one CSV, strictly by header name.

    Returns {name: ndarray} for numeric columns and {name: list[str]} for
    text columns. Missing columns, missing fields, and non-numeric values
    raise PlotError naming the column.
    """
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames
        if header is None:
            raise PlotError(f"{path}: empty CSV")
        for col in tuple(numeric) + tuple(text):
            if col not in header:
                raise PlotError(f"{path}: missing column '{col}'")
        rows = list(reader)
    if not rows:
        raise PlotError(f"{path}: no data rows")
    out = {}
    for col in text:
        values = [r[col] for r in rows]
        if any(v is None for v in values):
            raise PlotError(f"{path}: missing value in column '{col}'")
        out[col] = values
    for col in numeric:
        try:
            out[col] = np.array([float(r[col]) for r in rows])
        except (TypeError, ValueError):
            raise PlotError(f"{path}: non-numeric value in column '{col}'")
    return out


def moving_average(x, window: int):
    """Trailing mean over the last `window` samples.

    Output has the same length as the input; early entries average the
    partial prefix, so no episodes are dropped from the plot.
    """
    if window < 1:
        raise PlotError(f"smoothing window must be >= 1, got {window}")
    x = np.asarray(x, dtype=float)
    if window == 1 or x.size == 0:
        return x.copy()
    csum = np.concatenate(([0.0], np.cumsum(x)))
    hi = np.arange(1, x.size + 1)
    lo = np.maximum(hi - window, 0)
    return (csum[hi] - csum[lo]) / (hi - lo)


def _labels(paths):
    # costs.csv recurs across run directories, so fall back to the parent
    # directory name when basenames collide
    stems = [os.path.splitext(os.path.basename(p))[0] for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    labels = [os.path.join(os.path.basename(os.path.dirname(os.path.abspath(p))), s)
              for p, s in zip(paths, stems)]
    if len(set(labels)) != len(labels):
        labels = [f"{lab} ({i})" for i, lab in enumerate(labels)]
    return labels


def _draw_trajectory(job, fig):
    if len(job.inputs) != 1:
        raise PlotError(f"trajectory takes exactly one CSV, got {len(job.inputs)}")
    data = read_columns(job.inputs[0], ("t", "psi_K0", "psi_K", "psi_Kstar"))
    ax = fig.add_subplot(111)
    for col, label in (("psi_K0", "K0"), ("psi_K", "K"), ("psi_Kstar", "K*")):
        ax.plot(data["t"], data[col], label=label)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("angle [rad]")
    ax.legend()
    ax.grid(alpha=0.3)


def _draw_cost_curve(job, fig):
    ax = fig.add_subplot(111)
    for path, label in zip(job.inputs, _labels(job.inputs)):
        data = read_columns(path, ("episode", "cost"))
        smooth = moving_average(data["cost"], job.window)
        name = f"{label} (avg {job.window})" if job.window > 1 else label
        line, = ax.plot(data["episode"], smooth, label=name)
        if job.window > 1:
            ax.plot(data["episode"], data["cost"],
                    color=line.get_color(), alpha=0.25, linewidth=0.7)
    ax.set_yscale("log")
    ax.set_xlabel("episode")
    ax.set_ylabel("cost")
    ax.legend()
    ax.grid(alpha=0.3, which="both")


def _draw_sweep_bars(job, fig):
    if len(job.inputs) != 1:
        raise PlotError(f"sweep_bars takes exactly one CSV, got {len(job.inputs)}")
    data = read_columns(job.inputs[0],
                        ("beta", "sigma2", "success_pct", "improvement_pct"),
                        text=("mode",))
    modes = list(dict.fromkeys(data["mode"]))
    cats = list(dict.fromkeys(zip(data["beta"], data["sigma2"])))
    many_sigma = len({s for _, s in cats}) > 1
    cells = {}
    for i, mode in enumerate(data["mode"]):
        key = (mode, data["beta"][i], data["sigma2"][i])
        cells[key] = (data["success_pct"][i], data["improvement_pct"][i])

    ticks = np.arange(len(cats))
    names = [f"beta={b:g}\nsigma2={s:g}" if many_sigma else f"beta={b:g}"
             for b, s in cats]
    width = 0.8 / len(modes)
    axes = fig.subplots(1, 2, sharey=True)
    for ax, metric, title in zip(axes, (0, 1), ("success", "improvement")):
        for j, mode in enumerate(modes):
            heights = [cells.get((mode,) + cat, (np.nan, np.nan))[metric]
                       for cat in cats]
            ax.bar(ticks + (j - (len(modes) - 1) / 2) * width, heights,
                   width=width, label=mode)
        ax.set_xticks(ticks)
        ax.set_xticklabels(names)
        ax.set_ylim(0, 105)
        ax.set_title(title)
        ax.grid(axis="y", alpha=0.3)
    axes[0].set_ylabel("% of runs")
    axes[1].legend()


_DRAW = {
    "trajectory": _draw_trajectory,
    "cost_curve": _draw_cost_curve,
    "sweep_bars": _draw_sweep_bars,
}

_FIGSIZE = {
    "trajectory": (7.0, 4.0),
    "cost_curve": (7.0, 4.5),
    "sweep_bars": (10.0, 4.0),
}


def render(job: PlotJob):
    """Render one figure and write it to job.out. Returns job.out."""
    fig = plt.figure(figsize=_FIGSIZE[job.kind])
    try:
        _DRAW[job.kind](job, fig)
        fig.tight_layout()
        fig.savefig(job.out, dpi=150)
    finally:
        plt.close(fig)
    return job.out
