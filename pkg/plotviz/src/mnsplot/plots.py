"""Figure rendering: energy-decay curves, log-log convergence plots, and
stirring snapshot grids."""

import math
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from . import readers

ERROR_LABELS = {
    "eu_L2": "velocity L2",
    "eu_H1": "velocity H1",
    "ep_L2": "pressure L2",
    "ew_L2": "angular L2",
    "ew_H1": "angular H1",
    "eq": "auxiliary scalar",
}


def _tau_label(path):
    m = re.search(r"tau([0-9.eE+-]+)", Path(path).stem)
    return f"tau={m.group(1)}" if m else Path(path).stem


def plot_energy(files, out, labels=None):
    """One energy curve per input series, raw values without smoothing."""
    if not files:
        raise readers.SchemaError("no energy files given")
    if labels is None:
        labels = [_tau_label(f) for f in files]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for path, label in zip(files, labels):
        data = readers.read_energy_csv(path)
        ax.plot(data["t"], data["E"], marker=".", markersize=3, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("discrete energy")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150, metadata={})
    plt.close(fig)
    return out


def fitted_slopes(data):
    """Observed convergence order per error column.

    For a table whose steps halve row to row, the end-to-end slope
    log(err_first/err_last) / log(tau_first/tau_last) equals the mean of the
    tabulated pairwise rates, so the annotated slopes agree with the CSV.
    """
    tau = data["tau"]
    out = {}
    for col in readers.ERROR_COLUMNS:
        err = data[col]
        if len(tau) < 2 or err[0] <= 0 or err[-1] <= 0:
            out[col] = None
        else:
            out[col] = math.log(err[0] / err[-1]) / math.log(tau[0] / tau[-1])
    return out


def plot_convergence(file, out):
    """Log-log error-versus-step plot with a slope-1 guide line; each legend
    entry carries the fitted slope when more than one row is available."""
    data = readers.read_table_csv(file)
    tau = data["tau"]
    slopes = fitted_slopes(data)
    fig, ax = plt.subplots(figsize=(6, 4.6))
    for col in readers.ERROR_COLUMNS:
        slope = slopes[col]
        label = ERROR_LABELS[col] if slope is None else \
            f"{ERROR_LABELS[col]} (slope {slope:.2f})"
        ax.loglog(tau, data[col], marker="o", label=label)
    if len(tau) > 1:
        # slope-1 guide anchored at the largest-step velocity error
        ref = data["eu_L2"][0] * tau / tau[0]
        ax.loglog(tau, ref, "k--", linewidth=1, label="slope 1")
    ax.set_xlabel("time step")
    ax.set_ylabel("final-time error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150, metadata={})
    plt.close(fig)
    return out


def plot_stirring(files, out):
    """Heatmap per snapshot with a color scale fixed to [0, 1], laid out on
    a near-square grid (3x3 for nine snapshots)."""
    if not files:
        raise readers.SchemaError("no snapshot files given")
    frames = []
    for path in files:
        points, triangles, scalars = readers.read_vtk(path)
        if not scalars:
            raise readers.SchemaError(f"{path}: no scalar field in snapshot")
        name = next(iter(scalars))
        frames.append((Path(path).stem, points, triangles, scalars[name]))
    ncol = math.ceil(math.sqrt(len(frames)))
    nrow = math.ceil(len(frames) / ncol)
    fig, axes = plt.subplots(nrow, ncol, figsize=(3 * ncol, 3 * nrow),
                             squeeze=False)
    im = None
    for ax, (title, points, triangles, vals) in zip(axes.ravel(), frames):
        tri = mtri.Triangulation(points[:, 0], points[:, 1], triangles)
        im = ax.tripcolor(tri, vals, shading="gouraud", vmin=0.0, vmax=1.0)
        ax.set_title(title, fontsize=9)
        ax.set_aspect("equal")
        ax.set_xticks([])
        ax.set_yticks([])
    for ax in axes.ravel()[len(frames):]:
        ax.axis("off")
    fig.colorbar(im, ax=axes, shrink=0.85)
    fig.savefig(out, dpi=150, metadata={})
    plt.close(fig)
    return out
