"""Shared matplotlib defaults for report figures."""

import matplotlib

matplotlib.use("Agg")

RC = {
    "figure.figsize": (7.0, 4.6),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    "lines.linewidth": 1.8,
    "lines.markersize": 5,
    "font.size": 10,
    "legend.fontsize": 9,
}


def apply_style():
    matplotlib.rcParams.update(RC)
