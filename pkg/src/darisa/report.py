"""Deterministic CSV/JSON writers and figure rendering for sweep results.

CSV is UTF-8 with a header row and '.' decimals; float cells use the
shortest round-trip representation, so identical results are
byte-identical files.  JSON carries the full per-trial records including
optimizer traces.  Figures are PNG renderings of the same rows.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .experiments import SweepResult


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return repr(f)
    return str(v)


def write_csv(path, header: list[str], rows: list[list]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(c) for c in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return str(obj)
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _columns(result: SweepResult) -> dict[str, list]:
    cols = {name: [] for name in result.header}
    for row in result.rows:
        for name, cell in zip(result.header, row):
            cols[name].append(cell)
    return cols


def render_sweep_figure(result: SweepResult, path, title: str,
                        series: dict[str, str], xlabel: str, ylabel: str,
                        logy: bool = False) -> Path:
    """Line plot of selected columns (label -> column name) vs the axis."""
    from matplotlib import pyplot as plt

    from .plotstyle import apply_style
    apply_style()

    cols = _columns(result)
    x_raw = cols[result.header[0]]
    try:
        x = [float(v) for v in x_raw]
        tick_labels = None
    except (TypeError, ValueError):
        x = list(range(len(x_raw)))
        tick_labels = [str(v) for v in x_raw]

    fig, ax = plt.subplots()
    for label, col in series.items():
        if col not in cols:
            continue
        y = [float(v) if v is not None else math.nan for v in cols[col]]
        ax.plot(x, y, marker="o", label=label)
    if tick_labels is not None:
        ax.set_xticks(x)
        ax.set_xticklabels(tick_labels)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def render_trace_figure(record: dict, path, title: str) -> Path:
    """Bisection trace: candidate ratio vs subproblem value."""
    from matplotlib import pyplot as plt

    from .plotstyle import apply_style
    apply_style()

    trace = record.get("optimizer", {}).get("trace", [])
    fig, ax = plt.subplots()
    if trace:
        zs = [p[0] for p in trace]
        vs = [p[1] for p in trace]
        ax.plot(range(1, len(zs) + 1), vs, marker="o", label="subproblem value")
        ax2 = ax.twinx()
        ax2.plot(range(1, len(zs) + 1), zs, marker="s", color="tab:orange",
                 label="ratio candidate")
        ax2.set_ylabel("ratio candidate")
        ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("bisection step")
    ax.set_ylabel("subproblem value")
    ax.set_title(title)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path
