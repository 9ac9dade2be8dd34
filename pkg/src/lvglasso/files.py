"""Plain-text serialization: headerless matrix CSV, edge lists, ROC tables, SVG."""
import csv
import json
from pathlib import Path

import numpy as np

from .glasso import sym_matrix

FMT = "%.17g"


def write_matrix(path, A):
    np.savetxt(path, np.atleast_2d(A), fmt=FMT, delimiter=",")


def read_matrix(path):
    try:
        A = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: not a numeric CSV matrix ({exc})") from None
    return A


def read_sym_matrix(path):
    A = read_matrix(path)
    return sym_matrix(A, name=str(path))


def write_edges(path, edges):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for i, j in sorted(edges):
            w.writerow([i, j])


def read_edges(path):
    with open(path, newline="") as fh:
        return {(int(a), int(b)) for a, b in csv.reader(fh)}


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (np.ndarray, set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


ROC_COLUMNS = ("lambda", "tp", "fp", "tn", "fn", "tpr", "fpr")


def write_roc(path, series):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ROC_COLUMNS)
        for q in series.points:
            w.writerow([FMT % q.lam, q.tp, q.fp, q.tn, q.fn, FMT % q.tpr, FMT % q.fpr])


def write_roc_svg(path, curves, size=400, pad=40):
    """Minimal ROC plot: one polyline per named series, FPR on x, TPR on y."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    span = size - 2 * pad

    def xy(fpr, tpr):
        return f"{pad + fpr * span:.2f},{size - pad - tpr * span:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<polyline points="{xy(0, 1)} {xy(0, 0)} {xy(1, 0)}" fill="none" stroke="black"/>',
        f'<polyline points="{xy(0, 0)} {xy(1, 1)}" fill="none" stroke="#bbb" stroke-dasharray="4"/>',
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="12">FPR</text>',
        f'<text x="12" y="{size / 2}" font-size="12" transform="rotate(-90 12 {size / 2})">TPR</text>',
    ]
    for k, (name, series) in enumerate(curves.items()):
        pts = sorted({(0.0, 0.0), (1.0, 1.0), *((q.fpr, q.tpr) for q in series.points)})
        c = colors[k % len(colors)]
        out.append(f'<polyline points="{" ".join(xy(a, b) for a, b in pts)}" fill="none" stroke="{c}"/>')
        out.append(
            f'<text x="{pad + 10}" y="{pad + 16 * (k + 1)}" font-size="12" fill="{c}">'
            f"{name} (AUC {series.auc:.3f})</text>"
        )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
