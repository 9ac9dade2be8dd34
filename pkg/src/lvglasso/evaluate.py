"""Support recovery scoring: confusion counts, ROC/AUC, closest-to-truth."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_ZERO_TOL = 1e-6


@dataclass(frozen=True)
class EdgeSet:
    p: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at {i}")
            i, j = min(i, j), max(i, j)
            if i < 0 or j >= self.p:
                raise ValueError(f"edge {(i, j)} out of range for p={self.p}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    def __len__(self):
        return len(self.edges)

    @property
    def n_pairs(self):
        return self.p * (self.p - 1) // 2


class Confusion(NamedTuple):
    tp: int
    fp: int
    tn: int
    fn: int


class RocPoint(NamedTuple):
    lam: float
    tp: int
    fp: int
    tn: int
    fn: int
    tpr: float
    fpr: float


@dataclass
class RocSeries:
    points: list
    auc: float


def support(S, zero_tol=DEFAULT_ZERO_TOL):
    S = np.asarray(S)
    iu, ju = np.triu_indices(S.shape[0], k=1)
    keep = np.abs(S[iu, ju]) > zero_tol
    return EdgeSet(S.shape[0], frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))


def confusion(est, truth):
    if est.p != truth.p:
        raise ValueError(f"edge sets over different vertex counts: {est.p} vs {truth.p}")
    tp = len(est.edges & truth.edges)
    fp = len(est.edges) - tp
    fn = len(truth.edges) - tp
    tn = est.n_pairs - tp - fp - fn
    return Confusion(tp, fp, tn, fn)


def _estimate(fit):
    # EmFit exposes S_hat; a bare GlassoSolution its precision
    return fit.S_hat if hasattr(fit, "S_hat") else fit.precision


def _lam(fit, default):
    return float(getattr(fit, "lam", default))


def roc_point(S, truth, lam=float("nan"), zero_tol=DEFAULT_ZERO_TOL):
    c = confusion(support(S, zero_tol), truth)
    pos, neg = c.tp + c.fn, c.fp + c.tn
    tpr = c.tp / pos if pos else 0.0
    fpr = c.fp / neg if neg else 0.0
    return RocPoint(lam, c.tp, c.fp, c.tn, c.fn, tpr, fpr)


def auc_from_points(points):
    """Trapezoidal area under (FPR, TPR) points plus the (0,0), (1,1) anchors."""
    xy = sorted({(0.0, 0.0), (1.0, 1.0), *((q.fpr, q.tpr) for q in points)})
    x = np.array([a for a, _ in xy])
    y = np.array([b for _, b in xy])
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def roc(path_fits, truth, zero_tol=DEFAULT_ZERO_TOL, lambdas=None):
    """ROC over a penalty path. ``None`` entries (failed fits) are skipped."""
    pts = []
    for k, f in enumerate(path_fits):
        if f is None:
            continue
        lam = lambdas[k] if lambdas is not None else _lam(f, float("nan"))
        pts.append(roc_point(_estimate(f), truth, lam, zero_tol))
    if not pts:
        raise ValueError("empty path")
    return RocSeries(pts, auc_from_points(pts))


def closest_to_truth(path_fits, truth, zero_tol=DEFAULT_ZERO_TOL, lambdas=None):
    """Index of the fit with the fewest wrong edges (FP + FN).

    Ties go to the larger penalty, i.e. the sparser model.
    """
    best, best_key = None, None
    for k, f in enumerate(path_fits):
        if f is None:
            continue
        c = confusion(support(_estimate(f), zero_tol), truth)
        lam = lambdas[k] if lambdas is not None else _lam(f, 0.0)
        key = (c.fp + c.fn, -lam)
        if best_key is None or key < best_key:
            best, best_key = k, key
    if best is None:
        raise ValueError("empty path")
    return best
