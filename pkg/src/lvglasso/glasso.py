"""Masked graphical lasso.

Minimizes ``-log det K + tr(W K) + sum_ij M_ij |K_ij|`` over positive
definite ``K`` by block coordinate descent on the working covariance
``V ~ K^-1``: each row of ``V`` is refreshed from a lasso problem whose
per-coordinate penalties are that row of ``M``. With ``diag(M) == 0`` the
penalty only touches off-diagonal entries, which is the case for every mask
built by :func:`lvglasso_mask`.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg

from ._backend import kernels

DEFAULT_TOL = 1e-6
DEFAULT_MAX_SWEEPS = 500
DEFAULT_INNER_MAX_ITER = 1000


def sym_matrix(a, name="matrix", atol=1e-10):
    """Return ``a`` as an exactly symmetric float array.

    Raises ``ValueError`` naming the worst offending entry when ``a`` is not
    square, not finite, or asymmetric beyond ``atol`` relative to its scale.
    """
    a = np.array(a, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise ValueError(f"{name} has a non-finite entry at ({i}, {j})")
    gap = np.abs(a - a.T)
    scale = max(1.0, float(np.abs(a).max()))
    if gap.max() > atol * scale:
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise ValueError(
            f"{name} is not symmetric: entry ({i}, {j}) = {a[i, j]!r} "
            f"but entry ({j}, {i}) = {a[j, i]!r}"
        )
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class PenaltyMask:
    """Symmetric, nonnegative per-entry penalty weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=2)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"penalty mask must be square, got shape {w.shape}")
        if not np.array_equal(w, w.T):
            i, j = np.argwhere(w != w.T)[0]
            raise ValueError(f"penalty mask is not symmetric at ({i}, {j})")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("penalty weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self):
        return self.weights.shape[0]


@dataclass
class GlassoSolution:
    precision: np.ndarray
    covariance: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    objective_trace: list = field(default_factory=list, repr=False)


class LassoResult(NamedTuple):
    coef: np.ndarray
    kkt_residual: float
    n_iter: int
    converged: bool


def neg_log_lik(K, W):
    """``-log det K + tr(W K)``; raises ``LinAlgError`` unless K is PD."""
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    if K.shape != W.shape:
        raise ValueError(f"shape mismatch: K {K.shape} vs W {W.shape}")
    c = linalg.cholesky(K, lower=True)
    logdet = 2.0 * np.sum(np.log(np.diag(c)))
    return float(-logdet + np.sum(W * K))


def soft_threshold(x, t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def glasso_objective(K, W, mask):
    M = _mask_weights(mask, np.shape(K)[0])
    return neg_log_lik(K, W) + float(np.sum(M * np.abs(K)))


def kkt_residual(K, W, mask, covariance=None):
    """Largest violation of the subgradient conditions at ``K``.

    Where ``K_ij == 0`` the condition is ``|W_ij - C_ij| <= M_ij``; elsewhere
    ``W_ij - C_ij + M_ij sign(K_ij) == 0``, with ``C = K^-1`` unless given.
    """
    K = np.asarray(K, dtype=float)
    M = _mask_weights(mask, K.shape[0])
    C = _inv_pd(K) if covariance is None else np.asarray(covariance, dtype=float)
    grad = np.asarray(W, dtype=float) - C
    resid = np.where(K != 0, np.abs(grad + M * np.sign(K)), np.maximum(np.abs(grad) - M, 0.0))
    return float(resid.max())


def lasso_cd(gram, target, penalties, tol=1e-7, max_iter=DEFAULT_INNER_MAX_ITER, beta0=None):
    """Minimize ``0.5 b'Gb - t'b + sum_j pen_j |b_j|`` by cyclic coordinate descent.

    Runs full passes over the coordinates until the KKT residual drops to
    ``tol``. On hitting ``max_iter`` the last iterate is returned with
    ``converged=False``.
    """
    G = np.ascontiguousarray(gram, dtype=float)
    t = np.ascontiguousarray(target, dtype=float)
    pen = np.ascontiguousarray(penalties, dtype=float)
    d = t.shape[0]
    if G.shape != (d, d) or pen.shape != (d,):
        raise ValueError("gram, target and penalties have inconsistent sizes")
    if np.any(pen < 0):
        raise ValueError("penalties must be nonnegative")
    if np.any(np.diag(G) <= 0):
        raise ValueError("gram must have a strictly positive diagonal")
    beta = np.zeros(d) if beta0 is None else np.array(beta0, dtype=float)
    n_iter, resid = kernels.lasso_cd(G, t, pen, beta, tol, max_iter)
    return LassoResult(beta, float(resid), int(n_iter), bool(resid <= tol))


def lvglasso_mask(p, r, lam):
    """Penalty ``lam`` on observed off-diagonal pairs; latent coordinates free."""
    if p < 1 or r < 0 or lam < 0:
        raise ValueError(f"need p >= 1, r >= 0, lambda >= 0; got {p}, {r}, {lam}")
    w = np.zeros((p + r, p + r))
    w[:p, :p] = lam
    np.fill_diagonal(w, 0.0)
    return PenaltyMask(w)


def glasso_masked(W, mask, tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS,
                  warm_start: Optional[GlassoSolution] = None,
                  inner_max_iter=DEFAULT_INNER_MAX_ITER):
    """Solve the masked graphical lasso for the symmetric matrix ``W``.

    Parameters
    ----------
    W : (d, d) array
        Symmetric with strictly positive diagonal (a sample or expected
        covariance).
    mask : PenaltyMask or (d, d) array
        Per-entry penalty weights.
    tol : float
        Sweeps stop once no entry of the working covariance moves by more
        than ``tol``. Row lasso problems are solved to ``tol / 10``.
    max_sweeps : int
    warm_start : GlassoSolution, optional
        Previous solution of the same dimension; its covariance and row
        coefficients seed the sweeps.

    Returns
    -------
    GlassoSolution
    """
    W = sym_matrix(W, "W")
    d = W.shape[0]
    M = _mask_weights(mask, d)
    if np.any(np.diag(W) <= 0):
        raise ValueError("W must have a strictly positive diagonal")

    diag_target = np.diag(W) + np.diag(M)
    off = ~np.eye(d, dtype=bool)
    if not np.any(W[off]):
        K = np.diag(1.0 / diag_target)
        return _finish(K, np.diag(diag_target), W, M, 0, True, [])
    if not np.any(M[off]):
        V = W + np.diag(np.diag(M))
        try:
            K = _inv_pd(V)
        except linalg.LinAlgError:
            raise linalg.LinAlgError(
                "unpenalized problem has no solution: W is not positive definite"
            ) from None
        return _finish(K, V, W, M, 0, True, [])

    V, B = _initial_state(W, M, diag_target, warm_start)
    inner_tol = tol / 10.0
    trace = []
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        change, failures = kernels.glasso_sweep(W, M, V, B, inner_tol, inner_max_iter)
        trace.append(_objective_or_inf(_precision_from(V, B), W, M))
        if not np.all(np.isfinite(V)):
            raise FloatingPointError("working covariance diverged; W is too ill-conditioned")
        if change <= tol and failures == 0:
            converged = True
            break
    K = _precision_from(V, B)
    return _finish(K, V, W, M, sweeps, converged, trace)


def _mask_weights(mask, d):
    if not isinstance(mask, PenaltyMask):
        mask = PenaltyMask(mask)
    if mask.dim != d:
        raise ValueError(f"mask has dimension {mask.dim}, expected {d}")
    return np.ascontiguousarray(mask.weights)


def _inv_pd(A):
    c, low = linalg.cho_factor(A, lower=True)
    inv = linalg.cho_solve((c, low), np.eye(A.shape[0]))
    return (inv + inv.T) / 2.0


def _is_pd(A):
    try:
        linalg.cholesky(A, lower=True)
    except linalg.LinAlgError:
        return False
    return True


def _initial_state(W, M, diag_target, warm):
    d = W.shape[0]
    if warm is not None and warm.precision.shape == (d, d):
        V = np.array(warm.covariance, dtype=float, order="C")
        np.fill_diagonal(V, diag_target)
        if _is_pd(V):
            K = warm.precision
            B = -K / np.diag(K)[None, :]
            np.fill_diagonal(B, 0.0)
            return V, np.ascontiguousarray(B)
    V = np.array(W, order="C")
    np.fill_diagonal(V, diag_target)
    shrink = 1.0
    while not _is_pd(V):
        shrink *= 0.9
        if shrink < 1e-8:
            V = np.diag(diag_target)
            break
        V = W * shrink
        np.fill_diagonal(V, diag_target)
        V = np.ascontiguousarray(V)
    return V, np.zeros((d, d))


def _precision_from(V, B):
    # K_jj = 1 / (V_jj - V_j. b_j), K_.j = -b_j K_jj
    kdiag = 1.0 / (np.diag(V) - np.einsum("ij,ij->j", V, B))
    K = -B * kdiag[None, :]
    np.fill_diagonal(K, kdiag)
    return (K + K.T) / 2.0


def _objective_or_inf(K, W, M):
    try:
        return neg_log_lik(K, W) + float(np.sum(M * np.abs(K)))
    except linalg.LinAlgError:
        return float("inf")


def _finish(K, V, W, M, sweeps, converged, trace):
    if not _is_pd(K):
        raise linalg.LinAlgError("glasso returned a precision that is not positive definite")
    obj = neg_log_lik(K, W) + float(np.sum(M * np.abs(K)))
    resid = kkt_residual(K, W, PenaltyMask(M))
    return GlassoSolution(K, V, obj, resid, sweeps, converged, trace)
