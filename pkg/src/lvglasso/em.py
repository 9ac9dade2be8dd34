"""Rank-constrained latent variable graphical lasso, fit by EM.

The observed precision is modelled as ``S - L`` with ``S`` sparse and
``rank(L) <= r``, by augmenting the ``p`` observed variables with ``r``
latent ones. Each EM iteration replaces the unobservable full-data sample
covariance by its conditional expectation (:func:`e_step`) and then solves a
masked graphical lasso on the ``(p + r)``-dimensional problem in which only
observed off-diagonal entries are penalized (:func:`m_step`).
"""
from dataclasses import dataclass, field, replace
from typing import Optional
import logging

import numpy as np
from scipy import linalg

from .glasso import (
    DEFAULT_MAX_SWEEPS, DEFAULT_TOL, GlassoSolution, glasso_masked,
    glasso_objective, lvglasso_mask, neg_log_lik, sym_matrix,
)

log = logging.getLogger(__name__)

INIT_SCHEMES = ("diagonal-regularized", "warm-start")


@dataclass
class PrecisionPartition:
    """Full precision ``K`` over ``p`` observed then ``r`` latent coordinates."""

    K: np.ndarray
    p: int
    r: int
    glasso: Optional[GlassoSolution] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.K = sym_matrix(self.K, "K")
        if self.K.shape[0] != self.p + self.r:
            raise ValueError(f"K has dimension {self.K.shape[0]}, expected p + r = {self.p + self.r}")

    @property
    def K_O(self):
        return self.K[:self.p, :self.p]

    @property
    def K_OH(self):
        return self.K[:self.p, self.p:]

    @property
    def K_H(self):
        return self.K[self.p:, self.p:]


@dataclass(frozen=True)
class EmConfig:
    r: int = 0
    lam: float = 0.0
    em_tol: float = 1e-5
    em_max_iter: int = 200
    glasso_tol: float = DEFAULT_TOL
    glasso_max_sweeps: int = DEFAULT_MAX_SWEEPS
    init_scheme: str = "diagonal-regularized"
    init_seed: int = 0
    ridge: float = 1e-2

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if not self.em_tol > 0:
            raise ValueError("em_tol must be > 0")
        if self.em_max_iter < 1:
            raise ValueError("em_max_iter must be >= 1")
        if not self.ridge > 0:
            raise ValueError("ridge must be > 0")
        if self.init_scheme not in INIT_SCHEMES:
            raise ValueError(f"init_scheme must be one of {INIT_SCHEMES}")


@dataclass
class EmFit:
    partition: PrecisionPartition
    S_hat: np.ndarray
    L_hat: np.ndarray
    observed_objective_trace: list
    iterations: int
    converged: bool
    lam: float = 0.0

    @property
    def objective(self):
        return self.observed_objective_trace[-1]

    @property
    def precision(self):
        return self.S_hat


def extract_SL(partition):
    """Return ``(S, L)`` with ``S = K_O`` and ``L = K_OH K_H^-1 K_HO``."""
    S = partition.K_O.copy()
    if partition.r == 0:
        return S, np.zeros_like(S)
    K_OH = partition.K_OH
    L = K_OH @ linalg.solve(partition.K_H, K_OH.T, assume_a="pos")
    return S, (L + L.T) / 2.0


def observed_objective(S, L, sigma_o_n, lam):
    """Penalized negative log-likelihood of the observed data at ``S - L``.

    Raises ``LinAlgError`` when ``S - L`` is not positive definite.
    """
    S = np.asarray(S, dtype=float)
    off = np.abs(S).sum() - np.abs(np.diag(S)).sum()
    return neg_log_lik(S - np.asarray(L, dtype=float), sigma_o_n) + lam * float(off)


def e_step(current, sigma_o_n):
    """Conditional expectation of the full-data sample covariance.

    With ``Sigma = K^-1`` partitioned into observed/latent blocks and
    ``A = Sigma_O^-1 Sigma_OH``::

        W_O  = sigma_o_n
        W_OH = sigma_o_n A
        W_H  = Sigma_H - Sigma_HO A + A' sigma_o_n A
    """
    p, r = current.p, current.r
    sigma_o_n = np.asarray(sigma_o_n, dtype=float)
    if sigma_o_n.shape != (p, p):
        raise ValueError(f"sigma_o_n has shape {sigma_o_n.shape}, expected {(p, p)}")
    if r == 0:
        return sigma_o_n.copy()
    Sigma = linalg.inv(current.K, overwrite_a=False)
    Sigma = (Sigma + Sigma.T) / 2.0
    S_O, S_OH, S_H = Sigma[:p, :p], Sigma[:p, p:], Sigma[p:, p:]
    A = linalg.cho_solve(linalg.cho_factor(S_O, lower=True), S_OH)
    W = np.empty_like(Sigma)
    W[:p, :p] = sigma_o_n
    W[:p, p:] = sigma_o_n @ A
    W[p:, :p] = W[:p, p:].T
    W[p:, p:] = S_H - S_OH.T @ A + A.T @ sigma_o_n @ A
    return (W + W.T) / 2.0


def m_step(W, cfg, warm=None):
    """Masked glasso on ``W`` with the observed off-diagonal pairs penalized."""
    p = W.shape[0] - cfg.r
    sol = glasso_masked(
        W, lvglasso_mask(p, cfg.r, cfg.lam), tol=cfg.glasso_tol,
        max_sweeps=cfg.glasso_max_sweeps, warm_start=warm,
    )
    if not sol.converged:
        log.warning("M-step glasso did not converge in %d sweeps", sol.iterations)
    return PrecisionPartition(sol.precision, p, cfg.r, glasso=sol)


def init_K(sigma_o_n, cfg):
    """Starting point for EM.

    The cross block gets small seeded noise: ``K_OH = 0`` is a fixed point
    of EM, so it must not be started there.
    """
    sigma_o_n = np.asarray(sigma_o_n, dtype=float)
    p, r = sigma_o_n.shape[0], cfg.r
    K = np.zeros((p + r, p + r))
    K[:p, :p] = linalg.inv(sigma_o_n + cfg.ridge * np.eye(p))
    K[p:, p:] = np.eye(r)
    if r:
        rng = np.random.default_rng(cfg.init_seed)
        cross = 0.01 * rng.standard_normal((p, r))
        K[:p, p:] = cross
        K[p:, :p] = cross.T
    K = (K + K.T) / 2.0
    bump = 0.0
    while not _is_pd(K):
        bump = max(2 * bump, 1e-3)
        K[np.diag_indices(p + r)] += bump
    return PrecisionPartition(K, p, r)


def fit(sigma_o_n, cfg, warm: Optional[EmFit] = None):
    """Fit the latent variable graphical lasso to an observed covariance."""
    sigma_o_n = _check_covariance(sigma_o_n)
    p = sigma_o_n.shape[0]
    mask = lvglasso_mask(p, cfg.r, cfg.lam)

    if cfg.r == 0:
        # no latent block: the E-step is the identity, one M-step is exact
        ws = warm.partition.glasso if warm is not None else None
        part = m_step(sigma_o_n, cfg, ws)
        S, L = extract_SL(part)
        obj = observed_objective(S, L, sigma_o_n, cfg.lam)
        return EmFit(part, S, L, [obj], 1, part.glasso.converged, cfg.lam)

    if warm is not None and warm.partition.K.shape == (p + cfg.r, p + cfg.r):
        part = warm.partition
    else:
        if cfg.init_scheme == "warm-start":
            log.info("no usable warm start supplied; using diagonal-regularized init")
        part = init_K(sigma_o_n, cfg)
    S, L = extract_SL(part)
    trace = [observed_objective(S, L, sigma_o_n, cfg.lam)]
    converged = False
    it = 0
    for it in range(1, cfg.em_max_iter + 1):
        W = e_step(part, sigma_o_n)
        new = m_step(W, cfg, part.glasso)
        q_old = glasso_objective(part.K, W, mask)
        if new.glasso.objective > q_old:
            # inexact M-step failed to lower Q; retry cold and tighter
            retry = replace(cfg, glasso_tol=cfg.glasso_tol / 100.0)
            new = m_step(W, retry, None)
            if new.glasso.objective > q_old:
                log.info("EM stalled at iteration %d: M-step cannot decrease Q", it)
                converged = True
                break
        part = new
        S, L = extract_SL(part)
        obj = observed_objective(S, L, sigma_o_n, cfg.lam)
        trace.append(obj)
        if abs(trace[-2] - obj) <= cfg.em_tol * (1.0 + abs(obj)):
            converged = part.glasso.converged
            break
    S, L = extract_SL(part)
    if not converged:
        log.warning("EM did not converge in %d iterations (lambda=%g)", it, cfg.lam)
    return EmFit(part, S, L, trace, it, converged, cfg.lam)


def lambda_path(sigma_o_n, lambdas, cfg):
    """Fit a strictly descending sequence of penalties with warm starts.

    Returns one entry per penalty; a penalty whose fit raised holds
    ``None`` and the path continues from the last good fit.
    """
    lambdas = [float(x) for x in lambdas]
    if any(x < 0 for x in lambdas):
        raise ValueError("penalties must be nonnegative")
    if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("penalties must be strictly descending")
    fits = []
    warm = None
    for lam in lambdas:
        try:
            f = fit(sigma_o_n, replace(cfg, lam=lam), warm)
        except (linalg.LinAlgError, FloatingPointError) as exc:
            log.error("fit failed at lambda=%g: %s", lam, exc)
            fits.append(None)
            continue
        fits.append(f)
        warm = f
    return fits


def default_lambda_grid(sigma_o_n, count=40):
    """Log-spaced grid from half the largest off-diagonal magnitude down 1000-fold."""
    s = np.abs(np.asarray(sigma_o_n, dtype=float))
    np.fill_diagonal(s, 0.0)
    top = 0.5 * float(s.max())
    if top <= 0:
        raise ValueError("covariance has no nonzero off-diagonal entries")
    return np.geomspace(top, 1e-3 * top, count)


def numerical_rank(A, rtol=1e-8):
    sv = linalg.svdvals(A)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def _is_pd(A):
    try:
        linalg.cholesky(A, lower=True)
    except linalg.LinAlgError:
        return False
    return True


def _check_covariance(sigma):
    sigma = sym_matrix(sigma, "sigma_o_n")
    if np.any(np.diag(sigma) <= 0):
        raise ValueError("covariance must have a strictly positive diagonal")
    ev = linalg.eigvalsh(sigma)
    if ev[0] < -1e-10 * float(np.trace(sigma)):
        raise ValueError(f"covariance is not positive semidefinite (min eigenvalue {ev[0]:.3g})")
    return sigma
