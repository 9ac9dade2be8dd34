"""Independent reference computations used by the tests.

None of these call into the solver paths they check.
"""
import math

import numpy as np


def masked_objective_batch(Ks, W, M):
    """Objective for a stack of candidate precisions; inf where not PD."""
    ev = np.linalg.eigvalsh(Ks)
    ok = ev.min(axis=-1) > 0
    logdet = np.where(ok, np.sum(np.log(np.where(ok[:, None], ev, 1.0)), axis=-1), 0.0)
    val = -logdet + np.einsum("ij,nji->n", W, Ks) + np.einsum("ij,nij->n", M, np.abs(Ks))
    return np.where(ok, val, np.inf)


def grid_min_glasso(K0, W, M, step=1e-3, half=3):
    """Exhaustive grid over the upper triangle of K around ``K0``."""
    d = K0.shape[0]
    iu = np.triu_indices(d)
    offsets = np.arange(-half, half + 1) * step
    grids = np.meshgrid(*[K0[i, j] + offsets for i, j in zip(*iu)], indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=1)
    Ks = np.zeros((flat.shape[0], d, d))
    for k, (i, j) in enumerate(zip(*iu)):
        Ks[:, i, j] = flat[:, k]
        Ks[:, j, i] = flat[:, k]
    vals = masked_objective_batch(Ks, W, M)
    best = int(np.argmin(vals))
    return float(vals[best]), Ks[best]


def lasso_objective(beta, gram, target, pen):
    beta = np.atleast_2d(beta)
    quad = 0.5 * np.einsum("ni,ij,nj->n", beta, gram, beta)
    return quad - beta @ target + np.abs(beta) @ pen


def grid_min_lasso(center, gram, target, pen, step=1e-3, half=10):
    offsets = np.arange(-half, half + 1) * step
    grids = np.meshgrid(*[c + offsets for c in center], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = lasso_objective(pts, gram, target, pen)
    k = int(np.argmin(vals))
    return float(vals[k]), pts[k]


def lasso_kkt(beta, gram, target, pen):
    grad = gram @ beta - target
    r = np.where(beta != 0, np.abs(grad + pen * np.sign(beta)), np.maximum(np.abs(grad) - pen, 0))
    return float(r.max())


def naive_edge_sweep(p, rng):
    """Straightforward re-implementation of the degree-capped geometric sweep."""
    pts = [(rng.uniform(), rng.uniform()) for _ in range(p)]
    deg = [0] * p
    count = 0
    for i in range(p):
        for j in range(i + 1, p):
            if deg[i] == 4 or deg[j] == 4:
                continue
            dist = math.sqrt((pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2)
            prob = 2 * math.exp(-(dist * math.sqrt(p)) ** 2 / 2) / math.sqrt(2 * math.pi)
            if rng.uniform() < prob:
                deg[i] += 1
                deg[j] += 1
                count += 1
    return count


def trapezoid_auc(fpr_tpr):
    pts = sorted(set(fpr_tpr) | {(0.0, 0.0), (1.0, 1.0)})
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        area += (x1 - x0) * (y0 + y1) / 2
    return area


def conditional_cov_mc(K, sigma_o_n_data, draws, rng):
    """Monte Carlo estimate of E[Sigma_H^n | X_O] by sampling X_H | X_O.

    ``sigma_o_n_data`` is the (n, p) observed data matrix; ``Sigma_H^n`` uses
    the same divisor-n second-moment convention as the observed block.
    """
    X = sigma_o_n_data
    n, p = X.shape
    Sigma = np.linalg.inv(K)
    S_O, S_OH, S_H = Sigma[:p, :p], Sigma[:p, p:], Sigma[p:, p:]
    coef = np.linalg.solve(S_O, S_OH)          # p x r
    cond_cov = S_H - S_OH.T @ coef
    chol = np.linalg.cholesky(cond_cov)
    mean = X @ coef                            # n x r
    r = S_H.shape[0]
    acc = np.zeros((r, r))
    reps = draws // n
    for _ in range(reps):
        XH = mean + rng.standard_normal((n, r)) @ chol.T
        acc += XH.T @ XH / n
    return acc / reps
