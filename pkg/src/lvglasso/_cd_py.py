"""Pure-Python coordinate-descent kernels (fallback for ``_cd_fast``).

Same signatures and in-place semantics as the compiled module.
"""
import numpy as np


def _kkt(target, pen, beta, g, skip):
    grad = g - target
    resid = np.where(
        beta > 0, np.abs(grad + pen),
        np.where(beta < 0, np.abs(grad - pen), np.maximum(np.abs(grad) - pen, 0.0)),
    )
    if skip >= 0:
        resid[skip] = 0.0
    return float(resid.max()) if resid.size else 0.0


def _cd(gram, target, pen, beta, g, skip, tol, max_iter):
    resid = _kkt(target, pen, beta, g, skip)
    if resid <= tol:
        return 0, resid
    d = beta.shape[0]
    order = [k for k in range(d) if k != skip]
    for it in range(1, max_iter + 1):
        for k in order:
            diag = gram[k, k]
            old = beta[k]
            z = target[k] - (g[k] - diag * old)
            new = np.sign(z) * max(abs(z) - pen[k], 0.0) / diag
            delta = new - old
            if delta != 0.0:
                beta[k] = new
                g += delta * gram[:, k]
        resid = _kkt(target, pen, beta, g, skip)
        if resid <= tol:
            return it, resid
    return max_iter, resid


def lasso_cd(gram, target, pen, beta, tol, max_iter):
    g = gram @ beta
    return _cd(gram, target, pen, beta, g, -1, tol, max_iter)


def glasso_sweep(W, M, V, B, inner_tol, inner_max_iter):
    d = V.shape[0]
    change = 0.0
    failures = 0
    for j in range(d):
        beta = B[:, j].copy()
        beta[j] = 0.0
        g = V @ beta
        _, resid = _cd(V, W[:, j], M[:, j], beta, g, j, inner_tol, inner_max_iter)
        if resid > inner_tol:
            failures += 1
        B[:, j] = beta
        g[j] = V[j, j]
        change = max(change, float(np.abs(V[j] - g).max()))
        V[j, :] = g
        V[:, j] = g
    return change, failures
