# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coordinate-descent kernels for the masked graphical lasso.

Both entry points share their signatures with ``lvglasso._cd_py``.
"""
from libc.math cimport fabs

import numpy as np


cdef inline double _soft(double x, double t) noexcept nogil:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


cdef double _kkt(const double[:, ::1] gram, const double[::1] target, const double[::1] pen,
                 double[::1] beta, double[::1] g, Py_ssize_t skip) noexcept nogil:
    cdef Py_ssize_t k, d = beta.shape[0]
    cdef double grad, r, worst = 0.0
    for k in range(d):
        if k == skip:
            continue
        grad = g[k] - target[k]
        if beta[k] > 0.0:
            r = fabs(grad + pen[k])
        elif beta[k] < 0.0:
            r = fabs(grad - pen[k])
        else:
            r = fabs(grad) - pen[k]
            if r < 0.0:
                r = 0.0
        if r > worst:
            worst = r
    return worst


cdef Py_ssize_t _cd(const double[:, ::1] gram, const double[::1] target, const double[::1] pen,
                    double[::1] beta, double[::1] g, Py_ssize_t skip,
                    double tol, Py_ssize_t max_iter, double* resid) noexcept nogil:
    # g must hold gram @ beta (ignoring the skipped coordinate) on entry
    cdef Py_ssize_t d = beta.shape[0]
    cdef Py_ssize_t it, k, i
    cdef double old, new, delta, diag
    resid[0] = _kkt(gram, target, pen, beta, g, skip)
    if resid[0] <= tol:
        return 0
    for it in range(1, max_iter + 1):
        for k in range(d):
            if k == skip:
                continue
            diag = gram[k, k]
            old = beta[k]
            new = _soft(target[k] - (g[k] - diag * old), pen[k]) / diag
            delta = new - old
            if delta != 0.0:
                beta[k] = new
                for i in range(d):
                    g[i] += delta * gram[i, k]
        resid[0] = _kkt(gram, target, pen, beta, g, skip)
        if resid[0] <= tol:
            return it
    return max_iter


def lasso_cd(const double[:, ::1] gram, const double[::1] target, const double[::1] pen,
             double[::1] beta, double tol, Py_ssize_t max_iter):
    """Cyclic coordinate descent, updating ``beta`` in place.

    Returns ``(n_passes, kkt_residual)``.
    """
    cdef Py_ssize_t d = beta.shape[0]
    cdef Py_ssize_t i, k, n
    cdef double resid = 0.0
    cdef double[::1] g = np.zeros(d)
    with nogil:
        for i in range(d):
            for k in range(d):
                g[i] += gram[i, k] * beta[k]
        n = _cd(gram, target, pen, beta, g, -1, tol, max_iter, &resid)
    return n, resid


def glasso_sweep(const double[:, ::1] W, const double[:, ::1] M, double[:, ::1] V,
                 double[:, ::1] B, double inner_tol, Py_ssize_t inner_max_iter):
    """One ascending-order pass over the rows of the working covariance ``V``.

    Column ``j`` of ``B`` carries the lasso coefficients of row ``j`` (with
    ``B[j, j] == 0``). ``V`` and ``B`` are updated in place. Returns
    ``(max_abs_change_in_V, n_inner_failures)``.
    """
    cdef Py_ssize_t d = V.shape[0]
    cdef Py_ssize_t j, i, k, n
    cdef Py_ssize_t failures = 0
    cdef double resid = 0.0, change = 0.0, diff
    cdef double[::1] beta = np.empty(d)
    cdef double[::1] target = np.empty(d)
    cdef double[::1] pen = np.empty(d)
    cdef double[::1] g = np.empty(d)
    with nogil:
        for j in range(d):
            for k in range(d):
                beta[k] = B[k, j]
                target[k] = W[k, j]
                pen[k] = M[k, j]
            beta[j] = 0.0
            for i in range(d):
                g[i] = 0.0
            for k in range(d):
                if k == j or beta[k] == 0.0:
                    continue
                for i in range(d):
                    g[i] += V[i, k] * beta[k]
            n = _cd(V, target, pen, beta, g, j, inner_tol, inner_max_iter, &resid)
            if resid > inner_tol:
                failures += 1
            for k in range(d):
                B[k, j] = beta[k]
                if k == j:
                    continue
                diff = fabs(V[j, k] - g[k])
                if diff > change:
                    change = diff
                V[j, k] = g[k]
                V[k, j] = g[k]
    return change, failures
