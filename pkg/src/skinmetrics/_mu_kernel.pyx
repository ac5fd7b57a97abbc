# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled multiplicative-update loop for rank-2, 3-channel factorizations.

One C pass per matrix product; shapes are fixed at (n, 2) x (2, 3) which is
all this package ever solves. Contract matches ``_mu_fallback.mu_iterate``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite, sqrt

BACKEND = "compiled"


def mu_iterate(
    double[:, ::1] V,
    double[:, ::1] W,
    double[:, ::1] H,
    int max_iter,
    double tol,
    double eps,
    double[::1] trace=None,
):
    """Minimize ||V - WH||_F in place; see the fallback module for the contract."""
    cdef Py_ssize_t n = V.shape[0]
    if V.shape[1] != 3 or W.shape[0] != n or W.shape[1] != 2 or H.shape[0] != 2 or H.shape[1] != 3:
        raise ValueError("expected V (n,3), W (n,2), H (2,3)")
    if trace is not None and trace.shape[0] < max_iter + 1:
        raise ValueError("trace array too short")

    cdef double[2][3] wtv
    cdef double[2][2] wtw
    cdef double[2][2] hht
    cdef double[3] hrow0
    cdef double[3] hrow1
    cdef double num0, num1, den0, den1, w0, w1, d
    cdef double res, prev, rel
    cdef Py_ssize_t i, j, k, it
    cdef bint converged = False
    cdef int last_it = 0

    res = _residual(V, W, H, n)
    if trace is not None:
        trace[0] = res

    for it in range(1, max_iter + 1):
        last_it = it

        # H <- H * (W^T V) / max(W^T W H, eps)
        for k in range(2):
            for j in range(3):
                wtv[k][j] = 0.0
            for j in range(2):
                wtw[k][j] = 0.0
        for i in range(n):
            w0 = W[i, 0]
            w1 = W[i, 1]
            for j in range(3):
                d = V[i, j]
                wtv[0][j] += w0 * d
                wtv[1][j] += w1 * d
            wtw[0][0] += w0 * w0
            wtw[0][1] += w0 * w1
            wtw[1][1] += w1 * w1
        wtw[1][0] = wtw[0][1]
        for k in range(2):
            for j in range(3):
                d = wtw[k][0] * H[0, j] + wtw[k][1] * H[1, j]
                if d < eps:
                    d = eps
                H[k, j] = H[k, j] * wtv[k][j] / d

        # W <- W * (V H^T) / max(W H H^T, eps)
        for j in range(3):
            hrow0[j] = H[0, j]
            hrow1[j] = H[1, j]
        hht[0][0] = hrow0[0] * hrow0[0] + hrow0[1] * hrow0[1] + hrow0[2] * hrow0[2]
        hht[0][1] = hrow0[0] * hrow1[0] + hrow0[1] * hrow1[1] + hrow0[2] * hrow1[2]
        hht[1][0] = hht[0][1]
        hht[1][1] = hrow1[0] * hrow1[0] + hrow1[1] * hrow1[1] + hrow1[2] * hrow1[2]
        for i in range(n):
            w0 = W[i, 0]
            w1 = W[i, 1]
            num0 = V[i, 0] * hrow0[0] + V[i, 1] * hrow0[1] + V[i, 2] * hrow0[2]
            num1 = V[i, 0] * hrow1[0] + V[i, 1] * hrow1[1] + V[i, 2] * hrow1[2]
            den0 = w0 * hht[0][0] + w1 * hht[1][0]
            den1 = w0 * hht[0][1] + w1 * hht[1][1]
            if den0 < eps:
                den0 = eps
            if den1 < eps:
                den1 = eps
            W[i, 0] = w0 * num0 / den0
            W[i, 1] = w1 * num1 / den1

        prev = res
        res = _residual(V, W, H, n)
        if trace is not None:
            trace[it] = res
        if not isfinite(res):
            raise ValueError(f"non-finite residual at iteration {it}", it)
        rel = (prev - res) / prev if prev > 0.0 else 0.0
        if rel < tol:
            converged = True
            break

    return last_it, converged, res


cdef inline double _residual(double[:, ::1] V, double[:, ::1] W, double[:, ::1] H,
                             Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef double d
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(3):
            d = V[i, j] - W[i, 0] * H[0, j] - W[i, 1] * H[1, j]
            acc += d * d
    return sqrt(acc)
