# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hull kernels; see ``_hullkernel_py`` for the reference semantics."""

import numpy as np
from libc.math cimport fabs, sqrt

cdef double EPS = 2.220446049250313e-16


cdef inline void _stage(const double[::1] V, Py_ssize_t i, Py_ssize_t j, Py_ssize_t m,
                        double s, double dd, double geo, double* sig, double* err) nogil:
    cdef double Vm = V[m]
    cdef double A = Vm - (V[i] + s * (V[j] - V[i]))
    sig[0] = A / dd
    err[0] = 8.0 * EPS * (fabs(Vm) + fabs(V[i]) + fabs(V[j])) / dd + geo * fabs(sig[0])


def pivot(const double[::1] X, const double[::1] T, const double[::1] G,
          const double[::1] Q, const double[::1] W, Py_ssize_t i, Py_ssize_t j,
          double scale):
    cdef Py_ssize_t n = X.shape[0]
    cdef double ex = X[j] - X[i]
    cdef double et = T[j] - T[i]
    cdef double L2 = ex * ex + et * et
    cdef double Ln = sqrt(L2)
    cdef double dtol = 1e-12 * Ln * scale
    cdef double[::1] S = np.empty(n)
    cdef double[::1] D = np.empty(n)
    cdef double[::1] GEO = np.empty(n)
    cdef char[::1] live = np.zeros(n, dtype=np.int8)
    cdef Py_ssize_t m, k, count = 0, last = -1
    cdef double rx, rt, d, rn, sig, err, sbest, ebest
    cdef int level
    cdef const double[::1] V

    with nogil:
        for m in range(n):
            rx = X[m] - X[i]
            rt = T[m] - T[i]
            d = ex * rt - et * rx
            if d > dtol:
                live[m] = 1
                count += 1
                last = m
                S[m] = (rx * ex + rt * et) / L2
                rn = sqrt(rx * rx + rt * rt)
                D[m] = d
                GEO[m] = 4.0 * EPS * Ln * rn / d
    if count == 0:
        return -1
    if count == 1:
        return last

    for level in range(2):
        if level == 0:
            V = G
        else:
            V = Q
        k = -1
        sbest = 0.0
        ebest = 0.0
        for m in range(n):
            if live[m]:
                _stage(V, i, j, m, S[m], D[m], GEO[m], &sig, &err)
                if k < 0 or sig < sbest:
                    k = m
                    sbest = sig
                    ebest = err
        count = 0
        for m in range(n):
            if live[m]:
                _stage(V, i, j, m, S[m], D[m], GEO[m], &sig, &err)
                if sig <= sbest + err + ebest:
                    count += 1
                    last = m
                else:
                    live[m] = 0
        if count == 1:
            return last

    k = -1
    for m in range(n):
        if live[m]:
            _stage(W, i, j, m, S[m], D[m], GEO[m], &sig, &err)
            if k < 0 or sig < sbest:
                k = m
                sbest = sig
    return k


def max_plane(const double[::1] A, const double[::1] B, const double[::1] C,
              const double[::1] qx, const double[::1] qt):
    cdef Py_ssize_t n = qx.shape[0], F = A.shape[0], q, f, a
    best_arr = np.empty(n)
    arg_arr = np.empty(n, dtype=np.intp)
    cdef double[::1] best = best_arr
    cdef Py_ssize_t[::1] arg = arg_arr
    cdef double x, t, v, b
    with nogil:
        for q in range(n):
            x = qx[q]
            t = qt[q]
            b = A[0] * x + B[0] * t + C[0]
            a = 0
            for f in range(1, F):
                v = A[f] * x + B[f] * t + C[f]
                if v > b:
                    b = v
                    a = f
            best[q] = b
            arg[q] = a
    return best_arr, arg_arr
