"""Numpy fallback for the hull kernels.

Operation order mirrors ``_hullkernel.pyx`` term by term so both backends
produce bitwise-identical pivots and envelope values.
"""

import numpy as np

EPS = 2.220446049250313e-16
_CHUNK = 1 << 22


def pivot(X, T, G, Q, W, i, j, scale):
    """Index of the point that closes the lower-hull facet left of edge ``i -> j``.

    Candidates are points strictly left of the projected edge. The facet is the
    one whose supporting plane turns least about the lifted edge, compared
    lexicographically on the lifts ``G``, then ``Q``, then ``W``. Returns -1 if
    no point lies to the left (boundary edge).
    """
    ex = X[j] - X[i]
    et = T[j] - T[i]
    L2 = ex * ex + et * et
    Ln = np.sqrt(L2)
    rx = X - X[i]
    rt = T - T[i]
    d = ex * rt - et * rx
    dtol = 1e-12 * Ln * scale
    idx = np.flatnonzero(d > dtol)
    if idx.size == 0:
        return -1
    rxi = rx[idx]
    rti = rt[idx]
    dd = d[idx]
    s = (rxi * ex + rti * et) / L2
    rn = np.sqrt(rxi * rxi + rti * rti)
    geo = 4.0 * EPS * Ln * rn / dd

    def stage(V, sub):
        Vm = V[idx[sub]]
        A = Vm - (V[i] + s[sub] * (V[j] - V[i]))
        sig = A / dd[sub]
        err = 8.0 * EPS * (np.abs(Vm) + abs(V[i]) + abs(V[j])) / dd[sub] + geo[sub] * np.abs(sig)
        return sig, err

    sub = np.arange(idx.size)
    for V in (G, Q):
        sig, err = stage(V, sub)
        k = int(np.argmin(sig))
        tie = sig <= sig[k] + err + err[k]
        sub = sub[tie]
        if sub.size == 1:
            return int(idx[sub[0]])
    sig, _ = stage(W, sub)
    return int(idx[sub[int(np.argmin(sig))]])


def max_plane(A, B, C, qx, qt):
    """Per query, the maximum of ``A*x + B*t + C`` over planes and its first argmax."""
    n = qx.size
    best = np.empty(n)
    arg = np.empty(n, dtype=np.intp)
    step = max(1, _CHUNK // max(1, A.size))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        vals = A[None, :] * qx[lo:hi, None] + B[None, :] * qt[lo:hi, None] + C[None, :]
        a = np.argmax(vals, axis=1)
        arg[lo:hi] = a
        best[lo:hi] = vals[np.arange(hi - lo), a]
    return best, arg
