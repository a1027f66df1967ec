# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: tree split search and batch tree traversal.

Arithmetic mirrors shapeqc._kernels._pure exactly (integer counts and
left-to-right prefix sums, same scan order), so both backends return
bit-identical results; this one is just faster.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef double _HESS_FLOOR = 1e-12


def gini_best_split(values, labels):
    """See shapeqc._kernels._pure.gini_best_split."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t k = values.shape[1]
    cdef long long total1 = int(labels.sum())
    cdef long long total0 = n - total1
    cdef Py_ssize_t best_j = -1
    cdef double best_thr = 0.0
    cdef double best_score = -np.inf
    cdef Py_ssize_t j, i
    cdef long long c1, n_left, c0_left, c1_right, c0_right, n_right
    cdef double score
    cdef double[::1] sv
    cdef long long[::1] lab
    for j in range(k):
        col = np.ascontiguousarray(values[:, j])
        order = np.argsort(col, kind="stable")
        sv = col[order]
        lab = np.ascontiguousarray(labels[order], dtype=np.int64)
        c1 = 0
        for i in range(n - 1):
            c1 += lab[i]
            if sv[i] < sv[i + 1]:
                n_left = i + 1
                c0_left = n_left - c1
                n_right = n - n_left
                c1_right = total1 - c1
                c0_right = total0 - c0_left
                score = (<double>(c0_left * c0_left + c1 * c1)) / (<double>n_left) + \
                        (<double>(c0_right * c0_right + c1_right * c1_right)) / (<double>n_right)
                if score > best_score:
                    best_j = j
                    best_thr = (sv[i] + sv[i + 1]) / 2.0
                    best_score = score
    return int(best_j), best_thr, best_score


def newton_best_split(values, g, h):
    """See shapeqc._kernels._pure.newton_best_split."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t k = values.shape[1]
    cdef Py_ssize_t best_j = -1
    cdef double best_thr = 0.0
    cdef double best_score = -np.inf
    cdef Py_ssize_t j, i
    cdef double gl, hl, g_tot, h_tot, gL, hL, gR, hR, score
    cdef double[::1] sv, gs, hs, gcum, hcum
    for j in range(k):
        col = np.ascontiguousarray(values[:, j])
        order = np.argsort(col, kind="stable")
        sv = col[order]
        gs = np.ascontiguousarray(g[order])
        hs = np.ascontiguousarray(h[order])
        g_tot = 0.0
        h_tot = 0.0
        for i in range(n):
            g_tot += gs[i]
            h_tot += hs[i]
        gl = 0.0
        hl = 0.0
        for i in range(n - 1):
            gl += gs[i]
            hl += hs[i]
            if sv[i] < sv[i + 1]:
                gL = gl
                hL = hl if hl > _HESS_FLOOR else _HESS_FLOOR
                gR = g_tot - gl
                hR = h_tot - hl
                if hR < _HESS_FLOOR:
                    hR = _HESS_FLOOR
                score = gL * gL / hL + gR * gR / hR
                if score > best_score:
                    best_j = j
                    best_thr = (sv[i] + sv[i + 1]) / 2.0
                    best_score = score
    return int(best_j), best_thr, best_score


def tree_apply(feat, thr, left, right, X):
    """See shapeqc._kernels._pure.tree_apply."""
    cdef const int[::1] feat_v = np.ascontiguousarray(feat, dtype=np.int32)
    cdef const double[::1] thr_v = np.ascontiguousarray(thr, dtype=np.float64)
    cdef const int[::1] left_v = np.ascontiguousarray(left, dtype=np.int32)
    cdef const int[::1] right_v = np.ascontiguousarray(right, dtype=np.int32)
    cdef const double[:, :] X_v = X
    cdef Py_ssize_t n = X.shape[0]
    out = np.empty(n, dtype=np.int32)
    cdef int[::1] out_v = out
    cdef Py_ssize_t i
    cdef int nd, f
    for i in range(n):
        nd = 0
        f = feat_v[nd]
        while f >= 0:
            if X_v[i, f] <= thr_v[nd]:
                nd = left_v[nd]
            else:
                nd = right_v[nd]
            f = feat_v[nd]
        out_v[i] = nd
    return out
