"""Pure numpy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable.
Both backends must return bit-identical results: split scores are built from
integer label counts or sequential prefix sums (``np.cumsum`` accumulates
left-to-right, matching the C loops), and candidate scans share one fixed
order: features left to right, thresholds ascending, strict improvement.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_HESS_FLOOR = 1e-12


def gini_best_split(values: np.ndarray, labels: np.ndarray):
    """Best binary-Gini split over the candidate feature columns.

    Parameters
    ----------
    values : (n, k) float64
        Node rows restricted to the k candidate features.
    labels : (n,) int64
        Binary class labels (0/1).

    Returns
    -------
    (j, threshold, score)
        Column index into ``values``, midpoint threshold, and the maximized
        score ``(cL0^2 + cL1^2)/nL + (cR0^2 + cR1^2)/nR``. ``j`` is -1 when
        no column has two distinct values.
    """
    n, k = values.shape
    total1 = int(labels.sum())
    total0 = n - total1
    best_j, best_thr, best_score = -1, 0.0, -np.inf
    for j in range(k):
        col = values[:, j]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        c1 = np.cumsum(labels[order])
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        if cut.size == 0:
            continue
        n_left = cut + 1
        c1_left = c1[cut]
        c0_left = n_left - c1_left
        n_right = n - n_left
        c1_right = total1 - c1_left
        c0_right = total0 - c0_left
        score = (c0_left * c0_left + c1_left * c1_left) / n_left + (
            c0_right * c0_right + c1_right * c1_right
        ) / n_right
        i = int(np.argmax(score))
        if score[i] > best_score:
            b = cut[i]
            best_j, best_thr, best_score = j, (sv[b] + sv[b + 1]) / 2.0, float(score[i])
    return best_j, best_thr, best_score


def newton_best_split(values: np.ndarray, g: np.ndarray, h: np.ndarray):
    """Best split maximizing the Newton gain ``GL^2/HL + GR^2/HR``.

    ``g``/``h`` are per-row gradient and hessian of the boosting loss.
    Hessian sums are floored at 1e-12. Same scan order and return convention
    as :func:`gini_best_split`.
    """
    n, k = values.shape
    best_j, best_thr, best_score = -1, 0.0, -np.inf
    for j in range(k):
        col = values[:, j]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        gl = np.cumsum(g[order])
        hl = np.cumsum(h[order])
        g_tot = gl[-1]
        h_tot = hl[-1]
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        if cut.size == 0:
            continue
        gL = gl[cut]
        hL = np.maximum(hl[cut], _HESS_FLOOR)
        gR = g_tot - gl[cut]
        hR = np.maximum(h_tot - hl[cut], _HESS_FLOOR)
        score = gL * gL / hL + gR * gR / hR
        i = int(np.argmax(score))
        if score[i] > best_score:
            b = cut[i]
            best_j, best_thr, best_score = j, (sv[b] + sv[b + 1]) / 2.0, float(score[i])
    return best_j, best_thr, best_score


def tree_apply(feat: np.ndarray, thr: np.ndarray, left: np.ndarray, right: np.ndarray, X: np.ndarray):
    """Route every row of X to a leaf of the array-encoded tree.

    ``feat[node] < 0`` marks a leaf; otherwise rows with
    ``x[feat[node]] <= thr[node]`` descend to ``left[node]``.
    Returns the (n,) int32 array of reached leaf node ids.
    """
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int32)
    idx = np.nonzero(feat[node] >= 0)[0]
    while idx.size:
        nd = node[idx]
        f = feat[nd]
        go_left = X[idx, f] <= thr[nd]
        node[idx] = np.where(go_left, left[nd], right[nd])
        idx = idx[feat[node[idx]] >= 0]
    return node
