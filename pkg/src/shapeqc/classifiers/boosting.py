"""Boosted ensembles: AdaBoost over depth-1 stumps and gradient boosting.

AdaBoost follows the binary SAMME scheme: stumps are trained on weighted
Gini, alpha = ln((1 - eps) / eps), and boosting stops early on a perfect
stump (kept with alpha 1.0) or on eps >= 0.5 (stump discarded). If the very
first stump is discarded, the model falls back to a constant predictor of
the weighted majority class. The ensemble score maps the normalized signed
margin into [0, 1], so a zero margin scores exactly 0.5 and resolves to Bad.

Gradient boosting minimizes binomial deviance from the train log-odds with
depth-3 trees; split gain and leaf values come from a single Newton step
(hessians floored at 1e-12).
"""

from __future__ import annotations

import numpy as np

from .._kernels import newton_best_split, tree_apply
from ..numeric import sigmoid
from .base import FITTERS, SCORERS
from .trees import _finalize, _new_node

_HESS_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# AdaBoost

def _weighted_stump(X, y, w):
    """Best single split under weighted Gini; returns (j, thr, left_cls, right_cls).

    Scans features left to right and thresholds ascending; the first strict
    maximum of the weighted analog of sum(count^2)/n wins. Falls back to
    j = -1 when every feature is constant.
    """
    n, d = X.shape
    w0 = np.where(y == 0, w, 0.0)
    w1 = np.where(y == 1, w, 0.0)
    t0, t1 = float(w0.sum()), float(w1.sum())
    best = (-1, 0.0, -np.inf)
    for j in range(d):
        order = np.argsort(X[:, j], kind="stable")
        sv = X[order, j]
        c0 = np.cumsum(w0[order])
        c1 = np.cumsum(w1[order])
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        if len(cut) == 0:
            continue
        nl = c0[cut] + c1[cut]
        nr = (t0 + t1) - nl
        score = (c0[cut] ** 2 + c1[cut] ** 2) / nl + ((t0 - c0[cut]) ** 2 + (t1 - c1[cut]) ** 2) / nr
        k = int(np.argmax(score))
        if score[k] > best[2]:
            thr = (sv[cut[k]] + sv[cut[k] + 1]) / 2.0
            best = (j, float(thr), float(score[k]))
    j, thr, _ = best
    if j < 0:
        return -1, 0.0, 0, 0
    mask = X[:, j] <= thr
    # side class = weighted majority, ties to Bad
    lc = 1 if w1[mask].sum() > w0[mask].sum() else 0
    rc = 1 if w1[~mask].sum() > w0[~mask].sum() else 0
    return j, thr, lc, rc


def _fit_adaboost(Xs, y, seed, hyper):
    n = Xs.shape[0]
    w = np.full(n, 1.0 / n)
    feats, thrs, lcs, rcs, alphas = [], [], [], [], []
    for _ in range(hyper["n_stumps"]):
        j, thr, lc, rc = _weighted_stump(Xs, y, w)
        if j < 0:
            break
        pred = np.where(Xs[:, j] <= thr, lc, rc)
        miss = pred != y
        eps = float(w[miss].sum())
        if eps >= 0.5:
            break
        if eps == 0.0:
            feats.append(j)
            thrs.append(thr)
            lcs.append(lc)
            rcs.append(rc)
            alphas.append(1.0)
            break
        alpha = float(np.log((1.0 - eps) / eps))
        feats.append(j)
        thrs.append(thr)
        lcs.append(lc)
        rcs.append(rc)
        alphas.append(alpha)
        w = w * np.exp(alpha * miss)
        w = w / w.sum()
    params = {
        "feature": np.asarray(feats, dtype=np.int32),
        "threshold": np.asarray(thrs, dtype=np.float64),
        "left_class": np.asarray(lcs, dtype=np.int32),
        "right_class": np.asarray(rcs, dtype=np.int32),
        "alpha": np.asarray(alphas, dtype=np.float64),
    }
    if len(feats) == 0:
        # every stump was rejected; majority-class constant fallback
        c1 = float(np.sum(y == 1))
        params["fallback_label"] = 1 if c1 > n - c1 else 0
    return params


def _score_adaboost(params, Xs):
    if len(params["feature"]) == 0:
        return np.full(Xs.shape[0], float(params["fallback_label"]))
    total = float(params["alpha"].sum())
    margin = np.zeros(Xs.shape[0], dtype=np.float64)
    for j, thr, lc, rc, a in zip(
        params["feature"], params["threshold"], params["left_class"], params["right_class"], params["alpha"]
    ):
        pred = np.where(Xs[:, j] <= thr, float(lc), float(rc))
        margin += a * (2.0 * pred - 1.0)
    return (margin / total + 1.0) / 2.0


# ---------------------------------------------------------------------------
# Gradient boosting

def _build_newton_tree(X, g, h, max_depth, min_samples_split):
    n = X.shape[0]
    tree = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}
    root = _new_node(tree)
    stack = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        gs, hs = g[idx], h[idx]
        tree["value"][node] = -float(gs.sum()) / max(float(hs.sum()), _HESS_FLOOR)
        if len(idx) < min_samples_split or depth >= max_depth:
            continue
        sub = np.ascontiguousarray(X[idx])
        j, thr, _gain = newton_best_split(sub, np.ascontiguousarray(gs), np.ascontiguousarray(hs))
        if j < 0:
            continue
        mask = X[idx, j] <= thr
        li, ri = idx[mask], idx[~mask]
        if len(li) == 0 or len(ri) == 0:
            continue
        left = _new_node(tree)
        right = _new_node(tree)
        tree["feature"][node] = int(j)
        tree["threshold"][node] = float(thr)
        tree["left"][node] = left
        tree["right"][node] = right
        stack.append((right, ri, depth + 1))
        stack.append((left, li, depth + 1))
    return _finalize(tree)


def _fit_gradient_boosting(Xs, y, seed, hyper):
    n = Xs.shape[0]
    yf = y.astype(np.float64)
    p1 = float(yf.sum()) / n
    f0 = float(np.log(p1 / (1.0 - p1)))
    F = np.full(n, f0)
    trees = []
    for _ in range(hyper["n_trees"]):
        p = sigmoid(F)
        g = p - yf
        h = p * (1.0 - p)
        tree = _build_newton_tree(Xs, g, h, hyper["max_depth"], hyper["min_samples_split"])
        trees.append(tree)
        nodes = tree_apply(tree["feature"], tree["threshold"], tree["left"], tree["right"], Xs)
        F = F + hyper["learning_rate"] * tree["value"][nodes]
    return {"f0": f0, "learning_rate": float(hyper["learning_rate"]), "trees": trees}


def _score_gradient_boosting(params, Xs):
    F = np.full(Xs.shape[0], params["f0"])
    for tree in params["trees"]:
        nodes = tree_apply(
            tree["feature"], tree["threshold"], tree["left"], tree["right"], np.ascontiguousarray(Xs)
        )
        F = F + params["learning_rate"] * tree["value"][nodes]
    return sigmoid(F)


FITTERS["adaboost"] = _fit_adaboost
SCORERS["adaboost"] = _score_adaboost
FITTERS["gradient_boosting"] = _fit_gradient_boosting
SCORERS["gradient_boosting"] = _score_gradient_boosting
