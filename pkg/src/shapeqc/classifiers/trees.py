"""CART-style trees: single decision tree, random forest, extra trees.

All three share one iterative builder. Node processing order (preorder,
left child first) and the split conventions are fixed: candidate features
scanned in candidate order, thresholds ascending, the first strictly best
Gini score wins. Split search runs on integer label counts, so results are
identical across the pure and compiled kernel backends, bit for bit.

Leaves store the Good fraction of their training rows. A single tree scores
with its leaf fraction; forests score with the share of trees whose leaf
majority is Good (a leaf fraction of exactly 0.5 votes Bad).
"""

from __future__ import annotations

import numpy as np

from .._kernels import gini_best_split, tree_apply
from ..numeric import rng_from_seed, spawn_seeds
from .base import FITTERS, SCORERS


def _new_node(tree):
    for arr in tree.values():
        arr.append(0)
    idx = len(tree["feature"]) - 1
    tree["feature"][idx] = -1
    return idx


def _finalize(tree):
    return {
        "feature": np.asarray(tree["feature"], dtype=np.int32),
        "threshold": np.asarray(tree["threshold"], dtype=np.float64),
        "left": np.asarray(tree["left"], dtype=np.int32),
        "right": np.asarray(tree["right"], dtype=np.int32),
        "value": np.asarray(tree["value"], dtype=np.float64),
    }


def _extra_split(X, idx, cand, ys, rng):
    """Extra-trees node split: one uniform threshold per candidate feature.

    Constant candidate columns draw no threshold. Integer count arithmetic
    keeps scores exact; first strict maximum wins in candidate order.
    """
    best = (-1, 0.0, -np.inf)
    n = len(idx)
    c1_tot = int(ys.sum())
    c0_tot = n - c1_tot
    for j in cand:
        col = X[idx, j]
        mn, mx = float(col.min()), float(col.max())
        if not mx > mn:
            continue
        thr = float(rng.uniform(mn, mx))
        mask = col <= thr
        n_l = int(mask.sum())
        if n_l == 0 or n_l == n:
            continue
        c1_l = int(ys[mask].sum())
        c0_l = n_l - c1_l
        c1_r = c1_tot - c1_l
        c0_r = c0_tot - c0_l
        score = (c0_l * c0_l + c1_l * c1_l) / n_l + (c0_r * c0_r + c1_r * c1_r) / (n - n_l)
        if score > best[2]:
            best = (int(j), thr, score)
    return best[0], best[1]


def build_classification_tree(X, y, rng, max_depth, min_samples_split, n_candidates, extra=False):
    """Grow one tree on (X, y); n_candidates None means scan all features."""
    n, d = X.shape
    tree = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}
    root = _new_node(tree)
    stack = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        ys = y[idx]
        n_node = len(idx)
        c1 = int(ys.sum())
        tree["value"][node] = c1 / n_node
        if (
            c1 == 0
            or c1 == n_node
            or n_node < min_samples_split
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        if n_candidates is None:
            cand = np.arange(d)
        else:
            cand = rng.choice(d, size=min(n_candidates, d), replace=False)
        if extra:
            j, thr = _extra_split(X, idx, cand, ys, rng)
        else:
            sub = np.ascontiguousarray(X[idx][:, cand])
            jj, thr, _score = gini_best_split(sub, np.ascontiguousarray(ys))
            j = int(cand[jj]) if jj >= 0 else -1
        if j < 0:
            continue
        mask = X[idx, j] <= thr
        li, ri = idx[mask], idx[~mask]
        if len(li) == 0 or len(ri) == 0:
            continue
        left = _new_node(tree)
        right = _new_node(tree)
        tree["feature"][node] = j
        tree["threshold"][node] = thr
        tree["left"][node] = left
        tree["right"][node] = right
        # LIFO stack: push right first so the left child is processed next,
        # fixing the preorder RNG consumption sequence
        stack.append((right, ri, depth + 1))
        stack.append((left, li, depth + 1))
    return _finalize(tree)


def apply_tree(tree: dict, X: np.ndarray) -> np.ndarray:
    """Leaf values for each row of X."""
    nodes = tree_apply(
        tree["feature"], tree["threshold"], tree["left"], tree["right"], np.ascontiguousarray(X)
    )
    return tree["value"][nodes]


def _fit_decision_tree(Xs, y, seed, hyper):
    tree = build_classification_tree(
        Xs, y, None, hyper["max_depth"], hyper["min_samples_split"], None
    )
    return {"tree": tree}


def _score_decision_tree(params, Xs):
    return apply_tree(params["tree"], Xs)


def _fit_forest(Xs, y, seed, hyper, extra):
    n = Xs.shape[0]
    trees = []
    for tree_seed in spawn_seeds(seed, hyper["n_trees"]):
        rng = rng_from_seed(tree_seed)
        if not extra and hyper.get("bootstrap", False):
            boot = rng.integers(0, n, size=n)
            Xb, yb = Xs[boot], y[boot]
        else:
            Xb, yb = Xs, y
        trees.append(
            build_classification_tree(
                Xb,
                yb,
                rng,
                hyper["max_depth"],
                hyper["min_samples_split"],
                hyper["n_candidates"],
                extra=extra,
            )
        )
    return {"trees": trees}


def _score_forest(params, Xs):
    votes = np.zeros(Xs.shape[0], dtype=np.float64)
    for tree in params["trees"]:
        votes += apply_tree(tree, Xs) > 0.5
    return votes / len(params["trees"])


FITTERS["decision_tree"] = _fit_decision_tree
SCORERS["decision_tree"] = _score_decision_tree
FITTERS["random_forest"] = lambda Xs, y, seed, hyper: _fit_forest(Xs, y, seed, hyper, False)
SCORERS["random_forest"] = _score_forest
FITTERS["extra_trees"] = lambda Xs, y, seed, hyper: _fit_forest(Xs, y, seed, hyper, True)
SCORERS["extra_trees"] = _score_forest
