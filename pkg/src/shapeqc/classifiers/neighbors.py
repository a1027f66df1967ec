"""k-nearest-neighbors on standardized features.

Euclidean distances, k = 5, majority vote; distance ties resolve toward the
lower training-row index (stable sort), and the score is the Good fraction
among the k neighbors.
"""

from __future__ import annotations

import numpy as np

from ..numeric import rowwise_sqdist
from .base import FITTERS, SCORERS


def _fit_knn(Xs, y, seed, hyper):
    return {"train_x": Xs.copy(), "train_y": y.copy(), "k": int(hyper["k"])}


def _score_knn(params, Xs):
    k = min(params["k"], len(params["train_y"]))
    d = rowwise_sqdist(Xs, params["train_x"])
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    votes = params["train_y"][order]
    return votes.mean(axis=1)


FITTERS["knn"] = _fit_knn
SCORERS["knn"] = _score_knn
