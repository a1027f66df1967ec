"""Linear models: L2-regularized logistic regression and LDA.

Logistic regression minimizes the summed negative log-likelihood plus
(l2/2)*||w||^2 (bias unpenalized) by full-batch gradient descent with Armijo
backtracking, stopping when the gradient infinity-norm drops below 1e-8 or
after 5000 iterations.

LDA pools the within-class covariance (ridge 1e-6 on the diagonal) and maps
the resulting linear discriminant to a probability through the implied
Gaussian posterior, which reduces to a sigmoid of the discriminant.
"""

from __future__ import annotations

import numpy as np

from ..numeric import rowwise_dot, sigmoid
from .base import FITTERS, SCORERS


def _nll(z, yf):
    # log(1 + exp(z)) - y*z, computed stably
    return float(np.sum(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))) - yf * z))


def _fit_logistic_regression(Xs, y, seed, hyper):
    n, d = Xs.shape
    yf = y.astype(np.float64)
    lam = float(hyper["l2"])
    w = np.zeros(d)
    b = 0.0
    z = np.zeros(n)
    obj = _nll(z, yf) + 0.0
    for _ in range(hyper["max_iter"]):
        p = sigmoid(z)
        r = p - yf
        gw = Xs.T @ r + lam * w
        gb = float(r.sum())
        gnorm_inf = max(float(np.max(np.abs(gw))), abs(gb))
        if gnorm_inf < hyper["grad_tol"]:
            break
        gsq = float(gw @ gw) + gb * gb
        t = 1.0
        for _bt in range(60):
            w_new = w - t * gw
            b_new = b - t * gb
            z_new = Xs @ w_new + b_new
            obj_new = _nll(z_new, yf) + 0.5 * lam * float(w_new @ w_new)
            if obj_new <= obj - 1e-4 * t * gsq:
                break
            t *= 0.5
        w, b, z, obj = w_new, b_new, z_new, obj_new
    return {"weights": w, "bias": float(b)}


def _score_linear(params, Xs):
    z = rowwise_dot(Xs, params["weights"].reshape(-1, 1))[:, 0] + params["bias"]
    return sigmoid(z)


def _fit_lda(Xs, y, seed, hyper):
    n, d = Xs.shape
    mu0 = Xs[y == 0].mean(axis=0)
    mu1 = Xs[y == 1].mean(axis=0)
    d0 = Xs[y == 0] - mu0
    d1 = Xs[y == 1] - mu1
    pooled = (d0.T @ d0 + d1.T @ d1) / max(n - 2, 1)
    pooled = pooled + hyper["ridge"] * np.eye(d)
    w = np.linalg.solve(pooled, mu1 - mu0)
    n1 = int(np.sum(y == 1))
    prior = np.log(n1 / (n - n1))
    b = float(-0.5 * (mu0 + mu1) @ w + prior)
    return {"weights": w, "bias": b}


FITTERS["logistic_regression"] = _fit_logistic_regression
SCORERS["logistic_regression"] = _score_linear
FITTERS["lda"] = _fit_lda
SCORERS["lda"] = _score_linear
