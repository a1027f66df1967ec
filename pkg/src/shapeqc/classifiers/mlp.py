"""Single-hidden-layer perceptron: 14 -> 100 ReLU -> 1 sigmoid.

Trained with Adam on mean cross-entropy, batch 32, 200 epochs, one seeded
shuffle per epoch. Weights start Glorot-uniform (limit sqrt(6/(fan_in +
fan_out))), biases at zero; the two weight matrices are drawn in a fixed
order so initialization is fully determined by the seed.
"""

from __future__ import annotations

import numpy as np

from ..numeric import rng_from_seed, rowwise_dot, sigmoid
from .base import FITTERS, SCORERS


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _fit_mlp(Xs, y, seed, hyper):
    rng = rng_from_seed(seed)
    n, d = Xs.shape
    h = int(hyper["hidden"])
    yf = y.astype(np.float64).reshape(-1, 1)

    W1 = _glorot(rng, d, h)
    b1 = np.zeros(h)
    W2 = _glorot(rng, h, 1)
    b2 = np.zeros(1)

    params = [W1, b1, W2, b2]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    lr, beta1, beta2, eps = (
        float(hyper["learning_rate"]),
        float(hyper["beta1"]),
        float(hyper["beta2"]),
        float(hyper["eps"]),
    )
    bs = int(hyper["batch_size"])
    t = 0
    for _epoch in range(hyper["epochs"]):
        perm = rng.permutation(n)
        for s in range(0, n, bs):
            idx = perm[s : s + bs]
            Xb, yb = Xs[idx], yf[idx]
            B = len(idx)
            Z1 = Xb @ W1 + b1
            A1 = np.maximum(Z1, 0.0)
            z2 = A1 @ W2 + b2
            p = sigmoid(z2)

            dz2 = (p - yb) / B
            gW2 = A1.T @ dz2
            gb2 = dz2.sum(axis=0)
            dA1 = dz2 @ W2.T
            dZ1 = dA1 * (Z1 > 0.0)
            gW1 = Xb.T @ dZ1
            gb1 = dZ1.sum(axis=0)

            t += 1
            for k, grad in enumerate((gW1, gb1, gW2, gb2)):
                m[k] = beta1 * m[k] + (1.0 - beta1) * grad
                v[k] = beta2 * v[k] + (1.0 - beta2) * grad * grad
                m_hat = m[k] / (1.0 - beta1**t)
                v_hat = v[k] / (1.0 - beta2**t)
                params[k] -= lr * m_hat / (np.sqrt(v_hat) + eps)
            W1, b1, W2, b2 = params
    return {"w1": W1, "b1": b1, "w2": W2, "b2": b2}


def _score_mlp(params, Xs):
    A1 = np.maximum(rowwise_dot(Xs, params["w1"]) + params["b1"], 0.0)
    z = rowwise_dot(A1, params["w2"])[:, 0] + params["b2"][0]
    return sigmoid(z)


FITTERS["mlp"] = _fit_mlp
SCORERS["mlp"] = _score_mlp
