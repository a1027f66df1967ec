"""RBF support vector machine trained by simplified SMO.

Gamma follows the "scale" convention, 1 / (d * mean feature variance),
computed on the standardized training matrix. The pair partner j is drawn
uniformly from the other indices with the seeded package RNG, so training is
deterministic. Optimization sweeps the full index set; it stops after three
consecutive sweeps with no alpha update or at the 10 000-sweep cap. The
prediction score squashes the decision margin with a sigmoid; this affects
scores only, never labels (margin 0 scores exactly 0.5, resolving to Bad).
"""

from __future__ import annotations

import numpy as np

from ..numeric import rng_from_seed, rowwise_dot, rowwise_sqdist, sigmoid
from .base import FITTERS, SCORERS

_ALPHA_STEP_MIN = 1e-5


def _fit_svm(Xs, y, seed, hyper):
    n = Xs.shape[0]
    ypm = (2.0 * y - 1.0).astype(np.float64)
    var = Xs.var(axis=0)
    gamma = 1.0 / (Xs.shape[1] * max(float(var.mean()), 1e-12))
    sq = rowwise_sqdist(Xs, Xs)
    K = np.exp(-gamma * sq)
    C = float(hyper["C"])
    tol = float(hyper["tol"])
    rng = rng_from_seed(seed)

    alpha = np.zeros(n)
    b = 0.0
    passes = 0
    clean = 0
    while passes < hyper["max_passes"] and clean < hyper["clean_passes"]:
        changed = 0
        for i in range(n):
            av = alpha * ypm
            Ei = float(av @ K[i]) + b - ypm[i]
            if not (
                (ypm[i] * Ei < -tol and alpha[i] < C) or (ypm[i] * Ei > tol and alpha[i] > 0)
            ):
                continue
            j = int(rng.integers(0, n - 1))
            if j >= i:
                j += 1
            Ej = float(av @ K[j]) + b - ypm[j]
            ai_old, aj_old = float(alpha[i]), float(alpha[j])
            if ypm[i] != ypm[j]:
                L = max(0.0, aj_old - ai_old)
                H = min(C, C + aj_old - ai_old)
            else:
                L = max(0.0, ai_old + aj_old - C)
                H = min(C, ai_old + aj_old)
            if L == H:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj = aj_old - ypm[j] * (Ei - Ej) / eta
            aj = min(max(aj, L), H)
            if abs(aj - aj_old) < _ALPHA_STEP_MIN:
                continue
            ai = ai_old + ypm[i] * ypm[j] * (aj_old - aj)
            b1 = b - Ei - ypm[i] * (ai - ai_old) * K[i, i] - ypm[j] * (aj - aj_old) * K[i, j]
            b2 = b - Ej - ypm[i] * (ai - ai_old) * K[i, j] - ypm[j] * (aj - aj_old) * K[j, j]
            alpha[i], alpha[j] = ai, aj
            if 0.0 < ai < C:
                b = b1
            elif 0.0 < aj < C:
                b = b2
            else:
                b = (b1 + b2) / 2.0
            changed += 1
        passes += 1
        clean = clean + 1 if changed == 0 else 0

    sv = alpha > 0.0
    return {
        "support_vectors": Xs[sv].copy(),
        "coef": (alpha * ypm)[sv].copy(),
        "bias": float(b),
        "gamma": float(gamma),
    }


def _score_svm(params, Xs):
    svs = params["support_vectors"]
    if len(svs) == 0:
        f = np.full(Xs.shape[0], params["bias"])
    else:
        Kx = np.exp(-params["gamma"] * rowwise_sqdist(Xs, svs))
        f = rowwise_dot(Kx, params["coef"].reshape(-1, 1))[:, 0] + params["bias"]
    return sigmoid(f)


FITTERS["svm"] = _fit_svm
SCORERS["svm"] = _score_svm
