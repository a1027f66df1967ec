"""Shared numeric helpers with reproducibility guarantees.

All model scoring goes through the rowwise reductions here instead of BLAS
matmuls: each output element is reduced over the last, contiguous axis, so
results depend only on the row content, never on the batch size or chunking.
That makes ``predict`` on one row bit-identical to any batched call.

RNG convention used across the package: numpy ``Generator(PCG64)`` seeded via
``SeedSequence``; independent child streams come from ``SeedSequence.spawn``.
"""

from __future__ import annotations

import os

import numpy as np

# temp buffers for chunked broadcasting stay below ~64 MB
_CHUNK_BUDGET = 8_000_000


def rng_from_seed(seed: int) -> np.random.Generator:
    """Canonical generator: PCG64 seeded through SeedSequence."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_seeds(seed: int, n: int) -> list[int]:
    """n independent 64-bit child seeds of a master seed (SeedSequence.spawn)."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def rowwise_dot(X: np.ndarray, W: np.ndarray) -> np.ndarray:
    """(n, d) x (d, m) -> (n, m) with per-row fixed-order reductions."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    W = np.ascontiguousarray(W, dtype=np.float64)
    n, d = X.shape
    m = W.shape[1]
    Wt = np.ascontiguousarray(W.T)[None, :, :]  # (1, m, d)
    out = np.empty((n, m), dtype=np.float64)
    step = max(1, min(n, _CHUNK_BUDGET // max(1, m * d)))
    for s in range(0, n, step):
        e = min(n, s + step)
        out[s:e] = np.sum(X[s:e, None, :] * Wt, axis=2)
    return out


def rowwise_sqdist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(n, d) x (m, d) -> (n, m) squared Euclidean distances, fixed order."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    n, d = X.shape
    m = C.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    step = max(1, min(n, _CHUNK_BUDGET // max(1, m * d)))
    for s in range(0, n, step):
        e = min(n, s + step)
        diff = X[s:e, None, :] - C[None, :, :]
        out[s:e] = np.sum(diff * diff, axis=2)
    return out


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sorted_sum(x: np.ndarray) -> float:
    """Sum over ascending-sorted values: permutation-invariant bitwise."""
    return float(np.sum(np.sort(x)))


def worker_count() -> int:
    """Worker cap for file-level parallel loops (SHAPEQC_THREADS)."""
    env = os.environ.get("SHAPEQC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)
