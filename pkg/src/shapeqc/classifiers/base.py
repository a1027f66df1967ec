"""Model container types and the uniform train/score plumbing.

Every kind shares the same contract: features are z-scored with training
statistics (std floored at 1e-12), scoring returns a Good-probability-like
value in [0, 1], and the label is Good exactly when the score exceeds 0.5
(a score of exactly 0.5 resolves to Bad). Single-class training data yields
a degenerate constant model instead of an error, for every kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import QualityLabel
from ..errors import InvalidSpecError, TooFewRowsError
from ..features import FEATURE_NAMES, N_FEATURES, FeatureVector
from .defaults import DEFAULTS, KINDS, STD_FLOOR

# populated by the family modules at import time
FITTERS: dict = {}
SCORERS: dict = {}


@dataclass(frozen=True)
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.ascontiguousarray(np.asarray(self.mean, dtype=np.float64))
        std = np.ascontiguousarray(np.asarray(self.std, dtype=np.float64))
        if mean.shape != (N_FEATURES,) or std.shape != (N_FEATURES,):
            raise ValueError("standardization stats must have one entry per feature")
        if (std < STD_FLOOR).any():
            raise ValueError(f"stds must be floored at {STD_FLOOR}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @staticmethod
    def from_train(X: np.ndarray) -> "StandardizationStats":
        mean = X.mean(axis=0)
        std = np.sqrt(np.mean((X - mean) ** 2, axis=0))
        return StandardizationStats(mean, np.maximum(std, STD_FLOOR))

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    seed: int
    standardization: StandardizationStats
    feature_names: tuple
    params: dict

    @property
    def degenerate(self) -> bool:
        return bool(self.params.get("degenerate", False))


@dataclass(frozen=True)
class Prediction:
    label: QualityLabel
    score: float


def as_matrix(xs) -> np.ndarray:
    """Coerce an (n, 14) array or a sequence of FeatureVector to a matrix."""
    if isinstance(xs, np.ndarray):
        X = np.asarray(xs, dtype=np.float64)
    else:
        rows = [x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64) for x in xs]
        X = np.asarray(rows, dtype=np.float64).reshape(len(rows), N_FEATURES)
    if X.ndim != 2 or X.shape[1] != N_FEATURES:
        raise ValueError(f"expected (n, {N_FEATURES}) features, got {X.shape}")
    return np.ascontiguousarray(X)


def merged_hyper(kind: str, hyper: dict | None) -> dict:
    merged = dict(DEFAULTS[kind])
    if hyper:
        unknown = set(hyper) - set(merged)
        if unknown:
            raise InvalidSpecError(f"unknown {kind} hyperparameters: {sorted(unknown)}")
        merged.update(hyper)
    return merged


def fit(kind: str, X, y, seed: int = 0, hyper: dict | None = None) -> TrainedModel:
    """Train one classifier kind on feature rows; deterministic per seed.

    A single-class y yields a constant predictor flagged degenerate rather
    than an error.
    """
    if kind not in KINDS:
        raise InvalidSpecError(f"unknown classifier kind {kind!r} (expected one of {KINDS})")
    X = as_matrix(X)
    y = np.asarray([int(v) for v in y], dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y row counts differ")
    if X.shape[0] < 2:
        raise TooFewRowsError(f"need at least 2 training rows, got {X.shape[0]}")
    if not np.isfinite(X).all():
        raise ValueError("training features must be finite")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("training labels must be 0 or 1")

    stats = StandardizationStats.from_train(X)
    classes = np.unique(y)
    if len(classes) == 1:
        params = {"degenerate": True, "constant_label": int(classes[0])}
    else:
        params = dict(FITTERS[kind](stats.apply(X), y, int(seed), merged_hyper(kind, hyper)))
        params["degenerate"] = False
    return TrainedModel(kind, int(seed), stats, tuple(FEATURE_NAMES), params)


def score_matrix(model: TrainedModel, X) -> np.ndarray:
    """Good-probability scores for each row; row results are independent of
    batch size, so any slicing of X scores identically."""
    X = as_matrix(X)
    if model.degenerate:
        return np.full(X.shape[0], float(model.params["constant_label"]), dtype=np.float64)
    Xs = model.standardization.apply(X)
    return np.clip(SCORERS[model.kind](model.params, np.ascontiguousarray(Xs)), 0.0, 1.0)


def predict_batch(model: TrainedModel, xs) -> list:
    scores = score_matrix(model, xs)
    return [
        Prediction(QualityLabel.GOOD if s > 0.5 else QualityLabel.BAD, float(s))
        for s in scores
    ]


def predict(model: TrainedModel, x) -> Prediction:
    arr = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    return predict_batch(model, arr.reshape(1, N_FEATURES))[0]
