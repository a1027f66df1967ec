"""Ten from-scratch classical classifiers behind one fit/predict interface."""

from __future__ import annotations

from . import boosting, linear, mlp, neighbors, svm, trees  # noqa: F401  (register kinds)
from .base import (
    Prediction,
    StandardizationStats,
    TrainedModel,
    fit,
    predict,
    predict_batch,
    score_matrix,
)
from .defaults import DEFAULTS, KINDS, STD_FLOOR
from .serialize import MODEL_SCHEMA_VERSION, load_model, model_from_json, model_to_json, save_model

__all__ = [
    "DEFAULTS",
    "KINDS",
    "MODEL_SCHEMA_VERSION",
    "Prediction",
    "STD_FLOOR",
    "StandardizationStats",
    "TrainedModel",
    "fit",
    "load_model",
    "model_from_json",
    "model_to_json",
    "predict",
    "predict_batch",
    "save_model",
    "score_matrix",
]
