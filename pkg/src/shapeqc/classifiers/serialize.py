"""Model JSON persistence.

Schema: {version, kind, seed, standardization, feature_names, parameters}
with arrays stored as nested JSON numbers. Floats are written with Python's
shortest round-trip repr, so save -> load reproduces every parameter bit for
bit and predictions are identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import ParseError, SchemaMismatchError
from ..features import FEATURE_NAMES, N_FEATURES
from .base import StandardizationStats, TrainedModel
from .defaults import KINDS

MODEL_SCHEMA_VERSION = "1"

_TREE_FIELDS = (
    ("feature", np.int32),
    ("threshold", np.float64),
    ("left", np.int32),
    ("right", np.int32),
    ("value", np.float64),
)


def _tree_out(tree):
    return {name: tree[name].tolist() for name, _ in _TREE_FIELDS}


def _tree_in(obj):
    return {name: np.asarray(obj[name], dtype=dt) for name, dt in _TREE_FIELDS}


def _mat_in(obj, cols):
    arr = np.asarray(obj, dtype=np.float64)
    return arr.reshape(len(obj), cols) if arr.size else np.zeros((0, cols))


def _params_out(kind: str, p: dict) -> dict:
    if p.get("degenerate"):
        return {"degenerate": True, "constant_label": int(p["constant_label"])}
    out: dict = {"degenerate": False}
    if kind == "decision_tree":
        out["tree"] = _tree_out(p["tree"])
    elif kind in ("random_forest", "extra_trees"):
        out["trees"] = [_tree_out(t) for t in p["trees"]]
    elif kind == "adaboost":
        for k in ("feature", "threshold", "left_class", "right_class", "alpha"):
            out[k] = p[k].tolist()
        if "fallback_label" in p:
            out["fallback_label"] = int(p["fallback_label"])
    elif kind == "gradient_boosting":
        out["f0"] = p["f0"]
        out["learning_rate"] = p["learning_rate"]
        out["trees"] = [_tree_out(t) for t in p["trees"]]
    elif kind in ("logistic_regression", "lda"):
        out["weights"] = p["weights"].tolist()
        out["bias"] = p["bias"]
    elif kind == "svm":
        out["support_vectors"] = p["support_vectors"].tolist()
        out["coef"] = p["coef"].tolist()
        out["bias"] = p["bias"]
        out["gamma"] = p["gamma"]
    elif kind == "knn":
        out["train_x"] = p["train_x"].tolist()
        out["train_y"] = p["train_y"].tolist()
        out["k"] = p["k"]
    elif kind == "mlp":
        for k in ("w1", "b1", "w2", "b2"):
            out[k] = p[k].tolist()
    return out


def _params_in(kind: str, p: dict) -> dict:
    if p.get("degenerate"):
        return {"degenerate": True, "constant_label": int(p["constant_label"])}
    out: dict = {"degenerate": False}
    if kind == "decision_tree":
        out["tree"] = _tree_in(p["tree"])
    elif kind in ("random_forest", "extra_trees"):
        out["trees"] = [_tree_in(t) for t in p["trees"]]
    elif kind == "adaboost":
        out["feature"] = np.asarray(p["feature"], dtype=np.int32)
        out["threshold"] = np.asarray(p["threshold"], dtype=np.float64)
        out["left_class"] = np.asarray(p["left_class"], dtype=np.int32)
        out["right_class"] = np.asarray(p["right_class"], dtype=np.int32)
        out["alpha"] = np.asarray(p["alpha"], dtype=np.float64)
        if "fallback_label" in p:
            out["fallback_label"] = int(p["fallback_label"])
    elif kind == "gradient_boosting":
        out["f0"] = float(p["f0"])
        out["learning_rate"] = float(p["learning_rate"])
        out["trees"] = [_tree_in(t) for t in p["trees"]]
    elif kind in ("logistic_regression", "lda"):
        out["weights"] = np.asarray(p["weights"], dtype=np.float64)
        out["bias"] = float(p["bias"])
    elif kind == "svm":
        out["support_vectors"] = _mat_in(p["support_vectors"], N_FEATURES)
        out["coef"] = np.asarray(p["coef"], dtype=np.float64)
        out["bias"] = float(p["bias"])
        out["gamma"] = float(p["gamma"])
    elif kind == "knn":
        out["train_x"] = _mat_in(p["train_x"], N_FEATURES)
        out["train_y"] = np.asarray(p["train_y"], dtype=np.int64)
        out["k"] = int(p["k"])
    elif kind == "mlp":
        out["w1"] = np.asarray(p["w1"], dtype=np.float64)
        out["b1"] = np.asarray(p["b1"], dtype=np.float64)
        out["w2"] = np.asarray(p["w2"], dtype=np.float64)
        out["b2"] = np.asarray(p["b2"], dtype=np.float64)
    return out


def model_to_json(model: TrainedModel) -> str:
    payload = {
        "version": MODEL_SCHEMA_VERSION,
        "kind": model.kind,
        "seed": int(model.seed),
        "standardization": {
            "mean": model.standardization.mean.tolist(),
            "std": model.standardization.std.tolist(),
        },
        "feature_names": list(model.feature_names),
        "parameters": _params_out(model.kind, model.params),
    }
    return json.dumps(payload, separators=(",", ":")) + "\n"


def model_from_json(text: str, path=None) -> TrainedModel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model JSON ({exc})", path) from None
    if not isinstance(payload, dict):
        raise ParseError("model file must hold a JSON object", path)
    version = payload.get("version")
    if version != MODEL_SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"model schema version {version!r} unsupported (expected {MODEL_SCHEMA_VERSION!r})"
        )
    kind = payload.get("kind")
    if kind not in KINDS:
        raise SchemaMismatchError(f"unknown model kind {kind!r}")
    names = tuple(payload.get("feature_names", ()))
    if names != FEATURE_NAMES:
        raise SchemaMismatchError("model feature names do not match the canonical order")
    try:
        stats = StandardizationStats(
            np.asarray(payload["standardization"]["mean"], dtype=np.float64),
            np.asarray(payload["standardization"]["std"], dtype=np.float64),
        )
        params = _params_in(kind, payload["parameters"])
        seed = int(payload["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model payload ({exc})", path) from None
    return TrainedModel(kind, seed, stats, names, params)


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def load_model(path) -> TrainedModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"), path)
