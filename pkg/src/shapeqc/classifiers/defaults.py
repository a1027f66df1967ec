"""Hyperparameter defaults for all ten classifier kinds, in one table.

These mirror widely used library defaults for each family; every constant
consumed anywhere in the training code lives here so the full configuration
of a run is auditable in one place.
"""

from __future__ import annotations

KINDS = (
    "svm",
    "decision_tree",
    "adaboost",
    "random_forest",
    "extra_trees",
    "gradient_boosting",
    "mlp",
    "knn",
    "logistic_regression",
    "lda",
)

# per-feature standard deviations are floored here before dividing
STD_FLOOR = 1e-12

DEFAULTS: dict[str, dict] = {
    "svm": {
        # RBF with the "scale" gamma convention: 1 / (d * mean feature variance)
        "C": 1.0,
        "tol": 1e-3,
        "max_passes": 10_000,
        "clean_passes": 3,
    },
    "decision_tree": {
        "max_depth": None,
        "min_samples_split": 2,
    },
    "adaboost": {
        "n_stumps": 50,
    },
    "random_forest": {
        "n_trees": 100,
        "max_depth": None,
        "min_samples_split": 2,
        "n_candidates": 3,  # floor(sqrt(14))
        "bootstrap": True,
    },
    "extra_trees": {
        "n_trees": 100,
        "max_depth": None,
        "min_samples_split": 2,
        "n_candidates": 3,
    },
    "gradient_boosting": {
        "n_trees": 100,
        "max_depth": 3,
        "min_samples_split": 2,
        "learning_rate": 0.1,
    },
    "mlp": {
        "hidden": 100,
        "learning_rate": 1e-3,
        "beta1": 0.9,
        "beta2": 0.999,
        "eps": 1e-8,
        "batch_size": 32,
        "epochs": 200,
    },
    "knn": {
        "k": 5,
    },
    "logistic_regression": {
        "l2": 1.0,
        "max_iter": 5000,
        "grad_tol": 1e-8,
    },
    "lda": {
        "ridge": 1e-6,
    },
}
