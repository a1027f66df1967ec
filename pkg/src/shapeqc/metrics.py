"""Agreement metrics: accuracy, macro F1, prediction rates, Cohen's kappa.

Kappa is computed so that the textbook anchor cases come out exact: when the
observed agreement rate and the chance agreement rate are the same ratio of
integers, p_o - p_e is exactly zero in floating point because both sides are
produced by the identical division.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import QualityLabel, label_name
from .errors import EmptyEvaluationError, LengthMismatchError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Reference x prediction counts over {Good, Bad}.

    n_gb reads "reference Good, predicted Bad"; likewise for the others.
    """

    n_gg: int
    n_gb: int
    n_bg: int
    n_bb: int

    def __post_init__(self):
        if min(self.n_gg, self.n_gb, self.n_bg, self.n_bb) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n_gg + self.n_gb + self.n_bg + self.n_bb

    @staticmethod
    def from_labels(reference, predicted) -> "ConfusionMatrix":
        ref = _as_labels(reference)
        pred = _as_labels(predicted)
        if len(ref) != len(pred):
            raise LengthMismatchError(
                f"reference has {len(ref)} labels, predictions have {len(pred)}"
            )
        if len(ref) == 0:
            raise EmptyEvaluationError("cannot evaluate zero labels")
        return ConfusionMatrix(
            int(np.sum((ref == 1) & (pred == 1))),
            int(np.sum((ref == 1) & (pred == 0))),
            int(np.sum((ref == 0) & (pred == 1))),
            int(np.sum((ref == 0) & (pred == 0))),
        )


def _as_labels(labels) -> np.ndarray:
    arr = np.asarray([int(v) for v in labels], dtype=np.int64)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be 0 (Bad) or 1 (Good)")
    return arr


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise EmptyEvaluationError("empty confusion matrix")
    return (cm.n_gg + cm.n_bb) / cm.total


def _f1_one_class(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def f1_macro(cm: ConfusionMatrix) -> float:
    """Mean of the per-class F1 scores; a class with no predictions and no
    reference rows contributes 0."""
    if cm.total == 0:
        raise EmptyEvaluationError("empty confusion matrix")
    f1_good = _f1_one_class(cm.n_gg, cm.n_bg, cm.n_gb)
    f1_bad = _f1_one_class(cm.n_bb, cm.n_gb, cm.n_bg)
    return (f1_good + f1_bad) / 2.0


def cohens_kappa(reference, predicted) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e) over Good/Bad.

    Two identical constant raters give p_e = 1; that case returns 1.0.
    """
    ref = _as_labels(reference)
    pred = _as_labels(predicted)
    if len(ref) != len(pred):
        raise LengthMismatchError(f"reference has {len(ref)} labels, predictions have {len(pred)}")
    n = len(ref)
    if n == 0:
        raise EmptyEvaluationError("cannot compute kappa of zero labels")

    agree = int(np.sum(ref == pred))
    ref_good = int(np.sum(ref == 1))
    pred_good = int(np.sum(pred == 1))
    # integer numerators over a common denominator n*n keep the anchor cases
    # exact: p_o == p_e whenever agree*n == the chance product sum
    po_num = agree * n
    pe_num = ref_good * pred_good + (n - ref_good) * (n - pred_good)
    denom = n * n
    if pe_num == denom:
        return 1.0
    return (po_num - pe_num) / (denom - pe_num)


def prediction_rates(predicted) -> tuple[float, float]:
    """(pct_good, pct_bad) in percent at full double precision."""
    pred = _as_labels(predicted)
    if len(pred) == 0:
        raise EmptyEvaluationError("cannot compute rates of zero labels")
    good = int(np.sum(pred == 1))
    pct_good = 100.0 * good / len(pred)
    pct_bad = 100.0 * (len(pred) - good) / len(pred)
    return pct_good, pct_bad


@dataclass(frozen=True)
class ModelAgreement:
    model: str
    accuracy: float
    f1: float
    pct_good: float
    pct_bad: float
    kappa: float


@dataclass(frozen=True)
class AgreementReport:
    """Per-model agreement rows plus the reference rater's own rates."""

    rows: tuple
    reference_rates: tuple | None = None

    def to_csv(self) -> str:
        lines = ["model,acc,f1,good_pct,bad_pct,kappa"]
        for r in self.rows:
            lines.append(
                f"{r.model},{r.accuracy:.4f},{r.f1:.4f},{r.pct_good:.2f},{r.pct_bad:.2f},{r.kappa:.2f}"
            )
        if self.reference_rates is not None:
            g, b = self.reference_rates
            lines.append(f"reference,,,{g:.2f},{b:.2f},")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        import json

        payload = {
            "rows": [
                {
                    "model": r.model,
                    "acc": r.accuracy,
                    "f1": r.f1,
                    "good_pct": r.pct_good,
                    "bad_pct": r.pct_bad,
                    "kappa": r.kappa,
                }
                for r in self.rows
            ],
            "reference": None
            if self.reference_rates is None
            else {"good_pct": self.reference_rates[0], "bad_pct": self.reference_rates[1]},
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_text(self) -> str:
        headers = ("model", "acc", "f1", "good_pct", "bad_pct", "kappa")
        body = [
            (
                r.model,
                f"{r.accuracy:.4f}",
                f"{r.f1:.4f}",
                f"{r.pct_good:.2f}",
                f"{r.pct_bad:.2f}",
                f"{r.kappa:.2f}",
            )
            for r in self.rows
        ]
        if self.reference_rates is not None:
            g, b = self.reference_rates
            body.append(("reference", "-", "-", f"{g:.2f}", f"{b:.2f}", "-"))
        widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(headers)]
        def fmt(row):
            return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))
        lines = [fmt(headers), fmt(tuple("-" * w for w in widths))]
        lines.extend(fmt(row) for row in body)
        return "\n".join(lines) + "\n"


def agreement_row(model_name: str, reference, predicted) -> ModelAgreement:
    """One report row: accuracy/F1/rates/kappa of predictions vs reference."""
    cm = ConfusionMatrix.from_labels(reference, predicted)
    pg, pb = prediction_rates(predicted)
    return ModelAgreement(
        model=model_name,
        accuracy=accuracy(cm),
        f1=f1_macro(cm),
        pct_good=pg,
        pct_bad=pb,
        kappa=cohens_kappa(reference, predicted),
    )


def render_rates(pct_good: float, pct_bad: float) -> str:
    """Two-decimal rendering used across reports, e.g. '98.41/1.59'."""
    return f"{pct_good:.2f}/{pct_bad:.2f}"


def labels_from_predictions(preds) -> list:
    return [QualityLabel(int(p.label)) for p in preds]


__all__ = [
    "AgreementReport",
    "ConfusionMatrix",
    "ModelAgreement",
    "accuracy",
    "agreement_row",
    "cohens_kappa",
    "f1_macro",
    "label_name",
    "labels_from_predictions",
    "prediction_rates",
    "render_rates",
]
