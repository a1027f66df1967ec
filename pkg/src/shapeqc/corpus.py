"""Labeled datasets: label taxonomy, stratified splits, CSV and manifest IO.

A shape is rated into one of five source categories by an expert; the binary
quality label collapses those to Good (usable as-is) versus Bad (everything
else). Datasets are immutable; splits are seeded and stratified.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path

import numpy as np

from .errors import InvalidSpecError, ParseError, TooFewRowsError
from .features import FEATURE_NAMES, N_FEATURES
from .numeric import rng_from_seed

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_FRACTIONS = (0.80, 0.05, 0.15)

MANIFEST_VERSION = "1"


class QualityLabel(IntEnum):
    BAD = 0
    GOOD = 1


class SourceCategory(Enum):
    USABLE = "Usable"
    NO_FULL_SHAPE = "NoFullShape"
    REQUIRES_EDITING = "RequiresEditing"
    NOT_USABLE = "NotUsable"
    NOT_SURE = "NotSure"


def map_label(cat: SourceCategory) -> QualityLabel:
    """Collapse the five source categories to the binary quality label."""
    return QualityLabel.GOOD if cat is SourceCategory.USABLE else QualityLabel.BAD


DEFECT_KINDS = ("truncate_inferior", "fragment", "spikes", "scale_anomaly", "slab_nonorgan")

DEFECT_CATEGORY = {
    "truncate_inferior": SourceCategory.NO_FULL_SHAPE,
    "fragment": SourceCategory.NO_FULL_SHAPE,
    "spikes": SourceCategory.REQUIRES_EDITING,
    "scale_anomaly": SourceCategory.NOT_USABLE,
    "slab_nonorgan": SourceCategory.NOT_USABLE,
}


@dataclass(frozen=True)
class DefectSpec:
    """One injected defect: kind, severity in (0, 1], and its own seed."""

    kind: str
    magnitude: float
    seed: int

    def __post_init__(self):
        if self.kind not in DEFECT_KINDS:
            raise InvalidSpecError(f"unknown defect kind {self.kind!r} (expected one of {DEFECT_KINDS})")
        if not (0.0 < self.magnitude <= 1.0):
            raise InvalidSpecError(f"defect magnitude must lie in (0, 1], got {self.magnitude}")


def label_name(label) -> str:
    return "Good" if int(label) == 1 else "Bad"


def parse_label(text: str, *, allow_unknown: bool = False):
    """Accept Good/Bad (case-insensitive) or 0/1; optionally Unknown -> None."""
    t = text.strip().lower()
    if t in ("good", "1"):
        return QualityLabel.GOOD
    if t in ("bad", "0"):
        return QualityLabel.BAD
    if allow_unknown and t in ("unknown", ""):
        return None
    raise ParseError(f"invalid label {text!r} (expected Good, Bad, 0, or 1)")


@dataclass(frozen=True)
class LabeledDataset:
    """Feature rows with ids and labels; y = -1 marks an unlabeled row."""

    ids: tuple
    X: np.ndarray
    y: np.ndarray
    split: dict | None = None

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        X = np.ascontiguousarray(np.asarray(self.X, dtype=np.float64))
        y = np.ascontiguousarray(np.asarray(self.y, dtype=np.int64))
        n = len(ids)
        if len(set(ids)) != n:
            raise ValueError("dataset ids must be unique")
        if X.shape != (n, N_FEATURES):
            raise ValueError(f"X must be ({n}, {N_FEATURES}), got {X.shape}")
        if y.shape != (n,):
            raise ValueError(f"y must be ({n},), got {y.shape}")
        if not np.isin(y, (-1, 0, 1)).all():
            raise ValueError("labels must be 0, 1, or -1 (unlabeled)")
        if self.split is not None:
            if set(self.split) != set(ids):
                raise ValueError("split must assign exactly the dataset ids")
            bad = {s for s in self.split.values() if s not in SPLIT_NAMES}
            if bad:
                raise ValueError(f"invalid split names {sorted(bad)}")
            object.__setattr__(self, "split", dict(self.split))
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.ids)

    def with_split(self, split: dict) -> "LabeledDataset":
        return LabeledDataset(self.ids, self.X, self.y, split)

    def subset(self, split_name: str) -> "LabeledDataset":
        if self.split is None:
            raise ValueError("dataset has no split assignment")
        keep = [i for i, sid in enumerate(self.ids) if self.split[sid] == split_name]
        return LabeledDataset(
            tuple(self.ids[i] for i in keep), self.X[keep], self.y[keep], None
        )


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_sizes(n: int, fractions=DEFAULT_FRACTIONS):
    """Target (train, val, test) sizes: round val/test, train takes the rest."""
    if len(fractions) != 3:
        raise InvalidSpecError("fractions must be (train, val, test)")
    if min(fractions) < 0:
        raise InvalidSpecError("fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > 1e-12:
        raise InvalidSpecError(f"fractions must sum to 1, got {sum(fractions)!r}")
    n_val = _round_half_up(n * fractions[1])
    n_test = _round_half_up(n * fractions[2])
    n_train = n - n_val - n_test
    if n_train < 0:
        raise InvalidSpecError("rounded val+test sizes exceed the dataset")
    return n_train, n_val, n_test


def _largest_remainder(n_seats, global_counts, remaining, labels):
    quota = {l: n_seats * global_counts[l] / sum(global_counts.values()) for l in labels}
    seats = {l: min(int(math.floor(quota[l])), remaining[l]) for l in labels}
    left = n_seats - sum(seats.values())
    order = sorted(
        labels, key=lambda l: (-(quota[l] - math.floor(quota[l])), -global_counts[l], l)
    )
    while left > 0:
        progressed = False
        for l in order:
            if left == 0:
                break
            if seats[l] < remaining[l]:
                seats[l] += 1
                left -= 1
                progressed = True
        if not progressed:
            raise TooFewRowsError("split sizes exceed available rows")
    return seats


def split_dataset(ds: LabeledDataset, fractions=DEFAULT_FRACTIONS, seed: int = 0) -> LabeledDataset:
    """Assign rows to train/val/test, stratified by label, seeded.

    Val and test sizes are round(N * fraction); train absorbs the rounding
    remainder. Per-label seats follow largest-remainder apportionment against
    the global label ratio. Raises TooFewRowsError when a positive-size split
    would receive no rows of a label that exists in the data (empty splits,
    fraction 0, are exempt).
    """
    if ds.n < 3:
        raise TooFewRowsError(f"need at least 3 rows to split, got {ds.n}")
    n_train, n_val, n_test = split_sizes(ds.n, fractions)

    y = ds.y
    labels = sorted(set(int(v) for v in y))
    counts = {l: int(np.sum(y == l)) for l in labels}
    remaining = dict(counts)
    alloc = {}
    for name, n_s in (("val", n_val), ("test", n_test)):
        seats = _largest_remainder(n_s, counts, remaining, labels) if n_s else {l: 0 for l in labels}
        for l in labels:
            remaining[l] -= seats[l]
        alloc[name] = seats
    alloc["train"] = dict(remaining)

    for name, n_s in (("train", n_train), ("val", n_val), ("test", n_test)):
        if n_s == 0:
            continue
        for l in labels:
            if counts[l] > 0 and alloc[name][l] == 0:
                raise TooFewRowsError(
                    f"{name} split (size {n_s}) would receive 0 rows of label {l}"
                )

    rng = rng_from_seed(seed)
    assignment = {}
    for l in labels:
        idx = np.flatnonzero(y == l)
        perm = idx[rng.permutation(len(idx))]
        nv, nt = alloc["val"][l], alloc["test"][l]
        for i in perm[:nv]:
            assignment[ds.ids[i]] = "val"
        for i in perm[nv : nv + nt]:
            assignment[ds.ids[i]] = "test"
        for i in perm[nv + nt :]:
            assignment[ds.ids[i]] = "train"
    return ds.with_split(assignment)


# ---------------------------------------------------------------------------
# CSV interchange

FEATURES_HEADER = ("id", "label") + FEATURE_NAMES


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_features_csv(ds: LabeledDataset, path) -> None:
    lines = [",".join(FEATURES_HEADER)]
    for i, sid in enumerate(ds.ids):
        label = "Unknown" if ds.y[i] < 0 else label_name(ds.y[i])
        lines.append(",".join([sid, label] + [_fmt(v) for v in ds.X[i]]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_features_csv(path) -> LabeledDataset:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [(i, ln) for i, ln in enumerate(lines, start=1) if ln.strip()]
    if not rows:
        raise ParseError("empty features CSV", path)
    lineno, header = rows[0]
    if tuple(c.strip() for c in header.split(",")) != FEATURES_HEADER:
        raise ParseError(
            f"features CSV header must be {','.join(FEATURES_HEADER)!r}", path, lineno
        )
    ids, X, y = [], [], []
    for lineno, ln in rows[1:]:
        fields = [c.strip() for c in ln.split(",")]
        if len(fields) != len(FEATURES_HEADER):
            raise ParseError(
                f"expected {len(FEATURES_HEADER)} fields, got {len(fields)}", path, lineno
            )
        ids.append(fields[0])
        try:
            lab = parse_label(fields[1], allow_unknown=True)
        except ParseError as exc:
            raise ParseError(str(exc.args[0] if exc.args else exc), path, lineno) from None
        y.append(-1 if lab is None else int(lab))
        try:
            X.append([float(v) for v in fields[2:]])
        except ValueError as exc:
            raise ParseError(f"invalid feature value ({exc})", path, lineno) from None
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate ids in features CSV", path)
    Xa = np.asarray(X, dtype=np.float64).reshape(len(ids), N_FEATURES)
    return LabeledDataset(tuple(ids), Xa, np.asarray(y, dtype=np.int64))


def write_split_csv(ds: LabeledDataset, path) -> None:
    if ds.split is None:
        raise ValueError("dataset has no split assignment to write")
    lines = ["id,split"]
    for sid in ds.ids:
        lines.append(f"{sid},{ds.split[sid]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_split_csv(path) -> dict:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [(i, ln) for i, ln in enumerate(lines, start=1) if ln.strip()]
    if not rows:
        raise ParseError("empty split CSV", path)
    lineno, header = rows[0]
    if tuple(c.strip() for c in header.split(",")) != ("id", "split"):
        raise ParseError("split CSV header must be 'id,split'", path, lineno)
    out = {}
    for lineno, ln in rows[1:]:
        fields = [c.strip() for c in ln.split(",")]
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", path, lineno)
        sid, split = fields
        if split not in SPLIT_NAMES:
            raise ParseError(f"invalid split name {split!r}", path, lineno)
        if sid in out:
            raise ParseError(f"duplicate id {sid!r}", path, lineno)
        out[sid] = split
    return out


def read_reference_csv(path):
    """Reference-rater file: header id,label; returns (ids, labels) lists."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows = [(i, ln) for i, ln in enumerate(lines, start=1) if ln.strip()]
    if not rows:
        raise ParseError("empty reference CSV", path)
    lineno, header = rows[0]
    if tuple(c.strip() for c in header.split(",")) != ("id", "label"):
        raise ParseError("reference CSV header must be 'id,label'", path, lineno)
    ids, labels = [], []
    for lineno, ln in rows[1:]:
        fields = [c.strip() for c in ln.split(",")]
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", path, lineno)
        ids.append(fields[0])
        try:
            labels.append(parse_label(fields[1]))
        except ParseError as exc:
            raise ParseError(str(exc.args[0] if exc.args else exc), path, lineno) from None
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate ids in reference CSV", path)
    return ids, labels


# ---------------------------------------------------------------------------
# Corpus manifest

@dataclass(frozen=True)
class CorpusItem:
    id: str
    category: SourceCategory
    label: QualityLabel
    defect: DefectSpec | None
    seed: int
    mesh_path: str
    cloud_path: str | None = None


@dataclass(frozen=True)
class CorpusManifest:
    master_seed: int
    items: tuple
    version: str = MANIFEST_VERSION

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "master_seed": int(self.master_seed),
            "items": [
                {
                    "id": it.id,
                    "category": it.category.value,
                    "label": label_name(it.label),
                    "defect": None
                    if it.defect is None
                    else {
                        "kind": it.defect.kind,
                        "magnitude": it.defect.magnitude,
                        "seed": int(it.defect.seed),
                    },
                    "seed": int(it.seed),
                    "mesh_path": it.mesh_path,
                    "cloud_path": it.cloud_path,
                }
                for it in self.items
            ],
        }
        return json.dumps(payload, indent=2) + "\n"

    @staticmethod
    def from_json(text: str, path=None) -> "CorpusManifest":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid manifest JSON ({exc})", path) from None
        if not isinstance(payload, dict) or payload.get("version") != MANIFEST_VERSION:
            raise ParseError(
                f"manifest version must be {MANIFEST_VERSION!r}, got {payload.get('version')!r}",
                path,
            )
        try:
            items = []
            for raw in payload["items"]:
                defect = raw["defect"]
                spec = (
                    None
                    if defect is None
                    else DefectSpec(defect["kind"], float(defect["magnitude"]), int(defect["seed"]))
                )
                items.append(
                    CorpusItem(
                        id=str(raw["id"]),
                        category=SourceCategory(raw["category"]),
                        label=parse_label(raw["label"]),
                        defect=spec,
                        seed=int(raw["seed"]),
                        mesh_path=str(raw["mesh_path"]),
                        cloud_path=None if raw.get("cloud_path") is None else str(raw["cloud_path"]),
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed manifest item ({exc})", path) from None
        return CorpusManifest(int(payload["master_seed"]), tuple(items))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def load(path) -> "CorpusManifest":
        return CorpusManifest.from_json(Path(path).read_text(encoding="utf-8"), path)
