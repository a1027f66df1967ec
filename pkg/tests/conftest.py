import numpy as np
import pytest

from shapeqc import (
    LabeledDataset,
    SamplerConfig,
    extract_features,
    generate_corpus,
    sample_surface,
    split_dataset,
)
from shapeqc.numeric import spawn_seeds

BENCH_MIX = {
    "truncate_inferior": 0.40,
    "fragment": 0.30,
    "spikes": 0.15,
    "scale_anomaly": 0.15,
}

# (criterion number, PASS/FAIL line) pairs filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance scorecard")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def build_feature_dataset(n_good, n_bad, mix, seed, n_points=20000):
    """Synthesize a corpus and reduce it to a labeled feature dataset.

    Per-item sampling seeds derive from the same master seed that drives
    shape generation, mirroring the CLI pipeline.
    """
    shapes = generate_corpus(n_good, n_bad, mix, seed=seed)
    seeds = spawn_seeds(seed, len(shapes))
    ids, rows, labels = [], [], []
    for gs, s in zip(shapes, seeds):
        cloud = sample_surface(gs.mesh, SamplerConfig(n_points, s))
        ids.append(gs.item.id)
        rows.append(extract_features(cloud).values)
        labels.append(int(gs.item.label))
    X = np.asarray(rows, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    return LabeledDataset(tuple(ids), X, y)


@pytest.fixture(scope="session")
def bench_split():
    """The 500 Good / 500 Bad benchmark corpus, split 80/5/15 at seed 42."""
    ds = build_feature_dataset(500, 500, BENCH_MIX, seed=42)
    return split_dataset(ds, (0.80, 0.05, 0.15), seed=42)


@pytest.fixture(scope="session")
def trunc_split():
    """Corpus whose only defect is inferior truncation, for dominance checks."""
    ds = build_feature_dataset(120, 120, {"truncate_inferior": 1.0}, seed=7, n_points=4000)
    return split_dataset(ds, (0.80, 0.05, 0.15), seed=7)


@pytest.fixture(scope="session")
def small_split():
    """A quick mixed corpus for tests that only need plausible features."""
    ds = build_feature_dataset(40, 40, BENCH_MIX, seed=3, n_points=1500)
    return split_dataset(ds, (0.80, 0.05, 0.15), seed=3)
