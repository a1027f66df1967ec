import hashlib
import os
import subprocess
import sys

import numpy as np
import pytest

from shapeqc._kernels import BACKEND, _pure, gini_best_split, newton_best_split, tree_apply
from shapeqc.numeric import rng_from_seed

needs_compiled = pytest.mark.skipif(
    BACKEND != "compiled", reason="compiled kernel extension not built"
)


def random_split_case(rng, n, d):
    X = rng.normal(size=(n, d))
    # force runs of duplicate values so threshold ties are exercised
    X[:, 0] = np.round(X[:, 0] * 2.0) / 2.0
    y = (rng.random(n) < 0.5).astype(np.int64)
    return np.ascontiguousarray(X), y


@needs_compiled
class TestKernelEquality:
    def test_gini_best_split(self):
        rng = rng_from_seed(0)
        for _ in range(150):
            n = int(rng.integers(2, 60))
            d = int(rng.integers(1, 6))
            X, y = random_split_case(rng, n, d)
            got = gini_best_split(X, y)
            want = _pure.gini_best_split(X, y)
            assert got[0] == want[0]
            assert got[1] == want[1] or (np.isnan(got[1]) and np.isnan(want[1]))
            assert got[2] == want[2] or (np.isnan(got[2]) and np.isnan(want[2]))

    def test_newton_best_split(self):
        rng = rng_from_seed(1)
        for _ in range(150):
            n = int(rng.integers(2, 60))
            d = int(rng.integers(1, 6))
            X, _ = random_split_case(rng, n, d)
            g = rng.normal(size=n)
            h = rng.random(n) * 0.25
            got = newton_best_split(X, g, h)
            want = _pure.newton_best_split(X, g, h)
            assert got[0] == want[0]
            assert got[1] == want[1] or (np.isnan(got[1]) and np.isnan(want[1]))
            assert got[2] == want[2] or (np.isnan(got[2]) and np.isnan(want[2]))

    def test_tree_apply(self):
        rng = rng_from_seed(2)
        feature = np.array([0, 2, -1, -1, -1], dtype=np.int32)
        threshold = np.array([0.0, 0.5, 0.0, 0.0, 0.0])
        left = np.array([1, 2, -1, -1, -1], dtype=np.int32)
        right = np.array([4, 3, -1, -1, -1], dtype=np.int32)
        X = np.ascontiguousarray(rng.normal(size=(500, 14)))
        got = tree_apply(feature, threshold, left, right, X)
        want = _pure.tree_apply(feature, threshold, left, right, X)
        np.testing.assert_array_equal(got, want)
        assert set(np.unique(got)) <= {2, 3, 4}


@needs_compiled
@pytest.mark.parametrize("kind", ["decision_tree", "random_forest", "gradient_boosting", "extra_trees"])
def test_trained_models_byte_identical_across_backends(kind, tmp_path):
    """The same fit under SHAPEQC_BACKEND=pure serializes byte-identically."""
    script = (
        "import numpy as np, hashlib\n"
        "from shapeqc import fit, model_to_json\n"
        "from shapeqc.numeric import rng_from_seed\n"
        "rng = rng_from_seed(31)\n"
        "X = rng.normal(size=(120, 14))\n"
        "y = (X[:, 2] + 0.4 * rng.normal(size=120) > 0).astype(np.int64)\n"
        f"m = fit({kind!r}, X, y, seed=6)\n"
        "print(hashlib.sha256(model_to_json(m).encode()).hexdigest())\n"
    )

    def run(backend):
        env = dict(os.environ, SHAPEQC_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", script], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        return out.stdout.strip()

    assert run("compiled") == run("pure")


def test_backend_name_is_valid():
    assert BACKEND in ("compiled", "pure")
    assert _pure.BACKEND == "pure"
