import itertools
import math

import numpy as np
import pytest

from shapeqc import (
    Attribution,
    BackgroundSet,
    EmptyEvaluationError,
    FEATURE_NAMES,
    LengthMismatchError,
    fit,
    render_beeswarm,
    shapley_exact,
    shapley_sampled,
    summary_table,
    write_attributions_csv,
    write_summary_csv,
)
from shapeqc.numeric import rng_from_seed

D = 14


def linear_scorer(w, b=0.0):
    w = np.asarray(w, dtype=np.float64)

    def score(X):
        return X @ w + b

    return score


def brute_force_shapley(score, x, bg):
    """Direct enumeration over all subsets using the factorial weights."""
    d = len(x)
    phi = np.zeros(d)
    idx = list(range(d))
    for i in idx:
        rest = [j for j in idx if j != i]
        for r in range(d):
            for S in itertools.combinations(rest, r):
                w = math.factorial(r) * math.factorial(d - r - 1) / math.factorial(d)
                comp_with = np.array(bg.X, copy=True)
                comp_without = np.array(bg.X, copy=True)
                for j in S:
                    comp_with[:, j] = x[j]
                    comp_without[:, j] = x[j]
                comp_with[:, i] = x[i]
                v_with = score(comp_with).mean()
                v_without = score(comp_without).mean()
                phi[i] += w * (v_with - v_without)
    return phi


class TestBackgroundSet:
    def test_from_rows_subsamples(self):
        X = rng_from_seed(0).normal(size=(100, D))
        bg = BackgroundSet.from_rows(X, n=16, seed=1)
        assert bg.size == 16

    def test_small_pool_kept_whole(self):
        X = rng_from_seed(0).normal(size=(5, D))
        assert BackgroundSet.from_rows(X, n=64, seed=0).size == 5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            BackgroundSet(np.zeros((0, D)))


class TestExactShapley:
    def test_constant_scorer_all_zero(self):
        bg = BackgroundSet(rng_from_seed(2).normal(size=(8, D)))
        x = np.zeros(D)
        a = shapley_exact(lambda X: np.full(len(X), 0.7), x, bg)
        np.testing.assert_array_equal(a.phi, 0.0)
        assert a.fx == pytest.approx(0.7)
        assert a.base_value == pytest.approx(0.7)

    def test_linear_closed_form(self):
        rng = rng_from_seed(3)
        w = rng.normal(size=D)
        bg = BackgroundSet(rng.normal(size=(16, D)))
        for _ in range(10):
            x = rng.normal(size=D)
            a = shapley_exact(linear_scorer(w, 0.25), x, bg)
            expected = w * (x - bg.X.mean(axis=0))
            np.testing.assert_allclose(a.phi, expected, atol=1e-9)

    def test_null_player_exact_zero(self):
        rng = rng_from_seed(4)
        w = rng.normal(size=D)
        w[6] = 0.0
        bg = BackgroundSet(rng.normal(size=(8, D)))
        a = shapley_exact(linear_scorer(w), rng.normal(size=D), bg)
        assert a.phi[6] == 0.0

    def test_symmetry_of_identical_features(self):
        # product scorer treats features 1 and 2 identically; give x and
        # the background identical values in both columns
        def score(X):
            return X[:, 1] * X[:, 2]

        rng = rng_from_seed(5)
        bg_X = rng.normal(size=(8, D))
        bg_X[:, 2] = bg_X[:, 1]
        x = rng.normal(size=D)
        x[2] = x[1]
        a = shapley_exact(score, x, BackgroundSet(bg_X))
        assert a.phi[1] == pytest.approx(a.phi[2], abs=1e-12)

    def test_efficiency_for_nonlinear_scorer(self):
        def score(X):
            return np.tanh(X[:, 0] * X[:, 3] - X[:, 9] ** 2)

        rng = rng_from_seed(6)
        bg = BackgroundSet(rng.normal(size=(12, D)))
        for _ in range(5):
            x = rng.normal(size=D)
            a = shapley_exact(score, x, bg)
            assert abs(a.phi.sum() - (a.fx - a.base_value)) <= 1e-6

    def test_matches_brute_force_on_three_active_features(self):
        """Independent subset enumeration agrees with the lattice evaluation."""

        def score(X):
            return X[:, 0] + 2.0 * X[:, 1] * X[:, 2]

        rng = rng_from_seed(7)
        bg = BackgroundSet(rng.normal(size=(4, D)))
        x = rng.normal(size=D)
        a = shapley_exact(score, x, bg)
        want = brute_force_shapley(score, x, bg)
        np.testing.assert_allclose(a.phi, want, atol=1e-9)

    def test_trained_model_budget_warning(self):
        rng = rng_from_seed(8)
        X = rng.normal(size=(20, D))
        y = (X[:, 0] > 0).astype(np.int64)
        m = fit("svm", X, y)
        bg = BackgroundSet(X[:4])
        with pytest.warns(RuntimeWarning):
            shapley_exact(m, X[0], bg)


class TestSampledShapley:
    def test_linear_is_exact_per_permutation(self):
        rng = rng_from_seed(9)
        w = rng.normal(size=D)
        bg = BackgroundSet(rng.normal(size=(8, D)))
        x = rng.normal(size=D)
        a = shapley_sampled(linear_scorer(w), x, bg, n_permutations=3, seed=0)
        expected = w * (x - bg.X.mean(axis=0))
        np.testing.assert_allclose(a.phi, expected, atol=1e-9)

    def test_efficiency_always_holds(self):
        def score(X):
            return 1.0 / (1.0 + np.exp(-(X[:, 0] * X[:, 1] + X[:, 5])))

        rng = rng_from_seed(10)
        bg = BackgroundSet(rng.normal(size=(8, D)))
        x = rng.normal(size=D)
        a = shapley_sampled(score, x, bg, n_permutations=5, seed=1)
        assert abs(a.phi.sum() - (a.fx - a.base_value)) <= 1e-9

    def test_converges_to_exact(self):
        def score(X):
            return np.tanh(X[:, 0] * X[:, 1]) + 0.3 * X[:, 2]

        rng = rng_from_seed(11)
        bg = BackgroundSet(rng.normal(size=(6, D)))
        x = rng.normal(size=D)
        exact = shapley_exact(score, x, bg).phi

        def err(n_perm, seed):
            return np.abs(
                shapley_sampled(score, x, bg, n_permutations=n_perm, seed=seed).phi - exact
            ).max()

        coarse = np.mean([err(8, s) for s in range(5)])
        fine = np.mean([err(128, s) for s in range(5)])
        assert fine < coarse

    def test_determinism(self):
        def score(X):
            return X[:, 0] ** 2

        bg = BackgroundSet(rng_from_seed(12).normal(size=(4, D)))
        x = np.ones(D)
        a = shapley_sampled(score, x, bg, 4, seed=3)
        b = shapley_sampled(score, x, bg, 4, seed=3)
        np.testing.assert_array_equal(a.phi, b.phi)

    def test_requires_positive_permutations(self):
        bg = BackgroundSet(np.zeros((1, D)))
        with pytest.raises(ValueError):
            shapley_sampled(lambda X: np.zeros(len(X)), np.zeros(D), bg, 0)


class TestSummary:
    def make_attrs(self, n=6, lead=2):
        rng = rng_from_seed(13)
        X = rng.normal(size=(n, D))
        attrs = []
        for i in range(n):
            phi = rng.normal(scale=0.01, size=D)
            phi[lead] = 1.0 + rng.random()
            attrs.append(Attribution(f"inst_{i}", phi, 0.5, 0.5 + phi.sum()))
        return attrs, X

    def test_importance_ordering(self):
        attrs, X = self.make_attrs(lead=2)
        data = summary_table(attrs, list(X))
        assert data.ordered_names[0] == "min_z"
        assert data.mean_abs[data.order[0]] >= data.mean_abs[data.order[1]]

    def test_length_mismatch(self):
        attrs, X = self.make_attrs()
        with pytest.raises(LengthMismatchError):
            summary_table(attrs, list(X[:-1]))

    def test_empty(self):
        with pytest.raises(EmptyEvaluationError):
            summary_table([], [])

    def test_attribution_csv_layout(self, tmp_path):
        attrs, _ = self.make_attrs(n=3)
        path = tmp_path / "a.csv"
        write_attributions_csv(attrs, path)
        lines = path.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:3] == ["id", "base_value", "fx"]
        assert header[3:] == [f"phi_{n}" for n in FEATURE_NAMES]
        assert len(lines) == 4

    def test_summary_csv_layout(self, tmp_path):
        attrs, X = self.make_attrs()
        path = tmp_path / "s.csv"
        write_summary_csv(summary_table(attrs, list(X)), path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "feature,mean_abs_phi"
        assert len(lines) == 15
        assert lines[1].startswith("min_z,")


class TestBeeswarm:
    def test_svg_and_csv_twin(self, tmp_path):
        attrs, X = self.make_data()
        data = summary_table(attrs, list(X))
        path = tmp_path / "plot.svg"
        render_beeswarm(data, path)
        svg = path.read_text()
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert "min_z" in svg
        twin = tmp_path / "plot.csv"
        lines = twin.read_text().strip().splitlines()
        assert lines[0] == "feature,instance,phi,std_value"
        assert len(lines) == 1 + 14 * len(attrs)

    def test_render_is_deterministic(self, tmp_path):
        attrs, X = self.make_data()
        data = summary_table(attrs, list(X))
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render_beeswarm(data, a)
        render_beeswarm(data, b)
        assert a.read_bytes() == b.read_bytes()

    def test_all_zero_phi_renders(self, tmp_path):
        X = rng_from_seed(14).normal(size=(4, D))
        attrs = [Attribution(f"i{k}", np.zeros(D), 0.4, 0.4) for k in range(4)]
        data = summary_table(attrs, list(X))
        path = tmp_path / "z.svg"
        render_beeswarm(data, path)
        assert "<circle" in path.read_text()

    def make_data(self):
        rng = rng_from_seed(15)
        X = rng.normal(size=(5, D))
        attrs = []
        for i in range(5):
            phi = rng.normal(size=D) * 0.1
            phi[2] = 2.0
            attrs.append(Attribution(f"inst_{i}", phi, 0.5, 0.5 + phi.sum()))
        return attrs, X
